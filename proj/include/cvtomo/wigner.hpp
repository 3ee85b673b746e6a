#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cvtomo/fock.hpp"

namespace cvtomo {

/// Fixed phase-space point of the mode that is not plotted in a two-mode slice.
struct ModeSlice {
  int plot_mode = 1;
  double fixed_q = 0.0;
  double fixed_p = 0.0;
};

/// Real function sampled on a uniform (q, p) grid; values(i, j) is the value
/// at (q_axis[i], p_axis[j]).
struct PhaseSpaceGrid {
  std::vector<double> q_axis;
  std::vector<double> p_axis;
  RMatrix values;
  std::optional<ModeSlice> mode_slice;
  std::vector<std::string> warnings;

  double q_step() const;
  double p_step() const;
  // Throws DomainError for non-uniform or too short axes, DimensionError for a
  // value matrix that does not match them.
  void validate() const;
  // Riemann sum of the values times dq dp.
  double integral() const;
  // |W| <= scale / pi everywhere (scale = 1/pi for each extra mode factor).
  bool within_bound(double scale = 1.0, double tol = 1e-6) const;
};

// Uniform axis min, min + step, ..., up to max (inclusive within step/1000).
std::vector<double> uniform_axis(double min, double step, double max);

// Wigner function of the operator |m><n| at (q, p).
cplx wigner_kernel(int m, int n, double q, double p);
// All kernels W_{|m><n|}(q, p) for m, n < dim; entry (m, n).
CMatrix wigner_kernel_matrix(int dim, double q, double p);

PhaseSpaceGrid wigner_grid(const DensityMatrix& rho, const std::vector<double>& q_axis, const std::vector<double>& p_axis);

PhaseSpaceGrid wigner_two_mode_slice(const DensityMatrix& rho, const ModeSlice& slice, const std::vector<double>& q_axis,
                                     const std::vector<double>& p_axis);

/// W(q1, p1, q2, p2) on the product of one axis pair per mode, stored with
/// index ((i1 * np + j1) * nq + i2) * np + j2.
struct PhaseSpaceTensor {
  std::vector<double> q_axis;
  std::vector<double> p_axis;
  std::vector<double> values;

  double at(std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) const;
  double integral() const;
};

PhaseSpaceTensor wigner_two_mode_full(const DensityMatrix& rho, const std::vector<double>& q_axis,
                                      const std::vector<double>& p_axis);

} // namespace cvtomo
