#pragma once

#include <vector>

#include "cvtomo/fock.hpp"
#include "cvtomo/wigner.hpp"

namespace cvtomo {

/// Quadrature outcome densities pr(q, theta); values(i, j) belongs to
/// (q_axis[i], theta_axis[j]).
struct Sinogram {
  std::vector<double> q_axis;
  std::vector<double> theta_axis;
  RMatrix values;

  void validate() const;
};

struct KernelConfig {
  double cutoff_kc = 4.0;

  void validate() const;
};

// pr(q, theta) = <q_theta|rho|q_theta> for a single-mode state.
Sinogram sinogram(const DensityMatrix& rho, const std::vector<double>& q_axis, const std::vector<double>& theta_axis);

// (1/2) \int_{-kc}^{kc} |xi| e^{i xi x} d xi in closed form.
double irt_kernel(double x, const KernelConfig& cfg);

// Filtered back-projection onto the (q, p) grid with trapezoid weights.
// The result is not projected onto valid Wigner functions.
PhaseSpaceGrid inverse_radon(const Sinogram& sino, const KernelConfig& cfg, const std::vector<double>& q_axis,
                             const std::vector<double>& p_axis);

// rho_mn = 2 pi sum W(q, p) W_{|n><m|}(q, p) dq dp, Hermitized but not made
// positive. Requires coverage of |q|, |p| <= 5 at spacing <= 0.2.
CMatrix density_from_wigner(const PhaseSpaceGrid& w, const TruncationConfig& trunc);

} // namespace cvtomo
