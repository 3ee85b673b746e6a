#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cvtomo/fock.hpp"

namespace cvtomo {

/// Outcome q of the rotated quadrature q cos(theta) + p sin(theta).
struct QuadraturePoint {
  double q = 0.0;
  double theta = 0.0;

  // Equivalent point with theta in [0, pi): (q, theta + pi) ~ (-q, theta).
  QuadraturePoint canonical() const;
};

/// Coherent amplitude z = (q + i p) / sqrt2.
struct CoherentPoint {
  cplx z{0.0, 0.0};
};

enum class PovmKind { quadrature, coherent };

std::string to_string(PovmKind kind);
PovmKind povm_kind_from_string(const std::string& name);

/// Per-mode phase-space sampling axes; the multi-mode grid is their product
/// with every mode sharing the same axes.
struct SamplingGrid {
  PovmKind kind = PovmKind::quadrature;
  int modes = 1;
  std::vector<double> q_axis;
  std::vector<double> theta_axis;
  std::vector<double> z_axis;
  // Cell sizes used for the measure attached to each sample. Zero means
  // "derive from the axis spacing"; z_cell_im zero means use the z spacing.
  double q_step = 0.0;
  double theta_step = 0.0;
  double z_step = 0.0;
  double z_cell_im = 0.0;

  static SamplingGrid quadrature(int modes, double q_min, double q_max, int q_count, int theta_count);
  // Angles 0, step, ..., theta_max inclusive.
  static SamplingGrid quadrature_inclusive(int modes, double q_min, double q_max, int q_count, double theta_step,
                                           double theta_max);
  static SamplingGrid coherent(int modes, double z_min, double z_max, int z_count);

  void validate() const;

  std::size_t points_per_mode() const;
  std::size_t cardinality() const;

  double cell_q() const;
  double cell_theta() const;
  double cell_z() const;
  double cell_z_im() const;
  // Phase-space measure of one sample on one mode.
  double mode_weight() const;

  // Per-mode point indices (mode 1 first) of a flat element index.
  std::vector<std::size_t> point_indices(std::size_t flat) const;
  QuadraturePoint quadrature_point(std::size_t per_mode_index) const;
  CoherentPoint coherent_point(std::size_t per_mode_index) const;
};

/// One weighted rank-one measurement operator weight * |v><v| on the full
/// truncated space. The product vector is stored instead of the matrix.
struct POVMElement {
  std::string id;
  PovmKind kind = PovmKind::quadrature;
  std::vector<QuadraturePoint> quadrature_coords;
  std::vector<CoherentPoint> coherent_coords;
  double weight = 0.0;
  CVector vector;

  CMatrix matrix() const { return vector * vector.adjoint(); }
  CMatrix weighted_matrix() const { return weight * matrix(); }
  // weight * <v|rho|v>
  double weighted_expectation(const CMatrix& rho) const;
};

// Ket components <n|q_theta> = psi_n(q) e^{i n theta}, |q_theta> = e^{i theta n}|q>.
CVector quadrature_vector(const QuadraturePoint& point, const TruncationConfig& trunc);

POVMElement quadrature_element(const std::vector<QuadraturePoint>& points, const SamplingGrid& grid,
                               const TruncationConfig& trunc);
POVMElement coherent_element(const std::vector<CoherentPoint>& points, const SamplingGrid& grid,
                             const TruncationConfig& trunc);

// Element with the given flat index on the product grid.
POVMElement grid_element(const SamplingGrid& grid, std::size_t flat, const TruncationConfig& trunc);
std::vector<POVMElement> grid_elements(const SamplingGrid& grid, const std::vector<std::size_t>& flat,
                                       const TruncationConfig& trunc);
std::vector<POVMElement> all_grid_elements(const SamplingGrid& grid, const TruncationConfig& trunc);

// Rebuilds an element's vector from its coordinates (used after loading
// a POVM file whose matrices were not materialized).
POVMElement regenerate_element(const POVMElement& meta, const SamplingGrid& grid, const TruncationConfig& trunc);

struct CompletenessReport {
  double residual = 0.0;              // || I - sum w E ||_2
  double gap_min_eigenvalue = 0.0;    // lambda_min(I - sum w E)
  double max_eigenvalue_of_sum = 0.0; // lambda_max(sum w E)

  // sum w E <= (1 + 0.05) I
  bool dominated(double slack = 0.05) const { return gap_min_eigenvalue >= -slack; }
};

CompletenessReport completeness_report(const std::vector<POVMElement>& elements, const TruncationConfig& trunc);
double completeness_residual(const std::vector<POVMElement>& elements, const TruncationConfig& trunc);

// sum_i w_i |v_i><v_i|
CMatrix weighted_sum(const std::vector<POVMElement>& elements, int dim);

} // namespace cvtomo
