#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "cvtomo/linalg.hpp"

namespace cvtomo::sdp {

/// One equality row  <A_k, X> + a_k . x = b_k  of a standard-form program
///
///   min  <C, X> + c . x   s.t. rows,  X Hermitian PSD (n x n),  x >= 0.
///
/// The matrix part is the sum of an optional rank-one term
/// `rank_one_weight * V.col(rank_one_index) V.col(rank_one_index)^dagger`
/// and an optional dense Hermitian matrix.
struct Row {
  int rank_one_index = -1;
  double rank_one_weight = 0.0;
  std::optional<CMatrix> dense;
  std::vector<std::pair<int, double>> linear;
  double rhs = 0.0;
};

struct Problem {
  int n = 0;                // Hermitian block size
  int n_linear = 0;         // nonnegative scalar variables
  CMatrix vectors;          // n x K, referenced by Row::rank_one_index
  std::vector<Row> rows;
  CMatrix cost_matrix;      // C; empty means zero
  RVector cost_linear;      // c, size n_linear
};

struct Options {
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  double tol_gap = 1e-7;
  int max_iters = 200;
  bool verbose = false;
};

enum class Status { optimal, max_iters, infeasible };

struct Solution {
  CMatrix X;
  RVector x;
  RVector y;
  CMatrix Z;
  RVector z;
  Status status = Status::max_iters;
  int iterations = 0;
  double primal_residual = 0.0;  // ||b - A(X) - a x|| / (1 + ||b||)
  double dual_residual = 0.0;
  double gap = 0.0;              // (<X,Z> + x.z) / (1 + |pobj| + |dobj|)
  double primal_objective = 0.0;
  double dual_objective = 0.0;
};

// Primal-dual path-following with the HKM search direction and Mehrotra
// predictor-corrector steps, started from an infeasible interior point.
Solution solve_interior_point(const Problem& problem, const Options& options);

// <A_k, X> + a_k . x for every row (no scaling).
RVector apply_rows(const Problem& problem, const CMatrix& X, const RVector& x);

} // namespace cvtomo::sdp
