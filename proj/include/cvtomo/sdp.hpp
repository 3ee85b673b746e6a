#pragma once

#include <string>
#include <vector>

#include "cvtomo/fock.hpp"
#include "cvtomo/measure.hpp"
#include "cvtomo/povm.hpp"

namespace cvtomo {

/// Measured elements with their observed frequencies, ready for the
/// max-entropy tomography program
///
///   min  sum_i Delta_i + delta
///   s.t. |w_i <v_i|rho|v_i> - f_i| <= Delta_i max(f_i, epsilon_floor)
///        Tr((I - sum_i w_i |v_i><v_i|) rho) <= delta
///        Delta_i, delta >= 0,  Tr rho = 1,  rho >= 0.
struct TomographyProblem {
  TruncationConfig trunc;
  std::vector<POVMElement> elements;
  RVector frequencies;
  double epsilon_floor = 1e-6;

  int dim() const { return trunc.total_dim(); }
  std::size_t size() const { return elements.size(); }
  double band(std::size_t i) const;
  void validate() const;
};

enum class SolverAlgorithm { interior_point, admm };
enum class SolveStatus { optimal, max_iters, infeasible };

std::string to_string(SolverAlgorithm a);
std::string to_string(SolveStatus s);
SolverAlgorithm solver_algorithm_from_string(const std::string& name);

struct SolverConfig {
  SolverAlgorithm algorithm = SolverAlgorithm::interior_point;
  double tol_primal = 1e-7;
  double tol_dual = 1e-7;
  double tol_gap = 1e-7;
  int max_iters = 0;  // 0: 200 for interior_point, 50000 for admm
  bool maxent = true;
  bool verbose = false;

  int effective_max_iters() const;
  void validate() const;
};

struct ReconstructionResult {
  DensityMatrix rho;
  RVector deltas;
  double delta_maxent = 0.0;
  double objective = 0.0;
  SolveStatus status = SolveStatus::max_iters;
  int iterations = 0;
  double runtime_seconds = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  // Frobenius distance moved by the final Hermitian/PSD/unit-trace projection,
  // and the solver iterate's smallest eigenvalue before it.
  double projection_distance = 0.0;
  double raw_min_eigenvalue = 0.0;
};

// Pairs records with elements by id. Throws DegenerateDataError for empty
// input and ConfigError for unknown ids.
TomographyProblem assemble(const std::vector<POVMElement>& elements, const std::vector<MeasurementRecord>& records,
                           double epsilon_floor = 1e-6);

ReconstructionResult solve(const TomographyProblem& problem, const SolverConfig& config);
// Same program with the max-entropy line and delta removed.
ReconstructionResult solve_biased(const TomographyProblem& problem, SolverConfig config);

struct ObjectiveParts {
  RVector deltas;           // |Tr(E_i rho) - f_i| / band_i
  double delta_maxent = 0;  // max(0, Tr((I - sum E) rho))
  double total(bool maxent) const { return deltas.sum() + (maxent ? delta_maxent : 0.0); }
};

// Smallest slacks compatible with a given rho.
ObjectiveParts evaluate_objective(const TomographyProblem& problem, const CMatrix& rho);

namespace detail {
ReconstructionResult solve_admm(const TomographyProblem& problem, const SolverConfig& config);
ReconstructionResult solve_ipm(const TomographyProblem& problem, const SolverConfig& config);
ReconstructionResult finalize(const TomographyProblem& problem, const SolverConfig& config, const CMatrix& raw_rho);
} // namespace detail

} // namespace cvtomo
