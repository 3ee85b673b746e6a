#include "cvtomo/sdp.hpp"

#include <chrono>
#include <cmath>
#include <unordered_map>

#include "cvtomo/errors.hpp"
#include "cvtomo/sdp_core.hpp"

namespace cvtomo {

double TomographyProblem::band(std::size_t i) const { return std::max(frequencies(static_cast<Eigen::Index>(i)), epsilon_floor); }

void TomographyProblem::validate() const {
  trunc.validate();
  if (elements.empty()) throw DegenerateDataError("tomography problem: no measurements");
  if (static_cast<Eigen::Index>(elements.size()) != frequencies.size())
    throw DimensionError("tomography problem: element and frequency counts differ");
  if (!(epsilon_floor > 0.0)) throw ConfigError("tomography problem: epsilon_floor must be positive");
  for (Eigen::Index i = 0; i < frequencies.size(); ++i)
    if (!(frequencies(i) >= 0.0) || !std::isfinite(frequencies(i)))
      throw DomainError("tomography problem: frequencies must be finite and non-negative");
  for (const auto& e : elements)
    if (e.vector.size() != dim()) throw DimensionError("tomography problem: element dimension mismatch");
}

std::string to_string(SolverAlgorithm a) { return a == SolverAlgorithm::interior_point ? "interior_point" : "admm"; }

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::max_iters: return "max_iters";
    case SolveStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

SolverAlgorithm solver_algorithm_from_string(const std::string& name) {
  if (name == "ip" || name == "interior_point") return SolverAlgorithm::interior_point;
  if (name == "admm") return SolverAlgorithm::admm;
  throw ConfigError("unknown solver algorithm '" + name + "'");
}

int SolverConfig::effective_max_iters() const {
  if (max_iters > 0) return max_iters;
  return algorithm == SolverAlgorithm::interior_point ? 200 : 50000;
}

void SolverConfig::validate() const {
  if (!(tol_primal > 0 && tol_dual > 0 && tol_gap > 0)) throw ConfigError("solver: tolerances must be positive");
  if (max_iters < 0) throw ConfigError("solver: max_iters must be >= 0");
}

TomographyProblem assemble(const std::vector<POVMElement>& elements, const std::vector<MeasurementRecord>& records,
                           double epsilon_floor) {
  if (records.empty()) throw DegenerateDataError("assemble: no measurement records");
  if (elements.empty()) throw DegenerateDataError("assemble: no POVM elements");
  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < elements.size(); ++i) by_id.emplace(elements[i].id, i);

  TomographyProblem p;
  p.epsilon_floor = epsilon_floor;
  p.frequencies.resize(static_cast<Eigen::Index>(records.size()));
  for (std::size_t r = 0; r < records.size(); ++r) {
    auto it = by_id.find(records[r].element_id);
    if (it == by_id.end()) throw ConfigError("assemble: record refers to unknown element '" + records[r].element_id + "'");
    p.elements.push_back(elements[it->second]);
    p.frequencies(static_cast<Eigen::Index>(r)) = records[r].frequency;
  }
  // Every element carries the full product vector, so the dimension fixes the truncation
  // only together with the mode count of its coordinates.
  const auto& e0 = p.elements.front();
  const int modes = static_cast<int>(e0.kind == PovmKind::quadrature ? e0.quadrature_coords.size() : e0.coherent_coords.size());
  const double per_mode = std::round(std::pow(static_cast<double>(e0.vector.size()), 1.0 / std::max(modes, 1)));
  p.trunc = TruncationConfig{static_cast<int>(per_mode) - 1, std::max(modes, 1)};
  if (p.trunc.total_dim() != e0.vector.size()) throw DimensionError("assemble: element size is not a power of the mode count");
  p.validate();
  return p;
}

ObjectiveParts evaluate_objective(const TomographyProblem& problem, const CMatrix& rho) {
  ObjectiveParts parts;
  parts.deltas.resize(static_cast<Eigen::Index>(problem.size()));
  double measured = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const double e = problem.elements[i].weighted_expectation(rho);
    measured += e;
    parts.deltas(static_cast<Eigen::Index>(i)) = std::abs(e - problem.frequencies(static_cast<Eigen::Index>(i))) / problem.band(i);
  }
  parts.delta_maxent = std::max(0.0, rho.trace().real() - measured);
  return parts;
}

namespace detail {

ReconstructionResult finalize(const TomographyProblem& problem, const SolverConfig& config, const CMatrix& raw_rho) {
  const CMatrix h = 0.5 * (raw_rho + raw_rho.adjoint());
  const double raw_min = hermitian_eigenvalues(h)(0);
  DensityMatrix rho = DensityMatrix::nearest_state(problem.trunc, h);
  const ObjectiveParts parts = evaluate_objective(problem, rho.entries());
  ReconstructionResult r{.rho = rho};
  r.raw_min_eigenvalue = raw_min;
  r.projection_distance = (rho.entries() - raw_rho).norm();
  r.deltas = parts.deltas;
  r.delta_maxent = config.maxent ? parts.delta_maxent : 0.0;
  r.objective = parts.total(config.maxent);
  return r;
}

ReconstructionResult solve_ipm(const TomographyProblem& problem, const SolverConfig& config) {
  const int n = problem.dim();
  const int K = static_cast<int>(problem.size());
  sdp::Problem sp;
  sp.n = n;
  sp.n_linear = 2 * K + (config.maxent ? 2 : 0);
  sp.vectors.resize(n, K);
  sp.cost_linear = RVector::Ones(sp.n_linear);
  // |Tr(E rho) - f| <= Delta * band is written with the split
  //   Tr(E rho)/band - u + l = f/band,  Delta = u + l,  u, l >= 0.
  for (int i = 0; i < K; ++i) {
    const auto& e = problem.elements[i];
    sp.vectors.col(i) = e.vector;
    const double band = problem.band(i);
    sdp::Row row;
    row.rank_one_index = i;
    row.rank_one_weight = e.weight / band;
    row.linear = {{2 * i, -1.0}, {2 * i + 1, 1.0}};
    row.rhs = problem.frequencies(i) / band;
    sp.rows.push_back(std::move(row));
  }
  if (config.maxent) {
    // Tr((I - sum E) rho) - delta_plus + delta_minus = 0, only delta_plus is charged.
    CMatrix gap_op = CMatrix::Identity(n, n) - weighted_sum(problem.elements, n);
    sdp::Row row;
    row.dense = 0.5 * (gap_op + gap_op.adjoint());
    row.linear = {{2 * K, -1.0}, {2 * K + 1, 1.0}};
    row.rhs = 0.0;
    sp.rows.push_back(std::move(row));
    sp.cost_linear(2 * K + 1) = 0.0;
  }
  {
    sdp::Row trace_row;
    trace_row.dense = CMatrix::Identity(n, n);
    trace_row.rhs = 1.0;
    sp.rows.push_back(std::move(trace_row));
  }

  sdp::Options opts;
  opts.tol_primal = config.tol_primal;
  opts.tol_dual = config.tol_dual;
  opts.tol_gap = config.tol_gap;
  opts.max_iters = config.effective_max_iters();
  opts.verbose = config.verbose;
  const sdp::Solution sol = sdp::solve_interior_point(sp, opts);

  ReconstructionResult r = finalize(problem, config, sol.X);
  r.status = sol.status == sdp::Status::optimal     ? SolveStatus::optimal
             : sol.status == sdp::Status::infeasible ? SolveStatus::infeasible
                                                     : SolveStatus::max_iters;
  r.iterations = sol.iterations;
  r.primal_residual = sol.primal_residual;
  r.dual_residual = sol.dual_residual;
  r.gap = sol.gap;
  return r;
}

} // namespace detail

ReconstructionResult solve(const TomographyProblem& problem, const SolverConfig& config) {
  problem.validate();
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ReconstructionResult r = config.algorithm == SolverAlgorithm::interior_point ? detail::solve_ipm(problem, config)
                                                                                 : detail::solve_admm(problem, config);
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ReconstructionResult solve_biased(const TomographyProblem& problem, SolverConfig config) {
  config.maxent = false;
  return solve(problem, config);
}

} // namespace cvtomo
