// Linearized ADMM for the tomography program in its reduced form
//
//   min_{rho in S}  sum_i c_i |a_i(rho) - f_i| + c_m max(0, a_m(rho)),
//
// S = {rho >= 0, Tr rho = 1}. The rho-step is a gradient step followed by
// projection onto S (eigenvalue clipping onto the simplex); the slack step is
// a closed-form prox. Rows are scaled to unit norm.
#include <algorithm>
#include <cmath>
#include <iostream>

#include "cvtomo/errors.hpp"
#include "cvtomo/sdp.hpp"

namespace cvtomo::detail {

namespace {

struct ScaledRows {
  CMatrix U;          // element vectors
  RVector row_weight; // s_i w_i
  RVector target;     // s_i f_i
  RVector cost;       // 1 / (s_i band_i)
  bool maxent = false;
  CMatrix gap_op;     // s_m (I - sum E)
  double gap_cost = 0.0;

  Eigen::Index size() const { return row_weight.size() + (maxent ? 1 : 0); }

  RVector apply(const CMatrix& rho) const {
    RVector out(size());
    const CMatrix RU = rho * U;
    for (Eigen::Index i = 0; i < row_weight.size(); ++i) out(i) = row_weight(i) * U.col(i).dot(RU.col(i)).real();
    if (maxent) out(row_weight.size()) = (gap_op.array() * rho.transpose().array()).sum().real();
    return out;
  }

  CMatrix adjoint(const RVector& y) const {
    const Eigen::Index K = row_weight.size();
    CMatrix out = U * y.head(K).cwiseProduct(row_weight).asDiagonal() * U.adjoint();
    if (maxent) out += y(K) * gap_op;
    return 0.5 * (out + out.adjoint());
  }
};

CMatrix project_spectraplex(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const RVector lambda = project_to_simplex(es.eigenvalues(), 1.0);
  CMatrix out = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
  return 0.5 * (out + out.adjoint());
}

double soft_threshold(double x, double center, double k) {
  const double d = x - center;
  if (d > k) return x - k;
  if (d < -k) return x + k;
  return center;
}

} // namespace

ReconstructionResult solve_admm(const TomographyProblem& problem, const SolverConfig& config) {
  const int n = problem.dim();
  const Eigen::Index K = static_cast<Eigen::Index>(problem.size());

  ScaledRows rows;
  rows.U.resize(n, K);
  rows.row_weight.resize(K);
  rows.target.resize(K);
  rows.cost.resize(K);
  for (Eigen::Index i = 0; i < K; ++i) {
    const auto& e = problem.elements[i];
    rows.U.col(i) = e.vector;
    const double norm = e.weight * e.vector.squaredNorm();
    const double s = norm > 0.0 ? 1.0 / norm : 1.0;
    rows.row_weight(i) = s * e.weight;
    rows.target(i) = s * problem.frequencies(i);
    rows.cost(i) = 1.0 / (s * problem.band(static_cast<std::size_t>(i)));
  }
  rows.maxent = config.maxent;
  if (config.maxent) {
    CMatrix gap = CMatrix::Identity(n, n) - weighted_sum(problem.elements, n);
    const double norm = gap.norm();
    const double s = norm > 0.0 ? 1.0 / norm : 1.0;
    rows.gap_op = s * gap;
    rows.gap_cost = 1.0 / s;
  }
  const Eigen::Index m = rows.size();

  // ||A||^2 by power iteration on A*A.
  double lip = 1.0;
  {
    CMatrix v = CMatrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
    v(0, std::min(1, n - 1)) += 0.1;
    v = 0.5 * (v + v.adjoint());
    for (int it = 0; it < 50; ++it) {
      const CMatrix w = rows.adjoint(rows.apply(v));
      lip = w.norm() / v.norm();
      v = w / w.norm();
    }
    lip *= 1.05;
  }

  auto prox = [&](const RVector& x, double beta) {
    RVector t(m);
    for (Eigen::Index i = 0; i < K; ++i) t(i) = soft_threshold(x(i), rows.target(i), rows.cost(i) / beta);
    if (rows.maxent) {
      const double k = rows.gap_cost / beta;
      const double v = x(K);
      t(K) = v > k ? v - k : (v >= 0.0 ? 0.0 : v);
    }
    return t;
  };

  CMatrix rho = CMatrix::Identity(n, n) / static_cast<double>(n);
  RVector t = rows.apply(rho);
  RVector u = RVector::Zero(m);
  double beta = 1.0;
  const int max_iters = config.effective_max_iters();

  double pres = 0, dres = 0, gap = 0;
  int iter = 0;
  SolveStatus status = SolveStatus::max_iters;
  for (iter = 1; iter <= max_iters; ++iter) {
    rho = project_spectraplex(rho - rows.adjoint(rows.apply(rho) - t + u) / lip);
    const RVector a_rho = rows.apply(rho);
    const RVector t_prev = t;
    t = prox(a_rho + u, beta);
    u += a_rho - t;

    if (iter % 10 != 0 && iter != max_iters) continue;
    const RVector y = beta * u;
    pres = (a_rho - t).norm() / (1.0 + t.norm());
    const CMatrix aty = rows.adjoint(y);
    dres = beta * rows.adjoint(t - t_prev).norm() / (1.0 + aty.norm());

    // Dual bound: lambda_min(A* y) - g*(y) with y clipped into dom g*.
    RVector yc = y;
    double conj = 0.0;
    for (Eigen::Index i = 0; i < K; ++i) {
      yc(i) = std::clamp(y(i), -rows.cost(i), rows.cost(i));
      conj += yc(i) * rows.target(i);
    }
    if (rows.maxent) yc(K) = std::clamp(y(K), 0.0, rows.gap_cost);
    const double dual = hermitian_eigenvalues(rows.adjoint(yc))(0) - conj;
    const double primal = evaluate_objective(problem, rho).total(config.maxent);
    gap = std::abs(primal - dual) / (1.0 + std::abs(primal) + std::abs(dual));
    if (config.verbose && iter % 500 == 0)
      std::cerr << "admm " << iter << " primal " << primal << " dual " << dual << " pres " << pres << " dres " << dres
                << " beta " << beta << "\n";
    if (pres <= config.tol_primal && dres <= config.tol_dual && gap <= config.tol_gap) {
      status = SolveStatus::optimal;
      break;
    }
    // Residual balancing.
    if (iter % 50 == 0) {
      if (pres > 10.0 * dres) {
        beta *= 2.0;
        u /= 2.0;
      } else if (dres > 10.0 * pres) {
        beta /= 2.0;
        u *= 2.0;
      }
    }
  }

  ReconstructionResult r = finalize(problem, config, rho);
  r.status = status;
  r.iterations = std::min(iter, max_iters);
  r.primal_residual = pres;
  r.dual_residual = dres;
  r.gap = gap;
  return r;
}

} // namespace cvtomo::detail
