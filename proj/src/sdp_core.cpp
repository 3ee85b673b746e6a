#include "cvtomo/sdp_core.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "cvtomo/errors.hpp"

namespace cvtomo::sdp {

namespace {

// Re Tr(A B) for Hermitian A and B.
double herm_inner(const CMatrix& a, const CMatrix& b) { return (a.array() * b.transpose().array()).sum().real(); }

CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// Rows as the solver sees them: rank-one terms gathered into one matrix.
class RowOperator {
public:
  RowOperator(const Problem& p, const RVector& row_scale) : p_(p), scale_(row_scale) {
    const int m = static_cast<int>(p.rows.size());
    for (int k = 0; k < m; ++k) {
      const Row& r = p.rows[k];
      if (r.rank_one_index >= 0 && r.dense) throw ConfigError("sdp: a row may not mix rank-one and dense parts");
      if (r.rank_one_index >= 0) {
        rank_rows_.push_back(k);
        rank_weights_.push_back(r.rank_one_weight * scale_(k));
        rank_cols_.push_back(r.rank_one_index);
      } else if (r.dense) {
        dense_rows_.push_back(k);
      }
    }
    U_.resize(p.n, static_cast<Eigen::Index>(rank_rows_.size()));
    for (std::size_t r = 0; r < rank_rows_.size(); ++r) U_.col(r) = p.vectors.col(rank_cols_[r]);
    linear_cols_.resize(p.n_linear);
    for (int k = 0; k < m; ++k)
      for (const auto& [j, a] : p.rows[k].linear) linear_cols_.at(j).push_back({k, a * scale_(k)});
  }

  int rows() const { return static_cast<int>(p_.rows.size()); }

  // Re <A_k, G> for arbitrary (not necessarily Hermitian) G.
  RVector apply_matrix(const CMatrix& G) const {
    RVector out = RVector::Zero(rows());
    if (U_.cols() > 0) {
      const CMatrix GU = G * U_;
      for (Eigen::Index r = 0; r < U_.cols(); ++r)
        out(rank_rows_[r]) = rank_weights_[r] * U_.col(r).dot(GU.col(r)).real();
    }
    for (int k : dense_rows_) out(k) = scale_(k) * herm_inner(*p_.rows[k].dense, G);
    return out;
  }

  RVector apply_linear(const RVector& x) const {
    RVector out = RVector::Zero(rows());
    for (int j = 0; j < p_.n_linear; ++j)
      for (const auto& [k, a] : linear_cols_[j]) out(k) += a * x(j);
    return out;
  }

  CMatrix adjoint_matrix(const RVector& y) const {
    CMatrix out = CMatrix::Zero(p_.n, p_.n);
    if (U_.cols() > 0) {
      RVector coeff(U_.cols());
      for (Eigen::Index r = 0; r < U_.cols(); ++r) coeff(r) = rank_weights_[r] * y(rank_rows_[r]);
      out.noalias() += U_ * coeff.asDiagonal() * U_.adjoint();
    }
    for (int k : dense_rows_) out += (scale_(k) * y(k)) * *p_.rows[k].dense;
    return hermitize(out);
  }

  RVector adjoint_linear(const RVector& y) const {
    RVector out = RVector::Zero(p_.n_linear);
    for (int j = 0; j < p_.n_linear; ++j)
      for (const auto& [k, a] : linear_cols_[j]) out(j) += a * y(k);
    return out;
  }

  // HKM Schur complement  M_kl = Re Tr(A_k X A_l Z^{-1}) + sum_j a_kj a_lj x_j / z_j.
  RMatrix schur(const CMatrix& X, const CMatrix& Zinv, const RVector& x_over_z) const {
    const int m = rows();
    RMatrix M = RMatrix::Zero(m, m);
    const Eigen::Index R = U_.cols();
    if (R > 0) {
      const CMatrix P = U_.adjoint() * (X * U_);
      const CMatrix Q = U_.adjoint() * (Zinv * U_);
      for (Eigen::Index s = 0; s < R; ++s)
        for (Eigen::Index r = 0; r < R; ++r)
          M(rank_rows_[r], rank_rows_[s]) +=
              rank_weights_[r] * rank_weights_[s] * (P(r, s) * std::conj(Q(r, s))).real();
    }
    for (int d : dense_rows_) {
      const CMatrix T = X * (*p_.rows[d].dense) * Zinv;
      const double sd = scale_(d);
      if (R > 0) {
        const CMatrix TU = T * U_;
        for (Eigen::Index r = 0; r < R; ++r) {
          const double v = sd * rank_weights_[r] * U_.col(r).dot(TU.col(r)).real();
          M(rank_rows_[r], d) += v;
          M(d, rank_rows_[r]) += v;
        }
      }
      for (int e : dense_rows_) M(e, d) += sd * scale_(e) * (p_.rows[e].dense->array() * T.transpose().array()).sum().real();
    }
    for (int j = 0; j < p_.n_linear; ++j) {
      const auto& col = linear_cols_[j];
      for (const auto& [k1, a1] : col)
        for (const auto& [k2, a2] : col) M(k1, k2) += a1 * a2 * x_over_z(j);
    }
    return 0.5 * (M + M.transpose());
  }

private:
  const Problem& p_;
  RVector scale_;
  std::vector<int> rank_rows_;
  std::vector<double> rank_weights_;
  std::vector<int> rank_cols_;
  std::vector<int> dense_rows_;
  CMatrix U_;
  std::vector<std::vector<std::pair<int, double>>> linear_cols_;
};

// Largest alpha with M + alpha dM PSD, given the Cholesky factor of M.
double psd_step(const Eigen::LLT<CMatrix>& chol, const CMatrix& dM) {
  const CMatrix Linv_dM = chol.matrixL().solve(dM);
  const CMatrix S = chol.matrixL().solve(Linv_dM.adjoint()).adjoint();
  const double lmin = hermitian_eigenvalues(S)(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double linear_step(const RVector& v, const RVector& dv) {
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < v.size(); ++j)
    if (dv(j) < 0.0) alpha = std::min(alpha, -v(j) / dv(j));
  return alpha;
}

struct Direction {
  CMatrix dX, dZ;
  RVector dx, dz, dy;
};

} // namespace

RVector apply_rows(const Problem& problem, const CMatrix& X, const RVector& x) {
  RowOperator op(problem, RVector::Ones(static_cast<Eigen::Index>(problem.rows.size())));
  return op.apply_matrix(X) + op.apply_linear(x);
}

Solution solve_interior_point(const Problem& problem, const Options& options) {
  const int n = problem.n;
  const int nl = problem.n_linear;
  const int m = static_cast<int>(problem.rows.size());
  if (n < 1 || m < 1) throw ConfigError("sdp: empty problem");
  if (problem.cost_linear.size() != nl) throw DimensionError("sdp: linear cost has wrong size");

  // Row equilibration: every row gets unit norm; the solution is unaffected.
  RVector scale(m);
  RVector b(m);
  for (int k = 0; k < m; ++k) {
    const Row& r = problem.rows[k];
    double norm2 = 0.0;
    if (r.rank_one_index >= 0) {
      const double vn = problem.vectors.col(r.rank_one_index).squaredNorm();
      norm2 += std::pow(r.rank_one_weight * vn, 2);
    }
    if (r.dense) norm2 += r.dense->squaredNorm();
    for (const auto& [j, a] : r.linear) norm2 += a * a;
    scale(k) = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;
    b(k) = r.rhs * scale(k);
  }
  const RowOperator op(problem, scale);

  const CMatrix C = problem.cost_matrix.size() ? hermitize(problem.cost_matrix) : CMatrix::Zero(n, n);
  const RVector& c = problem.cost_linear;
  const double normC = std::sqrt(C.squaredNorm() + c.squaredNorm());
  const double normb = b.norm();

  double bmax = 0.0;
  for (int k = 0; k < m; ++k) bmax = std::max(bmax, (1.0 + std::abs(b(k))) / 2.0);
  const double xi = std::max({10.0, std::sqrt(static_cast<double>(n)), n * bmax});
  const double eta = std::max({10.0, std::sqrt(static_cast<double>(n)), normC});

  CMatrix X = xi * CMatrix::Identity(n, n);
  CMatrix Z = eta * CMatrix::Identity(n, n);
  RVector x = RVector::Constant(nl, xi);
  RVector z = RVector::Constant(nl, eta);
  RVector y = RVector::Zero(m);
  const double N = n + nl;

  Solution best;
  double best_merit = std::numeric_limits<double>::infinity();
  Solution sol;
  int stalled = 0;

  auto record = [&](int iter, double pinf, double dinf, double gap, double pobj, double dobj) {
    sol.X = X;
    sol.x = x;
    sol.Z = Z;
    sol.z = z;
    sol.y = y.cwiseProduct(scale);
    sol.iterations = iter;
    sol.primal_residual = pinf;
    sol.dual_residual = dinf;
    sol.gap = gap;
    sol.primal_objective = pobj;
    sol.dual_objective = dobj;
  };

  for (int iter = 0;; ++iter) {
    const RVector Rp = b - op.apply_matrix(X) - op.apply_linear(x);
    const CMatrix Rd = C - op.adjoint_matrix(y) - Z;
    const RVector rd = c - op.adjoint_linear(y) - z;
    const double pobj = herm_inner(C, X) + c.dot(x);
    const double dobj = b.dot(y);
    const double pinf = Rp.norm() / (1.0 + normb);
    const double dinf = std::sqrt(Rd.squaredNorm() + rd.squaredNorm()) / (1.0 + normC);
    const double mu = (herm_inner(X, Z) + x.dot(z)) / N;
    // Complementarity gap; pobj - dobj differs from it only by residual terms.
    const double gap = N * mu / (1.0 + std::abs(pobj) + std::abs(dobj));

    record(iter, pinf, dinf, gap, pobj, dobj);
    const double merit = std::max({pinf / options.tol_primal, dinf / options.tol_dual, gap / options.tol_gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = sol;
    }
    if (options.verbose)
      std::cerr << "ipm " << iter << " pobj " << pobj << " dobj " << dobj << " pinf " << pinf << " dinf " << dinf
                << " gap " << gap << " mu " << mu << "\n";

    if (pinf <= options.tol_primal && dinf <= options.tol_dual && gap <= options.tol_gap) {
      sol.status = Status::optimal;
      return sol;
    }
    // Farkas ray: b.y -> +inf while the dual stays (nearly) feasible.
    if (dobj > 0.0 && (std::sqrt(Rd.squaredNorm() + rd.squaredNorm()) + normC) / dobj < 1e-8) {
      sol.status = Status::infeasible;
      return sol;
    }
    if (iter >= options.max_iters || stalled >= 5) break;

    Eigen::LLT<CMatrix> cholZ(Z);
    Eigen::LLT<CMatrix> cholX(X);
    if (cholZ.info() != Eigen::Success || cholX.info() != Eigen::Success) break;
    const CMatrix Zinv = hermitize(cholZ.solve(CMatrix::Identity(n, n)));
    const RVector xz = x.cwiseQuotient(z);

    RMatrix M = op.schur(X, Zinv, xz);
    Eigen::LLT<RMatrix> cholM(M);
    double reg = 0.0;
    while (cholM.info() != Eigen::Success) {
      reg = reg == 0.0 ? 1e-14 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff()) : reg * 100.0;
      if (reg > 1e-2) break;
      cholM.compute(M + reg * RMatrix::Identity(m, m));
    }
    if (cholM.info() != Eigen::Success) break;

    const CMatrix XRdZinv = X * Rd * Zinv;
    auto direction = [&](const CMatrix& Rc, const RVector& rc) {
      Direction dir;
      const CMatrix G = Rc * Zinv - XRdZinv;
      const RVector lin = rc.cwiseQuotient(z) - xz.cwiseProduct(rd);
      const RVector rhs = Rp - op.apply_matrix(G) - op.apply_linear(lin);
      dir.dy = cholM.solve(rhs);
      // The formed Schur matrix loses digits as mu -> 0; refine against the
      // operator itself so the primal equations stay satisfied.
      for (int pass = 0;; ++pass) {
        dir.dZ = hermitize(Rd - op.adjoint_matrix(dir.dy));
        dir.dz = rd - op.adjoint_linear(dir.dy);
        dir.dX = hermitize((Rc - X * dir.dZ) * Zinv);
        dir.dx = (rc - x.cwiseProduct(dir.dz)).cwiseQuotient(z);
        if (pass == 2) break;
        const RVector err = Rp - op.apply_matrix(dir.dX) - op.apply_linear(dir.dx);
        if (err.norm() <= 1e-15 * (1.0 + Rp.norm())) break;
        dir.dy += cholM.solve(err);
      }
      return dir;
    };
    auto steps = [&](const Direction& d) {
      const double ap = std::min(psd_step(cholX, d.dX), linear_step(x, d.dx));
      const double ad = std::min(psd_step(cholZ, d.dZ), linear_step(z, d.dz));
      return std::pair{ap, ad};
    };

    // predictor
    const CMatrix XZ = X * Z;
    const Direction aff = direction(-XZ, -x.cwiseProduct(z));
    auto [ap_aff, ad_aff] = steps(aff);
    ap_aff = std::min(1.0, ap_aff);
    ad_aff = std::min(1.0, ad_aff);
    const double mu_aff = (herm_inner(X + ap_aff * aff.dX, Z + ad_aff * aff.dZ) +
                           (x + ap_aff * aff.dx).dot(z + ad_aff * aff.dz)) / N;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // corrector
    const CMatrix Rc = sigma * mu * CMatrix::Identity(n, n) - XZ - aff.dX * aff.dZ;
    const RVector rc = RVector::Constant(nl, sigma * mu) - x.cwiseProduct(z) - aff.dx.cwiseProduct(aff.dz);
    const Direction dir = direction(Rc, rc);
    auto [ap, ad] = steps(dir);
    const double gamma = 0.9 + 0.09 * std::min(ap_aff, ad_aff);
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    stalled = (ap < 1e-8 && ad < 1e-8) ? stalled + 1 : 0;

    X = hermitize(X + ap * dir.dX);
    x += ap * dir.dx;
    y += ad * dir.dy;
    Z = hermitize(Z + ad * dir.dZ);
    z += ad * dir.dz;
  }

  best.status = Status::max_iters;
  return best;
}

} // namespace cvtomo::sdp
