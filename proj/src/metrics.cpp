#include "cvtomo/metrics.hpp"

#include <cmath>

#include "cvtomo/errors.hpp"

namespace cvtomo {

namespace {

constexpr double kPureTol = 1e-10;
constexpr double kPsdTol = 1e-8;

// Returns the dominant eigenvector when the state is rank one.
bool pure_vector(const CMatrix& m, CVector& out) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  const Eigen::Index last = m.rows() - 1;
  if (es.eigenvalues()(last) < 1.0 - kPureTol) return false;
  out = es.eigenvectors().col(last);
  return true;
}

CMatrix psd_sqrt(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()));
  if (es.eigenvalues()(0) < -kPsdTol) throw DomainError("fidelity: argument is not positive semidefinite");
  const RVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace

CMatrix partial_transpose_first(const CMatrix& rho, int d) {
  if (rho.rows() != d * d || rho.cols() != d * d) throw DimensionError("partial_transpose_first: expected a two-mode operator");
  CMatrix out(rho.rows(), rho.cols());
  for (int i1 = 0; i1 < d; ++i1)
    for (int i2 = 0; i2 < d; ++i2)
      for (int j1 = 0; j1 < d; ++j1)
        for (int j2 = 0; j2 < d; ++j2) out(i1 * d + i2, j1 * d + j2) = rho(j1 * d + i2, i1 * d + j2);
  return out;
}

double negativity(const DensityMatrix& rho) {
  if (rho.trunc().modes != 2) throw UnsupportedError("negativity: only two-mode states have a defined bipartition");
  const CMatrix pt = partial_transpose_first(rho.entries(), rho.trunc().dim());
  return std::max(0.0, 0.5 * (trace_norm(pt) - 1.0));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("fidelity: dimension mismatch");
  if (rho.min_eigenvalue() < -kPsdTol || sigma.min_eigenvalue() < -kPsdTol)
    throw DomainError("fidelity: argument is not positive semidefinite");
  CVector psi;
  if (pure_vector(sigma.entries(), psi)) return psi.dot(rho.entries() * psi).real();
  if (pure_vector(rho.entries(), psi)) return psi.dot(sigma.entries() * psi).real();
  const CMatrix root = psd_sqrt(rho.entries());
  const CMatrix inner = root * sigma.entries() * root;
  const RVector ev = hermitian_eigenvalues(inner).cwiseMax(0.0);
  const double t = ev.cwiseSqrt().sum();
  return t * t;
}

double trace_distance(const CMatrix& a, const CMatrix& b) { return 0.5 * trace_norm(a - b); }

double shannon_entropy_probe(const DensityMatrix& rho, const std::vector<POVMElement>& probes) {
  if (probes.empty()) throw DomainError("shannon_entropy_probe: no probes");
  std::vector<double> p;
  p.reserve(probes.size());
  double total = 0.0;
  for (const auto& e : probes) {
    if (e.vector.size() != rho.dim()) throw DimensionError("shannon_entropy_probe: probe dimension mismatch");
    const double v = std::max(0.0, e.weighted_expectation(rho.entries()));
    p.push_back(v);
    total += v;
  }
  if (!(total > 0.0)) throw DegenerateDataError("shannon_entropy_probe: all probe expectations vanish");
  double s = 0.0;
  for (double v : p) {
    const double pi = v / total;
    if (pi > 0.0) s -= pi * std::log10(pi);
  }
  return s;
}

} // namespace cvtomo
