#include "cvtomo/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "cvtomo/errors.hpp"

namespace cvtomo {

namespace {

GaussHermiteRule compute_gauss_hermite(int order) {
  // Golub-Welsch on the symmetric Jacobi matrix of the physicists' Hermite family.
  RMatrix jacobi = RMatrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double off = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = off;
    jacobi(k - 1, k) = off;
  }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(jacobi);
  GaussHermiteRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  rule.log_plain_weights.resize(order);
  const double mu0 = std::sqrt(kPi);
  for (int k = 0; k < order; ++k) {
    const double x = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    rule.nodes[k] = x;
    rule.weights[k] = mu0 * v0 * v0;
  }
  // Refine the weights from the normalized-Hermite Christoffel formula, which
  // keeps full relative accuracy in the tails:
  //   w_k = 1 / sum_j h_j(x_k)^2 with h_j orthonormal w.r.t. e^{-x^2}.
  for (int k = 0; k < order; ++k) {
    const double x = rule.nodes[k];
    // Work with h_j(x) e^{-x^2/2} (the oscillator functions) to avoid overflow.
    double prev = 0.0;
    double cur = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
    double sum = cur * cur;
    for (int j = 0; j + 1 < order; ++j) {
      const double next = std::sqrt(2.0 / (j + 1)) * x * cur - std::sqrt(static_cast<double>(j) / (j + 1)) * prev;
      prev = cur;
      cur = next;
      sum += cur * cur;
    }
    // sum = e^{-x^2} sum_j h_j^2  =>  w = e^{-x^2} / sum
    rule.log_plain_weights[k] = -std::log(sum);
    rule.weights[k] = std::exp(-x * x - std::log(sum));
  }
  return rule;
}

} // namespace

GaussHermiteRule gauss_hermite(int order) {
  if (order < 1) throw DomainError("gauss_hermite: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_hermite(order)).first;
  return it->second;
}

double hermitian_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

RVector hermitian_eigenvalues(const CMatrix& m) {
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double trace_norm(const CMatrix& m) { return hermitian_eigenvalues(m).cwiseAbs().sum(); }

double spectral_norm_hermitian(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return hermitian_eigenvalues(m).cwiseAbs().maxCoeff();
}

RVector project_to_simplex(const RVector& v, double total) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - total) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  return (v.array() - shift).max(0.0).matrix();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

} // namespace cvtomo
