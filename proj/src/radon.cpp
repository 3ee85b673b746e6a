#include "cvtomo/radon.hpp"

#include <cmath>

#include "cvtomo/errors.hpp"
#include "cvtomo/povm.hpp"

namespace cvtomo {

namespace {

void require_uniform(const std::vector<double>& axis, const char* what) {
  if (axis.size() < 2) throw DomainError(std::string(what) + " needs at least two samples");
  const double h = axis[1] - axis[0];
  if (!(h > 0.0)) throw DomainError(std::string(what) + " must be increasing");
  for (std::size_t i = 2; i < axis.size(); ++i)
    if (std::abs(axis[i] - axis[i - 1] - h) > 1e-9 * std::max(1.0, h)) throw DomainError(std::string(what) + " is not uniform");
}

std::vector<double> trapezoid_weights(const std::vector<double>& axis) {
  const double h = axis[1] - axis[0];
  std::vector<double> w(axis.size(), h);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

// Angles covering [0, pi) without the closing endpoint are periodic samples;
// the trapezoid rule then gives every angle the full step.
std::vector<double> angle_weights(const std::vector<double>& theta) {
  const double h = theta[1] - theta[0];
  const double span = theta.back() - theta.front();
  if (std::abs(span + h - kPi) < 1e-9) return std::vector<double>(theta.size(), h);
  return trapezoid_weights(theta);
}

} // namespace

void Sinogram::validate() const {
  require_uniform(q_axis, "sinogram q axis");
  if (theta_axis.empty()) throw DomainError("sinogram: empty theta axis");
  if (theta_axis.size() >= 2) require_uniform(theta_axis, "sinogram theta axis");
  if (values.rows() != static_cast<Eigen::Index>(q_axis.size()) || values.cols() != static_cast<Eigen::Index>(theta_axis.size()))
    throw DimensionError("sinogram: values do not match the axes");
  if (!values.allFinite()) throw DomainError("sinogram: non-finite values");
}

void KernelConfig::validate() const {
  if (!(cutoff_kc > 0.0) || !std::isfinite(cutoff_kc)) throw ConfigError("kernel: cutoff_kc must be positive and finite");
}

Sinogram sinogram(const DensityMatrix& rho, const std::vector<double>& q_axis, const std::vector<double>& theta_axis) {
  if (rho.trunc().modes != 1) throw UnsupportedError("sinogram: the inverse Radon baseline is single-mode only");
  Sinogram s{q_axis, theta_axis, RMatrix(q_axis.size(), theta_axis.size())};
  for (std::size_t i = 0; i < q_axis.size(); ++i)
    for (std::size_t j = 0; j < theta_axis.size(); ++j) {
      const CVector v = quadrature_vector({q_axis[i], theta_axis[j]}, rho.trunc());
      s.values(i, j) = v.dot(rho.entries() * v).real();
    }
  return s;
}

double irt_kernel(double x, const KernelConfig& cfg) {
  const double k = cfg.cutoff_kc;
  const double kx = k * x;
  // Near 0 the closed form cancels badly; the series k^2 (1/2 - (kx)^2/8 + (kx)^4/144) is exact there.
  if (std::abs(kx) < 1e-3) {
    const double t = kx * kx;
    return k * k * (0.5 - t / 8.0 + t * t / 144.0);
  }
  return (std::cos(kx) - 1.0) / (x * x) + k * std::sin(kx) / x;
}

PhaseSpaceGrid inverse_radon(const Sinogram& sino, const KernelConfig& cfg, const std::vector<double>& q_axis,
                             const std::vector<double>& p_axis) {
  sino.validate();
  cfg.validate();
  if (sino.theta_axis.size() < 2) throw DomainError("inverse_radon: need at least two angles");
  require_uniform(q_axis, "output q axis");
  require_uniform(p_axis, "output p axis");

  const std::vector<double> wx = trapezoid_weights(sino.q_axis);
  const std::vector<double> wt = angle_weights(sino.theta_axis);
  PhaseSpaceGrid g{q_axis, p_axis, RMatrix::Zero(q_axis.size(), p_axis.size()), std::nullopt, {}};
  const double norm = 1.0 / (2.0 * kPi * kPi);
  for (std::size_t i = 0; i < q_axis.size(); ++i)
    for (std::size_t j = 0; j < p_axis.size(); ++j) {
      double acc = 0.0;
      for (std::size_t b = 0; b < sino.theta_axis.size(); ++b) {
        const double proj = q_axis[i] * std::cos(sino.theta_axis[b]) + p_axis[j] * std::sin(sino.theta_axis[b]);
        double inner = 0.0;
        for (std::size_t a = 0; a < sino.q_axis.size(); ++a)
          inner += sino.values(a, b) * irt_kernel(proj - sino.q_axis[a], cfg) * wx[a];
        acc += inner * wt[b];
      }
      g.values(i, j) = norm * acc;
    }
  return g;
}

CMatrix density_from_wigner(const PhaseSpaceGrid& w, const TruncationConfig& trunc) {
  trunc.validate();
  if (trunc.modes != 1) throw UnsupportedError("density_from_wigner: single-mode only");
  w.validate();
  const double dq = w.q_step(), dp = w.p_step();
  if (dq > 0.2 + 1e-12 || dp > 0.2 + 1e-12)
    throw AccuracyError("density_from_wigner: grid spacing above 0.2 is too coarse");
  const double tol = 1e-9;
  if (w.q_axis.front() > -5.0 + tol || w.q_axis.back() < 5.0 - tol || w.p_axis.front() > -5.0 + tol ||
      w.p_axis.back() < 5.0 - tol)
    throw AccuracyError("density_from_wigner: grid must cover |q|, |p| <= 5");

  const int d = trunc.dim();
  CMatrix rho = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < w.q_axis.size(); ++i)
    for (std::size_t j = 0; j < w.p_axis.size(); ++j)
      rho += w.values(i, j) * wigner_kernel_matrix(d, w.q_axis[i], w.p_axis[j]).transpose();
  rho *= 2.0 * kPi * dq * dp;
  return 0.5 * (rho + rho.adjoint());
}

} // namespace cvtomo
