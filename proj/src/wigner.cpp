#include "cvtomo/wigner.hpp"

#include <cmath>

#include "cvtomo/errors.hpp"

namespace cvtomo {

namespace {

double axis_step(const std::vector<double>& axis) { return axis.size() >= 2 ? axis[1] - axis[0] : 0.0; }

void check_uniform(const std::vector<double>& axis, const char* name) {
  if (axis.size() < 2) throw DomainError(std::string("phase-space grid: ") + name + " needs at least two samples");
  const double h = axis[1] - axis[0];
  if (!(h > 0.0)) throw DomainError(std::string("phase-space grid: ") + name + " must be increasing");
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (std::abs(axis[i] - axis[i - 1] - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw DomainError(std::string("phase-space grid: ") + name + " is not uniform");
}

// Reduces a two-mode operator against a kernel matrix on one mode, leaving an
// operator on the other mode.
CMatrix contract_mode(const CMatrix& rho, int d, const CMatrix& kernel, int contracted_mode) {
  CMatrix out = CMatrix::Zero(d, d);
  for (int a1 = 0; a1 < d; ++a1)
    for (int a2 = 0; a2 < d; ++a2)
      for (int b1 = 0; b1 < d; ++b1)
        for (int b2 = 0; b2 < d; ++b2) {
          const cplx v = rho(a1 * d + a2, b1 * d + b2);
          if (contracted_mode == 2)
            out(a1, b1) += v * kernel(a2, b2);
          else
            out(a2, b2) += v * kernel(a1, b1);
        }
  return out;
}

double pair_sum(const CMatrix& op, const CMatrix& kernel) { return (op.array() * kernel.array()).sum().real(); }

} // namespace

double PhaseSpaceGrid::q_step() const { return axis_step(q_axis); }
double PhaseSpaceGrid::p_step() const { return axis_step(p_axis); }

void PhaseSpaceGrid::validate() const {
  check_uniform(q_axis, "q axis");
  check_uniform(p_axis, "p axis");
  if (values.rows() != static_cast<Eigen::Index>(q_axis.size()) || values.cols() != static_cast<Eigen::Index>(p_axis.size()))
    throw DimensionError("phase-space grid: values do not match the axes");
  if (!values.allFinite()) throw DomainError("phase-space grid: non-finite values");
}

double PhaseSpaceGrid::integral() const { return values.sum() * q_step() * p_step(); }

bool PhaseSpaceGrid::within_bound(double scale, double tol) const {
  return values.cwiseAbs().maxCoeff() <= scale / kPi + tol;
}

std::vector<double> uniform_axis(double min, double step, double max) {
  if (!(step > 0.0) || !(max >= min) || !std::isfinite(min) || !std::isfinite(max))
    throw DomainError("uniform_axis: need step > 0 and max >= min");
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-3)) + 1;
  std::vector<double> axis(count);
  for (std::size_t i = 0; i < count; ++i) axis[i] = min + step * static_cast<double>(i);
  return axis;
}

CMatrix wigner_kernel_matrix(int dim, double q, double p) {
  if (dim < 1) throw DomainError("wigner_kernel_matrix: dim must be positive");
  const double r2 = q * q + p * p;
  const double x = 2.0 * r2;
  const double gauss = std::exp(-r2) / kPi;
  const cplx w(std::sqrt(2.0) * q, -std::sqrt(2.0) * p);
  CMatrix out(dim, dim);
  cplx wk(1.0, 0.0);  // w^k
  for (int k = 0; k < dim; ++k) {
    // L_n^{(k)}(x) by the three-term recurrence, sqrt(n!/(n+k)!) by a running product.
    double l_prev = 0.0;
    double l = 1.0;
    double ratio = 1.0;
    for (int j = 1; j <= k; ++j) ratio /= std::sqrt(static_cast<double>(j));
    for (int n = 0; n + k < dim; ++n) {
      if (n > 0) {
        const double l_next = ((2.0 * (n - 1) + 1.0 + k - x) * l - (n - 1 + k) * l_prev) / n;
        l_prev = l;
        l = l_next;
        ratio *= std::sqrt(static_cast<double>(n) / static_cast<double>(n + k));
      }
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      const cplx value = sign * gauss * ratio * l * wk;
      out(n + k, n) = value;
      out(n, n + k) = std::conj(value);
    }
    wk *= w;
  }
  return out;
}

cplx wigner_kernel(int m, int n, double q, double p) {
  if (m < 0 || n < 0) throw DomainError("wigner_kernel: negative Fock index");
  return wigner_kernel_matrix(std::max(m, n) + 1, q, p)(m, n);
}

PhaseSpaceGrid wigner_grid(const DensityMatrix& rho, const std::vector<double>& q_axis, const std::vector<double>& p_axis) {
  if (rho.trunc().modes != 1) throw UnsupportedError("wigner_grid: single-mode states only");
  PhaseSpaceGrid g{q_axis, p_axis, RMatrix(q_axis.size(), p_axis.size()), std::nullopt, {}};
  check_uniform(q_axis, "q axis");
  check_uniform(p_axis, "p axis");
  const CMatrix h = 0.5 * (rho.entries() + rho.entries().adjoint());
  const int d = rho.dim();
  for (std::size_t i = 0; i < q_axis.size(); ++i)
    for (std::size_t j = 0; j < p_axis.size(); ++j) {
      const cplx w = (h.array() * wigner_kernel_matrix(d, q_axis[i], p_axis[j]).array()).sum();
      if (std::abs(w.imag()) > 1e-10) throw DomainError("wigner_grid: imaginary residue above 1e-10");
      g.values(i, j) = w.real();
    }
  return g;
}

PhaseSpaceGrid wigner_two_mode_slice(const DensityMatrix& rho, const ModeSlice& slice, const std::vector<double>& q_axis,
                                     const std::vector<double>& p_axis) {
  if (rho.trunc().modes != 2) throw UnsupportedError("wigner_two_mode_slice: two-mode states only");
  if (slice.plot_mode != 1 && slice.plot_mode != 2) throw ConfigError("wigner_two_mode_slice: plot_mode must be 1 or 2");
  check_uniform(q_axis, "q axis");
  check_uniform(p_axis, "p axis");
  PhaseSpaceGrid g{q_axis, p_axis, RMatrix(q_axis.size(), p_axis.size()), slice, {}};
  if (std::abs(slice.fixed_q) > 8.0 || std::abs(slice.fixed_p) > 8.0)
    g.warnings.push_back("fixed coordinates outside |q|, |p| <= 8: kernel values underflow");

  const int d = rho.trunc().dim();
  const CMatrix h = 0.5 * (rho.entries() + rho.entries().adjoint());
  const int other = slice.plot_mode == 1 ? 2 : 1;
  const CMatrix reduced = contract_mode(h, d, wigner_kernel_matrix(d, slice.fixed_q, slice.fixed_p), other);
  for (std::size_t i = 0; i < q_axis.size(); ++i)
    for (std::size_t j = 0; j < p_axis.size(); ++j)
      g.values(i, j) = pair_sum(reduced, wigner_kernel_matrix(d, q_axis[i], p_axis[j]));
  return g;
}

double PhaseSpaceTensor::at(std::size_t i1, std::size_t j1, std::size_t i2, std::size_t j2) const {
  const std::size_t nq = q_axis.size(), np = p_axis.size();
  return values[((i1 * np + j1) * nq + i2) * np + j2];
}

double PhaseSpaceTensor::integral() const {
  const double cell = axis_step(q_axis) * axis_step(p_axis);
  double s = 0.0;
  for (double v : values) s += v;
  return s * cell * cell;
}

PhaseSpaceTensor wigner_two_mode_full(const DensityMatrix& rho, const std::vector<double>& q_axis,
                                      const std::vector<double>& p_axis) {
  if (rho.trunc().modes != 2) throw UnsupportedError("wigner_two_mode_full: two-mode states only");
  check_uniform(q_axis, "q axis");
  check_uniform(p_axis, "p axis");
  const int d = rho.trunc().dim();
  const std::size_t nq = q_axis.size(), np = p_axis.size();
  std::vector<CMatrix> kernels;
  kernels.reserve(nq * np);
  for (std::size_t i = 0; i < nq; ++i)
    for (std::size_t j = 0; j < np; ++j) kernels.push_back(wigner_kernel_matrix(d, q_axis[i], p_axis[j]));

  const CMatrix h = 0.5 * (rho.entries() + rho.entries().adjoint());
  PhaseSpaceTensor t{q_axis, p_axis, std::vector<double>(nq * np * nq * np)};
  for (std::size_t a = 0; a < kernels.size(); ++a) {
    const CMatrix reduced = contract_mode(h, d, kernels[a], 1);
    for (std::size_t b = 0; b < kernels.size(); ++b) t.values[a * kernels.size() + b] = pair_sum(reduced, kernels[b]);
  }
  return t;
}

} // namespace cvtomo
