#include "cvtomo/fock.hpp"

#include <cmath>
#include <sstream>

#include "cvtomo/errors.hpp"

namespace cvtomo {

int TruncationConfig::total_dim() const {
  int total = 1;
  for (int m = 0; m < modes; ++m) total *= dim();
  return total;
}

void TruncationConfig::validate() const {
  if (cutoff_n < 0) throw ConfigError("truncation: cutoff_n must be >= 0");
  if (modes < 1) throw ConfigError("truncation: modes must be >= 1");
  if (modes > 4) throw ConfigError("truncation: more than 4 modes is not supported");
}

int flat_index(const TruncationConfig& trunc, const std::vector<int>& occupations) {
  if (static_cast<int>(occupations.size()) != trunc.modes) throw DimensionError("flat_index: wrong number of modes");
  int flat = 0;
  for (int n : occupations) {
    if (n < 0 || n > trunc.cutoff_n) throw DomainError("flat_index: occupation outside the truncated basis");
    flat = flat * trunc.dim() + n;
  }
  return flat;
}

std::vector<int> unflatten_index(const TruncationConfig& trunc, int flat) {
  if (flat < 0 || flat >= trunc.total_dim()) throw DomainError("unflatten_index: index out of range");
  std::vector<int> occ(trunc.modes);
  for (int m = trunc.modes - 1; m >= 0; --m) {
    occ[m] = flat % trunc.dim();
    flat /= trunc.dim();
  }
  return occ;
}

PureState PureState::from_amplitudes(const TruncationConfig& trunc, CVector amplitudes) {
  if (amplitudes.size() != trunc.total_dim()) throw DimensionError("PureState: amplitude count does not match truncation");
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw DomainError("PureState: zero vector");
  return PureState{trunc, amplitudes / norm};
}

// -- DensityMatrix ------------------------------------------------------------

DensityMatrix DensityMatrix::from_matrix(const TruncationConfig& trunc, const CMatrix& entries, bool normalize) {
  trunc.validate();
  const int n = trunc.total_dim();
  if (entries.rows() != n || entries.cols() != n) throw DimensionError("DensityMatrix: matrix size does not match truncation");
  if (!entries.allFinite()) throw DomainError("DensityMatrix: non-finite entries");
  if (hermitian_defect(entries) > kHermitianTol) throw DomainError("DensityMatrix: matrix is not Hermitian");
  CMatrix m = 0.5 * (entries + entries.adjoint());
  const double tr = m.trace().real();
  if (normalize) {
    if (!(tr > 0.0)) throw DomainError("DensityMatrix: cannot normalize a matrix with non-positive trace");
    m /= tr;
  } else if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " differs from 1";
    throw DomainError(os.str());
  }
  const double lmin = hermitian_eigenvalues(m)(0);
  if (lmin < -kPsdTol) {
    std::ostringstream os;
    os << "DensityMatrix: minimum eigenvalue " << lmin << " is negative";
    throw DomainError(os.str());
  }
  return DensityMatrix(trunc, std::move(m));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const CVector v = psi.amplitudes / psi.amplitudes.norm();
  return DensityMatrix(psi.trunc, v * v.adjoint());
}

DensityMatrix DensityMatrix::nearest_state(const TruncationConfig& trunc, const CMatrix& entries) {
  const int n = trunc.total_dim();
  if (entries.rows() != n || entries.cols() != n) throw DimensionError("nearest_state: matrix size does not match truncation");
  const CMatrix h = 0.5 * (entries + entries.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  RVector lambda = es.eigenvalues().cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0)) throw DomainError("nearest_state: no positive spectrum to keep");
  lambda /= total;
  CMatrix m = es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().adjoint();
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix(trunc, std::move(m));
}

DensityMatrix DensityMatrix::with_discarded_weight(double w) const {
  DensityMatrix copy = *this;
  copy.discarded_weight_ = w;
  return copy;
}

double DensityMatrix::min_eigenvalue() const { return hermitian_eigenvalues(entries_)(0); }

int DensityMatrix::rank(double tol) const {
  const RVector ev = hermitian_eigenvalues(entries_);
  return static_cast<int>((ev.array() > tol).count());
}

// -- StateSpec ----------------------------------------------------------------

std::string to_string(StateKind kind) {
  switch (kind) {
    case StateKind::noon: return "noon";
    case StateKind::hermite_gauss: return "hermite_gauss";
    case StateKind::squeezed_vacuum: return "squeezed_vacuum";
    case StateKind::dephased_cat: return "dephased_cat";
    case StateKind::fock: return "fock";
    case StateKind::coherent: return "coherent";
  }
  return "unknown";
}

StateKind state_kind_from_string(const std::string& name) {
  for (StateKind k : {StateKind::noon, StateKind::hermite_gauss, StateKind::squeezed_vacuum, StateKind::dephased_cat,
                      StateKind::fock, StateKind::coherent})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown state kind '" + name + "'");
}

double StateSpec::param(const std::string& key) const {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("state " + to_string(kind) + ": missing parameter '" + key + "'");
  return it->second;
}

int StateSpec::required_modes() const {
  switch (kind) {
    case StateKind::fock:
    case StateKind::coherent: return 0;
    default: return 2;
  }
}

StateSpec StateSpec::resolved() const {
  std::map<std::string, double> defaults;
  switch (kind) {
    case StateKind::fock: defaults = {{"n", 1}}; break;
    case StateKind::coherent: defaults = {{"z_re", 1}, {"z_im", 0}}; break;
    case StateKind::noon: defaults = {{"n", 1}}; break;
    case StateKind::hermite_gauss: defaults = {{"n", 1}, {"sigma_plus", 1.0}, {"sigma_minus", 0.5}}; break;
    case StateKind::squeezed_vacuum: defaults = {{"zeta", 0.2}}; break;
    case StateKind::dephased_cat: defaults = {{"alpha", 1.0}, {"p", 0.5}}; break;
  }
  StateSpec out{kind, defaults};
  for (const auto& [k, v] : params) {
    if (!defaults.count(k)) throw ConfigError("state " + to_string(kind) + ": unknown parameter '" + k + "'");
    if (!std::isfinite(v)) throw ConfigError("state " + to_string(kind) + ": parameter '" + k + "' is not finite");
    out.params[k] = v;
  }
  auto is_count = [](double x) { return x >= 0 && std::floor(x) == x; };
  switch (kind) {
    case StateKind::fock:
      if (!is_count(out.param("n"))) throw ConfigError("fock: n must be a non-negative integer");
      break;
    case StateKind::noon:
      if (!is_count(out.param("n")) || out.param("n") < 1) throw ConfigError("noon: n must be an integer >= 1");
      break;
    case StateKind::hermite_gauss:
      if (!is_count(out.param("n"))) throw ConfigError("hermite_gauss: n must be a non-negative integer");
      if (!(out.param("sigma_plus") > 0) || !(out.param("sigma_minus") > 0))
        throw ConfigError("hermite_gauss: sigma_plus and sigma_minus must be positive");
      break;
    case StateKind::dephased_cat:
      if (!(out.param("p") >= 0 && out.param("p") <= 1)) throw ConfigError("dephased_cat: p must lie in [0, 1]");
      break;
    default: break;
  }
  return out;
}

// -- basis functions ----------------------------------------------------------

RVector hermite_wavefunctions(int count, double q) {
  if (count < 0) throw DomainError("hermite_wavefunctions: negative count");
  if (count > 201) throw DomainError("hermite_wavefunctions: n > 200 is not supported");
  RVector out(count);
  if (count == 0) return out;
  // Orthonormal recursion psi_{n+1} = sqrt(2/(n+1)) q psi_n - sqrt(n/(n+1)) psi_{n-1};
  // it carries the (2^n n!)^{-1/2} prefactor implicitly and never overflows.
  out(0) = std::pow(kPi, -0.25) * std::exp(-0.5 * q * q);
  if (count > 1) out(1) = std::sqrt(2.0) * q * out(0);
  for (int n = 1; n + 1 < count; ++n)
    out(n + 1) = std::sqrt(2.0 / (n + 1)) * q * out(n) - std::sqrt(static_cast<double>(n) / (n + 1)) * out(n - 1);
  return out;
}

double hermite_wavefunction(int n, double q) {
  if (n < 0) throw DomainError("hermite_wavefunction: n must be non-negative");
  if (n > 200) throw DomainError("hermite_wavefunction: n > 200 is not supported");
  return hermite_wavefunctions(n + 1, q)(n);
}

cplx coherent_overlap(int n, cplx z) {
  if (n < 0) throw DomainError("coherent_overlap: n must be non-negative");
  // Accumulate z^n / sqrt(n!) as a running product.
  cplx term = std::exp(-0.5 * std::norm(z));
  for (int k = 1; k <= n; ++k) term *= z / std::sqrt(static_cast<double>(k));
  return term;
}

CVector coherent_vector(int dim, cplx z) {
  CVector v(dim);
  if (dim == 0) return v;
  v(0) = std::exp(-0.5 * std::norm(z));
  for (int k = 1; k < dim; ++k) v(k) = v(k - 1) * z / std::sqrt(static_cast<double>(k));
  return v;
}

CMatrix annihilation_matrix(const TruncationConfig& trunc) {
  const int d = trunc.dim();
  CMatrix a = CMatrix::Zero(d, d);
  for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

CMatrix phase_rotation(int dim, double phi) {
  CMatrix u = CMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) u(n, n) = std::polar(1.0, phi * n);
  return u;
}

CMatrix tensor_lift(const std::vector<CMatrix>& single_mode) {
  if (single_mode.empty()) throw DimensionError("tensor_lift: empty list");
  const Eigen::Index d = single_mode.front().rows();
  for (const auto& m : single_mode)
    if (m.rows() != d || m.cols() != d) throw DimensionError("tensor_lift: all factors must be square of equal size");
  CMatrix out = single_mode.front();
  for (std::size_t k = 1; k < single_mode.size(); ++k) out = kron(out, single_mode[k]);
  return out;
}

// -- target states ------------------------------------------------------------

HermiteGaussProjection project_hermite_gauss(int order_n, double sigma_plus, double sigma_minus, int dim,
                                             int quadrature_order) {
  // Phi(u, v) = H_n(u / s+) exp(-u^2 / (2 s+^2)) exp(-v^2 / (2 s-^2)),
  // u = (q1 + q2)/sqrt2, v = (q1 - q2)/sqrt2; the unit-Jacobian rotation keeps
  // c(m, n) = int Phi psi_m(q1) psi_n(q2) du dv.
  // Both integrals below are polynomial times Gaussian, so a Gauss-Hermite
  // rule scaled to each Gaussian width is exact up to its degree.
  const GaussHermiteRule rule = gauss_hermite(quadrature_order);
  const int order = quadrature_order;

  auto hermite_poly = [order_n](double x) {
    double prev = 1.0, cur = 2.0 * x;
    if (order_n == 0) return prev;
    for (int k = 1; k < order_n; ++k) {
      const double next = 2.0 * x * cur - 2.0 * k * prev;
      prev = cur;
      cur = next;
    }
    return cur;
  };

  const double a_u = 0.5 / (sigma_plus * sigma_plus) + 0.5;
  const double a_v = 0.5 / (sigma_minus * sigma_minus) + 0.5;
  const double su = 1.0 / std::sqrt(a_u);
  const double sv = 1.0 / std::sqrt(a_v);

  RMatrix coeff = RMatrix::Zero(dim, dim);
  for (int k = 0; k < order; ++k) {
    const double u = rule.nodes[k] * su;
    const double wu = std::exp(rule.log_plain_weights[k]) * su;
    const double phi_u = hermite_poly(u / sigma_plus) * std::exp(-u * u / (2 * sigma_plus * sigma_plus));
    for (int l = 0; l < order; ++l) {
      const double v = rule.nodes[l] * sv;
      const double wv = std::exp(rule.log_plain_weights[l]) * sv;
      const double phi = phi_u * std::exp(-v * v / (2 * sigma_minus * sigma_minus));
      const RVector psi1 = hermite_wavefunctions(dim, (u + v) / std::sqrt(2.0));
      const RVector psi2 = hermite_wavefunctions(dim, (u - v) / std::sqrt(2.0));
      coeff.noalias() += (wu * wv * phi) * psi1 * psi2.transpose();
    }
  }

  // ||Phi||^2 = int H_n(u/s+)^2 e^{-u^2/s+^2} du * int e^{-v^2/s-^2} dv
  double norm_u = 0.0;
  for (int k = 0; k < order; ++k) {
    const double u = rule.nodes[k] * sigma_plus;
    const double h = hermite_poly(u / sigma_plus);
    norm_u += rule.weights[k] * sigma_plus * h * h;
  }
  const double norm_v = std::sqrt(kPi) * sigma_minus;
  const double norm = norm_u * norm_v;

  return {coeff, coeff.squaredNorm() / norm};
}

namespace {

DensityMatrix finish(const TruncationConfig& trunc, const CMatrix& unnormalized, double discarded,
                     const BuildOptions& opts, const std::string& what) {
  if (discarded > opts.max_discarded_weight) {
    std::ostringstream os;
    os << what << ": truncation at cutoff_n=" << trunc.cutoff_n << " discards weight " << discarded
       << " (allowed " << opts.max_discarded_weight << "); increase cutoff_n";
    throw TruncationError(os.str());
  }
  return DensityMatrix::from_matrix(trunc, unnormalized, /*normalize=*/true).with_discarded_weight(std::max(0.0, discarded));
}

void require_modes(const StateSpec& spec, const TruncationConfig& trunc) {
  const int need = spec.required_modes();
  if (need != 0 && trunc.modes != need) {
    std::ostringstream os;
    os << to_string(spec.kind) << " requires " << need << " modes, got " << trunc.modes;
    throw ConfigError(os.str());
  }
}

} // namespace

DensityMatrix build_state(const StateSpec& raw_spec, const TruncationConfig& trunc, const BuildOptions& opts) {
  trunc.validate();
  const StateSpec spec = raw_spec.resolved();
  require_modes(spec, trunc);
  const int d = trunc.dim();
  const int total = trunc.total_dim();
  const std::string name = to_string(spec.kind);

  switch (spec.kind) {
    case StateKind::fock: {
      const int n = static_cast<int>(spec.param("n"));
      if (n > trunc.cutoff_n) throw TruncationError("fock: n exceeds cutoff_n");
      CVector v = CVector::Zero(total);
      v(flat_index(trunc, std::vector<int>(trunc.modes, n))) = 1.0;
      return finish(trunc, v * v.adjoint(), 0.0, opts, name);
    }
    case StateKind::coherent: {
      const cplx z(spec.param("z_re"), spec.param("z_im"));
      const CVector single = coherent_vector(d, z);
      CVector v = single;
      for (int m = 1; m < trunc.modes; ++m) v = kron(v, single);
      return finish(trunc, v * v.adjoint(), 1.0 - v.squaredNorm(), opts, name);
    }
    case StateKind::noon: {
      const int n = static_cast<int>(spec.param("n"));
      if (n > trunc.cutoff_n) throw TruncationError("noon: n exceeds cutoff_n");
      CVector v = CVector::Zero(total);
      v(flat_index(trunc, {n, 0})) = 1.0 / std::sqrt(2.0);
      v(flat_index(trunc, {0, n})) = 1.0 / std::sqrt(2.0);
      return finish(trunc, v * v.adjoint(), 0.0, opts, name);
    }
    case StateKind::squeezed_vacuum: {
      const double lambda = std::tanh(spec.param("zeta"));
      CVector v = CVector::Zero(total);
      double amp = std::sqrt(1.0 - lambda * lambda);
      for (int n = 0; n < d; ++n) {
        v(flat_index(trunc, {n, n})) = amp;
        amp *= lambda;
      }
      return finish(trunc, v * v.adjoint(), 1.0 - v.squaredNorm(), opts, name);
    }
    case StateKind::hermite_gauss: {
      const auto proj = project_hermite_gauss(static_cast<int>(spec.param("n")), spec.param("sigma_plus"),
                                              spec.param("sigma_minus"), d, opts.hermite_gauss_order);
      CVector v(total);
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) v(m * d + n) = proj.coefficients(m, n);
      return finish(trunc, v * v.adjoint(), 1.0 - proj.captured_norm, opts, name);
    }
    case StateKind::dephased_cat: {
      const double alpha = spec.param("alpha");
      const double p = spec.param("p");
      const CVector plus1 = coherent_vector(d, alpha);
      const CVector minus1 = coherent_vector(d, -alpha);
      const CVector a = kron(plus1, plus1);
      const CVector b = kron(minus1, minus1);
      const CMatrix rho = a * a.adjoint() + b * b.adjoint() - (1.0 - p) * (a * b.adjoint() + b * a.adjoint());
      // Untruncated trace: 2 - 2(1-p) <alpha,alpha|-alpha,-alpha>, overlap e^{-4 alpha^2}.
      const double full_trace = 2.0 - 2.0 * (1.0 - p) * std::exp(-4.0 * alpha * alpha);
      const double kept = rho.trace().real();
      return finish(trunc, rho, 1.0 - kept / full_trace, opts, name);
    }
  }
  throw ConfigError("build_state: unhandled kind");
}

} // namespace cvtomo
