#include "cvtomo/povm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvtomo/errors.hpp"

namespace cvtomo {

namespace {

constexpr double kOnGridTol = 1e-9;

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  for (int k = 0; k < count; ++k) out[k] = lo + (hi - lo) * k / (count - 1);
  return out;
}

void check_increasing(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw ConfigError(std::string("sampling grid: empty ") + name + " axis");
  for (std::size_t k = 1; k < axis.size(); ++k)
    if (!(axis[k] > axis[k - 1])) throw ConfigError(std::string("sampling grid: ") + name + " axis is not strictly increasing");
}

double axis_step(const std::vector<double>& axis, double override_step) {
  if (override_step > 0.0) return override_step;
  if (axis.size() < 2) return 1.0;
  return (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
}

std::size_t find_on_axis(const std::vector<double>& axis, double value, const char* name) {
  for (std::size_t k = 0; k < axis.size(); ++k)
    if (std::abs(axis[k] - value) <= kOnGridTol) return k;
  std::ostringstream os;
  os << "point off-grid: " << name << " = " << value;
  throw DomainError(os.str());
}

} // namespace

QuadraturePoint QuadraturePoint::canonical() const {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0) t += 2.0 * kPi;
  double x = q;
  if (t >= kPi) {
    t -= kPi;
    x = -x;
  }
  return {x, t};
}

std::string to_string(PovmKind kind) { return kind == PovmKind::quadrature ? "quadrature" : "coherent"; }

PovmKind povm_kind_from_string(const std::string& name) {
  if (name == "quadrature" || name == "homodyne") return PovmKind::quadrature;
  if (name == "coherent" || name == "heterodyne") return PovmKind::coherent;
  throw ConfigError("unknown POVM kind '" + name + "'");
}

// -- SamplingGrid -------------------------------------------------------------

SamplingGrid SamplingGrid::quadrature(int modes, double q_min, double q_max, int q_count, int theta_count) {
  SamplingGrid g;
  g.kind = PovmKind::quadrature;
  g.modes = modes;
  g.q_axis = linspace(q_min, q_max, q_count);
  g.theta_axis.resize(theta_count);
  for (int k = 0; k < theta_count; ++k) g.theta_axis[k] = kPi * k / theta_count;
  g.validate();
  return g;
}

SamplingGrid SamplingGrid::quadrature_inclusive(int modes, double q_min, double q_max, int q_count, double theta_step,
                                                double theta_max) {
  SamplingGrid g;
  g.kind = PovmKind::quadrature;
  g.modes = modes;
  g.q_axis = linspace(q_min, q_max, q_count);
  for (int k = 0; k * theta_step <= theta_max + 1e-12; ++k) g.theta_axis.push_back(k * theta_step);
  g.theta_step = theta_step;
  g.validate();
  return g;
}

SamplingGrid SamplingGrid::coherent(int modes, double z_min, double z_max, int z_count) {
  SamplingGrid g;
  g.kind = PovmKind::coherent;
  g.modes = modes;
  g.z_axis = linspace(z_min, z_max, z_count);
  g.validate();
  return g;
}

void SamplingGrid::validate() const {
  if (modes < 1) throw ConfigError("sampling grid: modes must be >= 1");
  if (kind == PovmKind::quadrature) {
    check_increasing(q_axis, "q");
    check_increasing(theta_axis, "theta");
    if (theta_axis.front() < -kOnGridTol || theta_axis.back() > kPi + kOnGridTol)
      throw ConfigError("sampling grid: theta axis must lie in [0, pi]");
  } else {
    check_increasing(z_axis, "z");
  }
  for (double s : {q_step, theta_step, z_step, z_cell_im})
    if (s < 0.0 || !std::isfinite(s)) throw ConfigError("sampling grid: cell sizes must be finite and >= 0");
}

std::size_t SamplingGrid::points_per_mode() const {
  return kind == PovmKind::quadrature ? q_axis.size() * theta_axis.size() : z_axis.size();
}

std::size_t SamplingGrid::cardinality() const {
  std::size_t n = 1;
  for (int m = 0; m < modes; ++m) n *= points_per_mode();
  return n;
}

double SamplingGrid::cell_q() const { return axis_step(q_axis, q_step); }
double SamplingGrid::cell_theta() const { return axis_step(theta_axis, theta_step); }
double SamplingGrid::cell_z() const { return axis_step(z_axis, z_step); }
double SamplingGrid::cell_z_im() const { return z_cell_im > 0.0 ? z_cell_im : cell_z(); }

double SamplingGrid::mode_weight() const {
  // Resolutions of identity: I = (1/pi) int dq dtheta |q_theta><q_theta| over
  // theta in [0, pi), and I = (1/pi) int d^2z |z><z|.
  if (kind == PovmKind::quadrature) return cell_q() * cell_theta() / kPi;
  return cell_z() * cell_z_im() / kPi;
}

std::vector<std::size_t> SamplingGrid::point_indices(std::size_t flat) const {
  if (flat >= cardinality()) throw DomainError("sampling grid: element index out of range");
  std::vector<std::size_t> idx(modes);
  const std::size_t per = points_per_mode();
  for (int m = modes - 1; m >= 0; --m) {
    idx[m] = flat % per;
    flat /= per;
  }
  return idx;
}

QuadraturePoint SamplingGrid::quadrature_point(std::size_t i) const {
  return {q_axis.at(i / theta_axis.size()), theta_axis.at(i % theta_axis.size())};
}

CoherentPoint SamplingGrid::coherent_point(std::size_t i) const { return {cplx(z_axis.at(i), 0.0)}; }

// -- elements -----------------------------------------------------------------

double POVMElement::weighted_expectation(const CMatrix& rho) const {
  const cplx value = vector.dot(rho * vector);  // v^dagger rho v
  return weight * value.real();
}

CVector quadrature_vector(const QuadraturePoint& point, const TruncationConfig& trunc) {
  const int d = trunc.dim();
  const RVector psi = hermite_wavefunctions(d, point.q);
  CVector v(d);
  for (int n = 0; n < d; ++n) v(n) = psi(n) * std::polar(1.0, n * point.theta);
  return v;
}

POVMElement quadrature_element(const std::vector<QuadraturePoint>& points, const SamplingGrid& grid,
                               const TruncationConfig& trunc) {
  if (grid.kind != PovmKind::quadrature) throw ConfigError("quadrature_element: grid is not a quadrature grid");
  if (static_cast<int>(points.size()) != trunc.modes) throw DimensionError("quadrature_element: need one point per mode");
  POVMElement e;
  e.kind = PovmKind::quadrature;
  e.quadrature_coords = points;
  e.weight = 1.0;
  std::ostringstream id;
  id << "quad";
  for (std::size_t m = 0; m < points.size(); ++m) {
    const std::size_t iq = find_on_axis(grid.q_axis, points[m].q, "q");
    const std::size_t it = find_on_axis(grid.theta_axis, points[m].theta, "theta");
    id << (m == 0 ? ":" : "|") << iq << "," << it;
    const CVector v = quadrature_vector(points[m], trunc.single_mode());
    e.vector = m == 0 ? v : kron(e.vector, v);
    e.weight *= grid.mode_weight();
  }
  e.id = id.str();
  return e;
}

POVMElement coherent_element(const std::vector<CoherentPoint>& points, const SamplingGrid& grid,
                             const TruncationConfig& trunc) {
  if (grid.kind != PovmKind::coherent) throw ConfigError("coherent_element: grid is not a coherent grid");
  if (static_cast<int>(points.size()) != trunc.modes) throw DimensionError("coherent_element: need one point per mode");
  POVMElement e;
  e.kind = PovmKind::coherent;
  e.coherent_coords = points;
  e.weight = 1.0;
  std::ostringstream id;
  id << "coh";
  for (std::size_t m = 0; m < points.size(); ++m) {
    if (!std::isfinite(points[m].z.real()) || !std::isfinite(points[m].z.imag()))
      throw DomainError("coherent_element: non-finite amplitude");
    id << (m == 0 ? ":" : "|") << points[m].z.real() << (points[m].z.imag() < 0 ? "" : "+") << points[m].z.imag() << "i";
    const CVector v = coherent_vector(trunc.dim(), points[m].z);
    e.vector = m == 0 ? v : kron(e.vector, v);
    e.weight *= grid.mode_weight();
  }
  e.id = id.str();
  return e;
}

POVMElement grid_element(const SamplingGrid& grid, std::size_t flat, const TruncationConfig& trunc) {
  if (grid.modes != trunc.modes) throw DimensionError("grid_element: grid and truncation disagree on mode count");
  const auto idx = grid.point_indices(flat);
  if (grid.kind == PovmKind::quadrature) {
    std::vector<QuadraturePoint> pts;
    for (auto i : idx) pts.push_back(grid.quadrature_point(i));
    return quadrature_element(pts, grid, trunc);
  }
  std::vector<CoherentPoint> pts;
  for (auto i : idx) pts.push_back(grid.coherent_point(i));
  POVMElement e = coherent_element(pts, grid, trunc);
  // Stable ids built from axis indices, like the quadrature ids.
  std::ostringstream id;
  id << "coh";
  for (std::size_t m = 0; m < idx.size(); ++m) id << (m == 0 ? ":" : "|") << idx[m];
  e.id = id.str();
  return e;
}

std::vector<POVMElement> grid_elements(const SamplingGrid& grid, const std::vector<std::size_t>& flat,
                                       const TruncationConfig& trunc) {
  std::vector<POVMElement> out;
  out.reserve(flat.size());
  for (auto f : flat) out.push_back(grid_element(grid, f, trunc));
  return out;
}

std::vector<POVMElement> all_grid_elements(const SamplingGrid& grid, const TruncationConfig& trunc) {
  std::vector<std::size_t> flat(grid.cardinality());
  for (std::size_t k = 0; k < flat.size(); ++k) flat[k] = k;
  return grid_elements(grid, flat, trunc);
}

POVMElement regenerate_element(const POVMElement& meta, const SamplingGrid& grid, const TruncationConfig& trunc) {
  POVMElement e = meta.kind == PovmKind::quadrature ? quadrature_element(meta.quadrature_coords, grid, trunc)
                                                    : coherent_element(meta.coherent_coords, grid, trunc);
  e.id = meta.id;
  if (meta.weight > 0.0) e.weight = meta.weight;
  return e;
}

CMatrix weighted_sum(const std::vector<POVMElement>& elements, int dim) {
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (const auto& e : elements) {
    if (e.vector.size() != dim) throw DimensionError("weighted_sum: element dimension mismatch");
    sum.noalias() += e.weight * e.vector * e.vector.adjoint();
  }
  return sum;
}

CompletenessReport completeness_report(const std::vector<POVMElement>& elements, const TruncationConfig& trunc) {
  if (elements.empty()) throw DomainError("completeness: empty element list");
  const int n = trunc.total_dim();
  const CMatrix sum = weighted_sum(elements, n);
  const RVector ev = hermitian_eigenvalues(CMatrix::Identity(n, n) - sum);
  CompletenessReport r;
  r.residual = ev.cwiseAbs().maxCoeff();
  r.gap_min_eigenvalue = ev(0);
  r.max_eigenvalue_of_sum = 1.0 - ev(0);
  return r;
}

double completeness_residual(const std::vector<POVMElement>& elements, const TruncationConfig& trunc) {
  return completeness_report(elements, trunc).residual;
}

} // namespace cvtomo
