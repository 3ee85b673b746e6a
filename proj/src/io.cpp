#include "cvtomo/io.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cvtomo/errors.hpp"

namespace cvtomo::io {

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

const json& require(const json& j, const char* key) {
  if (!j.is_object()) throw IoError(std::string("expected a JSON object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw IoError(std::string("missing field '") + key + "'");
  return *it;
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw IoError("trailing characters in number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw IoError("not a number: '" + s + "'");
  }
}

std::vector<std::string> nonempty_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

json coords_to_json(const POVMElement& e) {
  json c = json::array();
  if (e.kind == PovmKind::quadrature)
    for (const auto& p : e.quadrature_coords) c.push_back({p.q, p.theta});
  else
    for (const auto& p : e.coherent_coords) c.push_back({p.z.real(), p.z.imag()});
  return c;
}

} // namespace

json to_json(const TruncationConfig& t) { return {{"cutoff_n", t.cutoff_n}, {"modes", t.modes}}; }

TruncationConfig truncation_from_json(const json& j) {
  TruncationConfig t;
  t.cutoff_n = get_or(j, "cutoff_n", t.cutoff_n);
  t.modes = get_or(j, "modes", t.modes);
  t.validate();
  return t;
}

json to_json(const StateSpec& s) {
  json params = json::object();
  for (const auto& [k, v] : s.params) params[k] = v;
  return {{"kind", to_string(s.kind)}, {"params", params}};
}

StateSpec state_spec_from_json(const json& j) {
  StateSpec s;
  s.kind = state_kind_from_string(require(j, "kind").get<std::string>());
  if (auto it = j.find("params"); it != j.end())
    for (const auto& [k, v] : it->items()) s.params[k] = v.get<double>();
  return s;
}

json to_json(const SamplingGrid& g) {
  return {{"kind", to_string(g.kind)}, {"modes", g.modes},         {"q_axis", g.q_axis},
          {"theta_axis", g.theta_axis}, {"z_axis", g.z_axis},      {"q_step", g.q_step},
          {"theta_step", g.theta_step}, {"z_step", g.z_step},      {"z_cell_im", g.z_cell_im}};
}

SamplingGrid sampling_grid_from_json(const json& j) {
  SamplingGrid g;
  g.kind = povm_kind_from_string(require(j, "kind").get<std::string>());
  g.modes = get_or(j, "modes", 1);
  g.q_axis = get_or(j, "q_axis", std::vector<double>{});
  g.theta_axis = get_or(j, "theta_axis", std::vector<double>{});
  g.z_axis = get_or(j, "z_axis", std::vector<double>{});
  g.q_step = get_or(j, "q_step", 0.0);
  g.theta_step = get_or(j, "theta_step", 0.0);
  g.z_step = get_or(j, "z_step", 0.0);
  g.z_cell_im = get_or(j, "z_cell_im", 0.0);
  g.validate();
  return g;
}

json to_json(const NoiseConfig& n) {
  return {{"enabled", n.enabled}, {"snr_percent", n.snr_percent}, {"seed", n.seed}};
}

NoiseConfig noise_from_json(const json& j) {
  NoiseConfig n;
  n.enabled = get_or(j, "enabled", n.enabled);
  n.snr_percent = get_or(j, "snr_percent", n.snr_percent);
  n.seed = get_or<std::uint64_t>(j, "seed", n.seed);
  n.validate();
  return n;
}

json matrix_to_json(const CMatrix& m, const TruncationConfig& t) {
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(m.size()));
  im.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  return {{"dim", m.rows()}, {"cutoff_n", t.cutoff_n}, {"modes", t.modes}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const json& j, TruncationConfig* trunc) {
  const int dim = require(j, "dim").get<int>();
  TruncationConfig t{require(j, "cutoff_n").get<int>(), get_or(j, "modes", 1)};
  t.validate();
  if (t.total_dim() != dim) throw IoError("matrix file: dim does not match cutoff_n and modes");
  const auto re = require(j, "re").get<std::vector<double>>();
  const auto im = require(j, "im").get<std::vector<double>>();
  const auto n = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim);
  if (re.size() != n || im.size() != n) throw IoError("matrix file: re/im must hold dim^2 values");
  CMatrix m(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const auto k = static_cast<std::size_t>(r) * dim + c;
      m(r, c) = cplx(re[k], im[k]);
    }
  if (trunc) *trunc = t;
  return m;
}

json to_json(const DensityMatrix& rho) {
  json j = matrix_to_json(rho.entries(), rho.trunc());
  j["discarded_weight"] = rho.discarded_weight();
  return j;
}

DensityMatrix density_from_json(const json& j) {
  TruncationConfig t;
  const CMatrix m = matrix_from_json(j, &t);
  return DensityMatrix::from_matrix(t, m).with_discarded_weight(get_or(j, "discarded_weight", 0.0));
}

json to_json(const PovmFile& f, bool materialize) {
  json elements = json::array();
  for (const auto& e : f.elements) {
    json je = {{"id", e.id}, {"kind", to_string(e.kind)}, {"coords", coords_to_json(e)}, {"weight", e.weight}};
    if (materialize) {
      const json m = matrix_to_json(e.matrix(), f.trunc);
      je["matrix"] = {{"re", m["re"]}, {"im", m["im"]}};
    }
    elements.push_back(std::move(je));
  }
  return {{"header", {{"grid", to_json(f.grid)}, {"trunc", to_json(f.trunc)}, {"count", f.elements.size()}}},
          {"elements", elements}};
}

PovmFile povm_file_from_json(const json& j) {
  PovmFile f;
  const json& header = require(j, "header");
  f.grid = sampling_grid_from_json(require(header, "grid"));
  f.trunc = truncation_from_json(require(header, "trunc"));
  for (const auto& je : require(j, "elements")) {
    POVMElement meta;
    meta.id = require(je, "id").get<std::string>();
    meta.kind = povm_kind_from_string(require(je, "kind").get<std::string>());
    meta.weight = get_or(je, "weight", 0.0);
    for (const auto& c : require(je, "coords")) {
      if (!c.is_array() || c.size() != 2) throw IoError("povm file: each coordinate is a pair");
      if (meta.kind == PovmKind::quadrature)
        meta.quadrature_coords.push_back({c[0].get<double>(), c[1].get<double>()});
      else
        meta.coherent_coords.push_back({cplx(c[0].get<double>(), c[1].get<double>())});
    }
    POVMElement e = regenerate_element(meta, f.grid, f.trunc);
    if (auto it = je.find("matrix"); it != je.end()) {
      json mj = *it;
      mj["dim"] = f.trunc.total_dim();
      mj["cutoff_n"] = f.trunc.cutoff_n;
      mj["modes"] = f.trunc.modes;
      const CMatrix stored = matrix_from_json(mj);
      if ((stored - e.matrix()).cwiseAbs().maxCoeff() > 1e-9)
        throw IoError("povm file: stored matrix of '" + e.id + "' disagrees with its coordinates");
    }
    f.elements.push_back(std::move(e));
  }
  return f;
}

json to_json(const MeasurementRecord& r) {
  return {{"element_id", r.element_id}, {"frequency", r.frequency}, {"ideal", r.ideal}, {"counts", r.counts}};
}

MeasurementRecord record_from_json(const json& j) {
  MeasurementRecord r;
  r.element_id = require(j, "element_id").get<std::string>();
  r.frequency = require(j, "frequency").get<double>();
  r.ideal = get_or(j, "ideal", 0.0);
  r.counts = get_or<std::int64_t>(j, "counts", 0);
  return r;
}

std::string creation_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_dataset(const fs::path& path, const Dataset& d) {
  std::ostringstream os;
  const json header = {{"state_spec", to_json(d.header.state_spec)},
                       {"trunc", to_json(d.header.trunc)},
                       {"grid", to_json(d.header.grid)},
                       {"noise", to_json(d.header.noise)},
                       {"created", d.header.created}};
  os << header.dump() << "\n";
  for (const auto& r : d.records) os << to_json(r).dump() << "\n";
  write_text(path, os.str());
}

Dataset read_dataset(const fs::path& path) {
  const auto lines = nonempty_lines(read_text(path));
  if (lines.empty()) throw IoError("'" + path.string() + "': empty dataset");
  Dataset d;
  try {
    const json h = json::parse(lines.front());
    d.header.state_spec = state_spec_from_json(require(h, "state_spec"));
    d.header.trunc = truncation_from_json(require(h, "trunc"));
    d.header.grid = sampling_grid_from_json(require(h, "grid"));
    d.header.noise = noise_from_json(require(h, "noise"));
    d.header.created = get_or(h, "created", std::string{});
    for (std::size_t i = 1; i < lines.size(); ++i) d.records.push_back(record_from_json(json::parse(lines[i])));
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
  return d;
}

std::string phase_space_csv(const PhaseSpaceGrid& g) {
  std::ostringstream os;
  os << "q\\p";
  for (double p : g.p_axis) os << "," << format_double(p);
  os << "\n";
  for (std::size_t i = 0; i < g.q_axis.size(); ++i) {
    os << format_double(g.q_axis[i]);
    for (std::size_t j = 0; j < g.p_axis.size(); ++j) os << "," << format_double(g.values(i, j));
    os << "\n";
  }
  return os.str();
}

PhaseSpaceGrid phase_space_from_csv(const std::string& text) {
  const auto lines = nonempty_lines(text);
  if (lines.size() < 2) throw IoError("phase-space CSV: need a header row and values");
  PhaseSpaceGrid g;
  const auto head = split(lines[0], ',');
  for (std::size_t k = 1; k < head.size(); ++k) g.p_axis.push_back(parse_double(head[k]));
  g.values.resize(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(g.p_axis.size()));
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i], ',');
    if (cells.size() != g.p_axis.size() + 1) throw IoError("phase-space CSV: ragged row " + std::to_string(i + 1));
    g.q_axis.push_back(parse_double(cells[0]));
    for (std::size_t k = 1; k < cells.size(); ++k) g.values(i - 1, k - 1) = parse_double(cells[k]);
  }
  g.validate();
  return g;
}

json to_json(const PhaseSpaceGrid& g) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
    std::vector<double> row(g.values.cols());
    for (Eigen::Index k = 0; k < g.values.cols(); ++k) row[k] = g.values(i, k);
    rows.push_back(row);
  }
  json j = {{"q_axis", g.q_axis}, {"p_axis", g.p_axis}, {"values", rows}, {"integral", g.integral()},
            {"min", g.values.minCoeff()}, {"max", g.values.maxCoeff()}, {"warnings", g.warnings}};
  if (g.mode_slice)
    j["mode_slice"] = {{"plot_mode", g.mode_slice->plot_mode}, {"fixed_q", g.mode_slice->fixed_q},
                       {"fixed_p", g.mode_slice->fixed_p}};
  return j;
}

std::string sinogram_csv(const Sinogram& s) {
  std::ostringstream os;
  os << "q_axis";
  for (double q : s.q_axis) os << "," << format_double(q);
  os << "\ntheta_axis";
  for (double t : s.theta_axis) os << "," << format_double(t);
  os << "\n";
  for (Eigen::Index i = 0; i < s.values.rows(); ++i) {
    for (Eigen::Index k = 0; k < s.values.cols(); ++k) os << (k ? "," : "") << format_double(s.values(i, k));
    os << "\n";
  }
  return os.str();
}

Sinogram sinogram_from_csv(const std::string& text) {
  const auto lines = nonempty_lines(text);
  if (lines.size() < 3) throw IoError("sinogram CSV: need q_axis, theta_axis and value rows");
  auto axis_row = [](const std::string& line, const char* name) {
    const auto cells = split(line, ',');
    if (cells.empty() || cells[0] != name) throw IoError(std::string("sinogram CSV: expected row '") + name + "'");
    std::vector<double> axis;
    for (std::size_t k = 1; k < cells.size(); ++k) axis.push_back(parse_double(cells[k]));
    return axis;
  };
  Sinogram s;
  s.q_axis = axis_row(lines[0], "q_axis");
  s.theta_axis = axis_row(lines[1], "theta_axis");
  if (lines.size() - 2 != s.q_axis.size()) throw IoError("sinogram CSV: one value row per q sample expected");
  s.values.resize(static_cast<Eigen::Index>(s.q_axis.size()), static_cast<Eigen::Index>(s.theta_axis.size()));
  for (std::size_t i = 0; i < s.q_axis.size(); ++i) {
    const auto cells = split(lines[i + 2], ',');
    if (cells.size() != s.theta_axis.size()) throw IoError("sinogram CSV: ragged value row " + std::to_string(i + 3));
    for (std::size_t k = 0; k < cells.size(); ++k) s.values(i, k) = parse_double(cells[k]);
  }
  s.validate();
  return s;
}

std::vector<double> parse_axis(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ConfigError("axis '" + spec + "' must be min:step:max");
  try {
    return uniform_axis(parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2]));
  } catch (const IoError& e) {
    throw ConfigError("axis '" + spec + "': " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError("axis '" + spec + "': " + e.what());
  }
}

std::string sha256_file(const fs::path& path) {
  const std::string bytes = read_text(path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed for '" + path.string() + "'");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

} // namespace cvtomo::io
