#include "cvtomo/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <functional>

#include "cvtomo/errors.hpp"
#include "cvtomo/metrics.hpp"

namespace cvtomo {

namespace {

using io::json;
using Clock = std::chrono::steady_clock;

// Rethrows the active exception with the stage name prefixed, keeping its type.
[[noreturn]] void relabel(const std::string& stage) {
  const std::string p = "stage " + stage + ": ";
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(p + e.what());
  } catch (const TruncationError& e) {
    throw TruncationError(p + e.what());
  } catch (const DegenerateDataError& e) {
    throw DegenerateDataError(p + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(p + e.what());
  } catch (const UnsupportedError& e) {
    throw UnsupportedError(p + e.what());
  } catch (const AccuracyError& e) {
    throw AccuracyError(p + e.what());
  } catch (const DomainError& e) {
    throw DomainError(p + e.what());
  } catch (const IoError& e) {
    throw IoError(p + e.what());
  } catch (const std::exception& e) {
    throw Error(p + e.what());
  }
}

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (...) {
    relabel(name);
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

json grid_spec_json(const GridSpec& g) {
  return {{"kind", to_string(g.kind)}, {"q_min", g.q_min},     {"q_max", g.q_max}, {"q_count", g.q_count},
          {"theta_count", g.theta_count}, {"theta_inclusive", g.theta_inclusive}, {"z_min", g.z_min},
          {"z_max", g.z_max},           {"z_count", g.z_count}};
}

GridSpec grid_spec_from_json(const json& j) {
  GridSpec g;
  if (auto it = j.find("kind"); it != j.end()) g.kind = povm_kind_from_string(it->get<std::string>());
  g.q_min = get_or(j, "q_min", g.q_min);
  g.q_max = get_or(j, "q_max", g.q_max);
  g.q_count = get_or(j, "q_count", g.q_count);
  g.theta_count = get_or(j, "theta_count", g.theta_count);
  g.theta_inclusive = get_or(j, "theta_inclusive", g.theta_inclusive);
  g.z_min = get_or(j, "z_min", g.z_min);
  g.z_max = get_or(j, "z_max", g.z_max);
  g.z_count = get_or(j, "z_count", g.z_count);
  return g;
}

json solver_json(const SolverConfig& s) {
  return {{"algorithm", s.algorithm == SolverAlgorithm::interior_point ? "ip" : "admm"},
          {"tol_primal", s.tol_primal},
          {"tol_dual", s.tol_dual},
          {"tol_gap", s.tol_gap},
          {"max_iters", s.max_iters},
          {"maxent", s.maxent}};
}

SolverConfig solver_from_json(const json& j) {
  SolverConfig s;
  if (auto it = j.find("algorithm"); it != j.end()) s.algorithm = solver_algorithm_from_string(it->get<std::string>());
  s.tol_primal = get_or(j, "tol_primal", s.tol_primal);
  s.tol_dual = get_or(j, "tol_dual", s.tol_dual);
  s.tol_gap = get_or(j, "tol_gap", s.tol_gap);
  s.max_iters = get_or(j, "max_iters", s.max_iters);
  s.maxent = get_or(j, "maxent", s.maxent);
  return s;
}

// Index of `v` on a uniform axis, or -1 when it is not a sample.
int axis_index(const std::vector<double>& axis, double v) {
  for (std::size_t k = 0; k < axis.size(); ++k)
    if (std::abs(axis[k] - v) < 1e-9) return static_cast<int>(k);
  return -1;
}

Sinogram sinogram_from_records(const SamplingGrid& grid, const std::vector<POVMElement>& measured,
                               const std::vector<MeasurementRecord>& records) {
  Sinogram s{grid.q_axis, grid.theta_axis, RMatrix::Zero(grid.q_axis.size(), grid.theta_axis.size())};
  std::vector<char> seen(grid.q_axis.size() * grid.theta_axis.size(), 0);
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const auto& c = measured[i].quadrature_coords.at(0);
    const int a = axis_index(grid.q_axis, c.q);
    const int b = axis_index(grid.theta_axis, c.theta);
    if (a < 0 || b < 0) throw DomainError("sinogram: element '" + measured[i].id + "' is not on the grid axes");
    s.values(a, b) = records[i].frequency / measured[i].weight;
    seen[a * grid.theta_axis.size() + b] = 1;
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw ConfigError("irt: the measured subset must cover the whole quadrature grid");
  return s;
}

std::string full_precision(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

} // namespace

SamplingGrid GridSpec::build(int modes) const {
  if (kind == PovmKind::coherent) {
    if (z_count < 2) throw ConfigError("grid: z_count must be >= 2");
    return SamplingGrid::coherent(modes, z_min, z_max, z_count);
  }
  if (q_count < 2 || theta_count < 1) throw ConfigError("grid: need q_count >= 2 and theta_count >= 1");
  if (theta_inclusive) {
    if (theta_count < 2) throw ConfigError("grid: inclusive angles need theta_count >= 2");
    return SamplingGrid::quadrature_inclusive(modes, q_min, q_max, q_count, kPi / (theta_count - 1), kPi);
  }
  return SamplingGrid::quadrature(modes, q_min, q_max, q_count, theta_count);
}

std::string to_string(Method m) {
  switch (m) {
    case Method::sdp: return "sdp";
    case Method::sdp_biased: return "sdp_biased";
    case Method::irt: return "irt";
  }
  return "sdp";
}

Method method_from_string(const std::string& name) {
  if (name == "sdp") return Method::sdp;
  if (name == "sdp_biased") return Method::sdp_biased;
  if (name == "irt") return Method::irt;
  throw ConfigError("unknown method '" + name + "' (sdp, sdp_biased, irt)");
}

void RunConfig::validate() const {
  trunc.validate();
  const StateSpec s = state.resolved();
  if (s.required_modes() != 0 && s.required_modes() != trunc.modes)
    throw ConfigError("state " + to_string(s.kind) + " needs " + std::to_string(s.required_modes()) + " modes");
  if (!(max_discarded_weight >= 0.0)) throw ConfigError("max_discarded_weight must be >= 0");
  const SamplingGrid g = grid.build(trunc.modes);
  if (subset_size < 1) throw ConfigError("subset_size must be >= 1");
  if (static_cast<std::size_t>(subset_size) > g.cardinality())
    throw ConfigError("subset_size " + std::to_string(subset_size) + " exceeds the grid cardinality " +
                      std::to_string(g.cardinality()));
  if (probe_count < 0) throw ConfigError("probe_count must be >= 0");
  noise.validate();
  solver.validate();
  if (!(irt_cutoff_kc > 0.0)) throw ConfigError("irt_cutoff_kc must be positive");
  io::parse_axis(phase_space_axis);
  if (outputs.empty()) throw ConfigError("outputs directory must be set");
  if (method == Method::irt) {
    if (trunc.modes != 1) throw ConfigError("irt is single-mode only");
    if (grid.kind != PovmKind::quadrature) throw ConfigError("irt needs a quadrature grid");
    if (static_cast<std::size_t>(subset_size) != g.cardinality())
      throw ConfigError("irt needs the whole grid measured (subset_size = cardinality)");
  }
}

json to_json(const RunConfig& c) {
  return {{"state", io::to_json(c.state.resolved())},
          {"trunc", io::to_json(c.trunc)},
          {"max_discarded_weight", c.max_discarded_weight},
          {"grid", grid_spec_json(c.grid)},
          {"subset_size", c.subset_size},
          {"subset_seed", c.subset_seed},
          {"noise", io::to_json(c.noise)},
          {"method", to_string(c.method)},
          {"solver", solver_json(c.solver)},
          {"probe_count", c.probe_count},
          {"probe_seed", c.probe_seed},
          {"irt_cutoff_kc", c.irt_cutoff_kc},
          {"phase_space_axis", c.phase_space_axis},
          {"materialize_povm", c.materialize_povm},
          {"outputs", c.outputs.string()}};
}

RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  try {
    if (auto it = j.find("state"); it != j.end()) c.state = io::state_spec_from_json(*it);
    if (auto it = j.find("trunc"); it != j.end()) {
      c.trunc.cutoff_n = get_or(*it, "cutoff_n", c.trunc.cutoff_n);
      c.trunc.modes = get_or(*it, "modes", c.trunc.modes);
    }
    c.max_discarded_weight = get_or(j, "max_discarded_weight", c.max_discarded_weight);
    if (auto it = j.find("grid"); it != j.end()) c.grid = grid_spec_from_json(*it);
    c.subset_size = get_or(j, "subset_size", c.subset_size);
    c.subset_seed = get_or(j, "subset_seed", c.subset_seed);
    if (auto it = j.find("noise"); it != j.end()) {
      c.noise.enabled = get_or(*it, "enabled", c.noise.enabled);
      c.noise.snr_percent = get_or(*it, "snr_percent", c.noise.snr_percent);
      c.noise.seed = get_or(*it, "seed", c.noise.seed);
    }
    if (auto it = j.find("method"); it != j.end()) c.method = method_from_string(it->get<std::string>());
    if (auto it = j.find("solver"); it != j.end()) c.solver = solver_from_json(*it);
    c.probe_count = get_or(j, "probe_count", c.probe_count);
    c.probe_seed = get_or(j, "probe_seed", c.probe_seed);
    c.irt_cutoff_kc = get_or(j, "irt_cutoff_kc", c.irt_cutoff_kc);
    c.phase_space_axis = get_or(j, "phase_space_axis", c.phase_space_axis);
    c.materialize_povm = get_or(j, "materialize_povm", c.materialize_povm);
    c.outputs = get_or(j, "outputs", c.outputs.string());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  } catch (const IoError& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  return c;
}

void SweepConfig::validate() const {
  if (subset_sizes.empty()) throw ConfigError("sweep: subset_sizes is empty");
  for (std::size_t i = 1; i < subset_sizes.size(); ++i)
    if (subset_sizes[i] <= subset_sizes[i - 1]) throw ConfigError("sweep: subset_sizes must be strictly increasing");
  if (repeats < 1) throw ConfigError("sweep: repeats must be >= 1");
  if (base.noise.enabled && repeats < 3) throw ConfigError("sweep: noisy sweeps need repeats >= 3");
  RunConfig probe = base;
  for (int size : subset_sizes) {
    probe.subset_size = size;
    probe.validate();
  }
}

json to_json(const SweepConfig& c) {
  return {{"base", to_json(c.base)}, {"subset_sizes", c.subset_sizes}, {"repeats", c.repeats}};
}

SweepConfig sweep_config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("sweep config must be a JSON object");
  SweepConfig c;
  if (auto it = j.find("base"); it != j.end()) c.base = run_config_from_json(*it);
  try {
    c.subset_sizes = get_or(j, "subset_sizes", c.subset_sizes);
    c.repeats = get_or(j, "repeats", c.repeats);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep config: ") + e.what());
  }
  return c;
}

json to_json(const RunMetrics& m, bool timing) {
  json j = {{"fidelity", m.fidelity},
            {"trace_distance", m.trace_distance},
            {"negativity", m.negativity ? json(*m.negativity) : json(nullptr)},
            {"entropy", m.entropy ? json(*m.entropy) : json(nullptr)},
            {"status", m.status},
            {"iterations", m.iterations},
            {"objective", m.objective},
            {"primal_residual", m.primal_residual},
            {"dual_residual", m.dual_residual},
            {"gap", m.gap}};
  if (timing) {
    j["solve_seconds"] = m.solve_seconds;
    j["wall_seconds"] = m.wall_seconds;
  }
  if (m.min_diagonal) {
    j["min_diagonal"] = *m.min_diagonal;
    j["negative_diagonal"] = m.negative_diagonal;
  }
  return j;
}

std::vector<std::size_t> draw_subset(std::size_t cardinality, std::size_t count, std::uint64_t seed) {
  if (count > cardinality) throw ConfigError("subset larger than the grid");
  std::vector<std::size_t> idx(cardinality);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

RunArtifacts execute(const RunConfig& config) {
  const auto start = Clock::now();
  stage("config", [&] { config.validate(); return 0; });

  DensityMatrix target = stage("state", [&] {
    BuildOptions opts;
    opts.max_discarded_weight = config.max_discarded_weight;
    return build_state(config.state, config.trunc, opts);
  });
  RunArtifacts a{target, {}, {}, {}, std::nullopt, std::nullopt, std::nullopt, std::nullopt, {}};

  const SamplingGrid grid = config.grid.build(config.trunc.modes);
  stage("povm", [&] {
    const auto chosen = draw_subset(grid.cardinality(), static_cast<std::size_t>(config.subset_size), config.subset_seed);
    a.measured = grid_elements(grid, chosen, config.trunc);
    const std::size_t spare = grid.cardinality() - chosen.size();
    if (config.probe_count > 0 && spare >= static_cast<std::size_t>(config.probe_count)) {
      std::vector<std::size_t> rest;
      rest.reserve(spare);
      std::size_t k = 0;
      for (std::size_t f = 0; f < grid.cardinality(); ++f) {
        if (k < chosen.size() && chosen[k] == f) {
          ++k;
          continue;
        }
        rest.push_back(f);
      }
      std::vector<std::size_t> pick;
      for (std::size_t p : draw_subset(rest.size(), static_cast<std::size_t>(config.probe_count), config.probe_seed))
        pick.push_back(rest[p]);
      a.probes = grid_elements(grid, pick, config.trunc);
    }
    return 0;
  });

  a.records = stage("simulate", [&] { return simulate(a.target, a.measured, config.noise); });

  RunMetrics& m = a.metrics;
  stage("reconstruct", [&] {
    if (config.method == Method::irt) {
      a.sinogram = sinogram_from_records(grid, a.measured, a.records);
      const auto axis = io::parse_axis(config.phase_space_axis);
      a.irt_wigner = inverse_radon(*a.sinogram, KernelConfig{config.irt_cutoff_kc}, axis, axis);
      a.irt_rho = density_from_wigner(*a.irt_wigner, config.trunc);
      return 0;
    }
    SolverConfig solver = config.solver;
    solver.maxent = config.method == Method::sdp && config.solver.maxent;
    a.reconstruction = solve(assemble(a.measured, a.records), solver);
    return 0;
  });

  stage("metrics", [&] {
    if (a.reconstruction) {
      const auto& r = *a.reconstruction;
      m.fidelity = fidelity(r.rho, a.target);
      m.trace_distance = trace_distance(r.rho.entries(), a.target.entries());
      if (config.trunc.modes == 2) m.negativity = negativity(r.rho);
      if (!a.probes.empty()) m.entropy = shannon_entropy_probe(r.rho, a.probes);
      m.status = to_string(r.status);
      m.iterations = r.iterations;
      m.objective = r.objective;
      m.primal_residual = r.primal_residual;
      m.dual_residual = r.dual_residual;
      m.gap = r.gap;
      m.solve_seconds = r.runtime_seconds;
    } else {
      const CMatrix& raw = *a.irt_rho;
      m.min_diagonal = raw.diagonal().real().minCoeff();
      m.negative_diagonal = *m.min_diagonal < 0.0;
      const DensityMatrix projected = DensityMatrix::nearest_state(config.trunc, raw);
      m.fidelity = fidelity(projected, a.target);
      m.trace_distance = trace_distance(raw, a.target.entries());
      m.status = "n/a";
    }
    return 0;
  });
  m.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return a;
}

Manifest run(const RunConfig& config) {
  stage("config", [&] { config.validate(); return 0; });
  const auto out = config.outputs;
  stage("outputs", [&] {
    std::filesystem::create_directories(out);
    return 0;
  });
  RunArtifacts a = execute(config);
  const SamplingGrid grid = config.grid.build(config.trunc.modes);

  Manifest manifest;
  auto emit = [&](const std::string& name, const std::function<void(const std::filesystem::path&)>& writer) {
    const auto path = out / name;
    stage("write " + name, [&] { writer(path); return 0; });
    manifest.files.push_back({name, path, io::sha256_file(path)});
  };

  emit("config.json", [&](const auto& p) { io::write_json(p, to_json(config)); });
  emit("state.json", [&](const auto& p) { io::write_json(p, io::to_json(a.target)); });
  emit("povm.json", [&](const auto& p) {
    io::write_json(p, io::to_json(io::PovmFile{grid, config.trunc, a.measured}, config.materialize_povm));
  });
  if (!a.probes.empty())
    emit("probes.json", [&](const auto& p) { io::write_json(p, io::to_json(io::PovmFile{grid, config.trunc, a.probes}, false)); });
  emit("data.jsonl", [&](const auto& p) {
    io::write_dataset(p, io::Dataset{{config.state.resolved(), config.trunc, grid, config.noise, io::creation_timestamp()},
                                     a.records});
  });

  const auto axis = io::parse_axis(config.phase_space_axis);
  if (a.reconstruction) {
    const auto& r = *a.reconstruction;
    emit("rho.json", [&](const auto& p) { io::write_json(p, io::to_json(r.rho)); });
    emit("solver.json", [&](const auto& p) {
      io::write_json(p, {{"status", to_string(r.status)},
                         {"iterations", r.iterations},
                         {"objective", r.objective},
                         {"deltas", std::vector<double>(r.deltas.data(), r.deltas.data() + r.deltas.size())},
                         {"delta_maxent", r.delta_maxent},
                         {"primal_residual", r.primal_residual},
                         {"dual_residual", r.dual_residual},
                         {"gap", r.gap},
                         {"projection_distance", r.projection_distance},
                         {"raw_min_eigenvalue", r.raw_min_eigenvalue}});
    });
    const PhaseSpaceGrid w = config.trunc.modes == 1 ? wigner_grid(r.rho, axis, axis)
                                                     : wigner_two_mode_slice(r.rho, ModeSlice{1, 0.0, 0.0}, axis, axis);
    emit("wigner.csv", [&](const auto& p) { io::write_text(p, io::phase_space_csv(w)); });
  } else {
    emit("sinogram.csv", [&](const auto& p) { io::write_text(p, io::sinogram_csv(*a.sinogram)); });
    emit("wigner_irt.csv", [&](const auto& p) { io::write_text(p, io::phase_space_csv(*a.irt_wigner)); });
    emit("rho_irt.json", [&](const auto& p) { io::write_json(p, io::matrix_to_json(*a.irt_rho, config.trunc)); });
  }
  emit("metrics.json", [&](const auto& p) { io::write_json(p, to_json(a.metrics, false)); });

  json files = json::array();
  for (const auto& f : manifest.files) files.push_back({{"name", f.name}, {"path", f.path.string()}, {"sha256", f.sha256}});
  manifest.metrics = a.metrics;
  manifest.json = {{"files", files}, {"metrics", to_json(a.metrics)}, {"created", io::creation_timestamp()}};
  io::write_json(out / "manifest.json", manifest.json);
  return manifest;
}

SweepResult sweep(const SweepConfig& config, int jobs) {
  config.validate();
  SweepResult result;
  for (int size : config.subset_sizes)
    for (int r = 0; r < config.repeats; ++r) result.cells.push_back({size, r, config.base.subset_seed + r, std::nullopt, {}});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < result.cells.size(); i = next++) {
      SweepCell& cell = result.cells[i];
      RunConfig c = config.base;
      c.subset_size = cell.subset_size;
      c.subset_seed = config.base.subset_seed + cell.repeat;
      c.noise.seed = config.base.noise.seed + cell.repeat;
      try {
        cell.metrics = execute(c).metrics;
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(result.cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int size : config.subset_sizes) {
    SweepRow row{size, 0.0, 0.0, 0, 0};
    std::vector<double> f;
    for (const auto& c : result.cells)
      if (c.subset_size == size) {
        if (c.metrics)
          f.push_back(c.metrics->fidelity);
        else
          ++row.failures;
      }
    row.runs = static_cast<int>(f.size());
    if (!f.empty()) {
      row.mean_fidelity = std::accumulate(f.begin(), f.end(), 0.0) / f.size();
      double ss = 0.0;
      for (double v : f) ss += (v - row.mean_fidelity) * (v - row.mean_fidelity);
      row.std_fidelity = f.size() > 1 ? std::sqrt(ss / (f.size() - 1)) : 0.0;
    } else {
      row.mean_fidelity = row.std_fidelity = std::nan("");
    }
    result.rows.push_back(row);
  }
  return result;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "subset_size,mean_fidelity,std_fidelity,runs,failures\n";
  for (const auto& row : r.rows)
    os << row.subset_size << "," << full_precision(row.mean_fidelity) << "," << full_precision(row.std_fidelity) << ","
       << row.runs << "," << row.failures << "\n";
  return os.str();
}

std::string sweep_cells_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "subset_size,repeat,seed,fidelity,negativity,entropy,status,error\n";
  for (const auto& c : r.cells) {
    os << c.subset_size << "," << c.repeat << "," << c.seed << ",";
    if (c.metrics) {
      os << full_precision(c.metrics->fidelity) << ","
         << (c.metrics->negativity ? full_precision(*c.metrics->negativity) : "") << ","
         << (c.metrics->entropy ? full_precision(*c.metrics->entropy) : "") << "," << c.metrics->status << ",";
    } else {
      os << ",,,failed,";
    }
    std::string err = c.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    os << err << "\n";
  }
  return os.str();
}

} // namespace cvtomo
