// Command-line front end: state/POVM generation, simulation, reconstruction,
// Wigner evaluation, metrics, single runs and sweeps.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cvtomo/errors.hpp"
#include "cvtomo/metrics.hpp"
#include "cvtomo/pipeline.hpp"

using namespace cvtomo;
namespace fs = std::filesystem;
using io::json;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNonOptimal = 2, kInfeasible = 3 };

int exit_for(const std::string& status) {
  if (status == "infeasible") return kInfeasible;
  if (status == "max_iters") return kNonOptimal;
  return kOk;
}

struct Globals {
  std::string config;
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

RunConfig base_config(const Globals& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : run_config_from_json(io::read_json(g.config));
  if (!g.out_dir.empty()) c.outputs = g.out_dir;
  if (g.seed) {
    c.subset_seed = *g.seed;
    c.noise.seed = *g.seed;
  }
  return c;
}

fs::path output_path(const Globals& g, const std::string& given, const std::string& fallback) {
  if (!given.empty()) return given;
  return fs::path(g.out_dir.empty() ? "." : g.out_dir) / fallback;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("parameter '" + item + "' must be key=value");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::logic_error&) {
      throw ConfigError("parameter '" + item + "' has a non-numeric value");
    }
  }
  return out;
}

std::pair<double, double> parse_pair(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("expected 'q,p', got '" + s + "'");
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::logic_error&) {
    throw ConfigError("expected two numbers in '" + s + "'");
  }
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-variable state tomography by semidefinite programming"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON run or sweep configuration");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs");
  app.add_option("--jobs", g.jobs, "Concurrent sweep cells")->check(CLI::PositiveNumber);
  app.add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& s) { g.seed = s; }, "Subset and noise seed");

  // gen-state
  auto* gen_state = app.add_subcommand("gen-state", "Build a target density matrix");
  std::string gs_kind, gs_out;
  std::vector<std::string> gs_params;
  std::optional<int> gs_cutoff, gs_modes;
  std::optional<double> gs_max_discarded;
  gen_state->add_option("--kind", gs_kind, "fock, coherent, noon, hermite_gauss, squeezed_vacuum, dephased_cat");
  gen_state->add_option("--param", gs_params, "Parameter key=value (repeatable)");
  gen_state->add_option("--cutoff", gs_cutoff, "Fock cutoff n");
  gen_state->add_option("--modes", gs_modes, "Number of modes");
  gen_state->add_option("--max-discarded", gs_max_discarded, "Largest tolerated truncation loss");
  gen_state->add_option("--out", gs_out, "Output JSON");

  // gen-povm
  auto* gen_povm = app.add_subcommand("gen-povm", "Build a sampled POVM set");
  std::string gp_kind, gp_out;
  std::optional<int> gp_modes, gp_cutoff, gp_q_count, gp_theta_count, gp_z_count, gp_subset;
  std::optional<double> gp_q_min, gp_q_max, gp_z_min, gp_z_max;
  bool gp_inclusive = false, gp_materialize = false;
  gen_povm->add_option("--kind", gp_kind, "quadrature (homodyne) or coherent (heterodyne)");
  gen_povm->add_option("--modes", gp_modes);
  gen_povm->add_option("--cutoff", gp_cutoff);
  gen_povm->add_option("--q-min", gp_q_min);
  gen_povm->add_option("--q-max", gp_q_max);
  gen_povm->add_option("--q-count", gp_q_count);
  gen_povm->add_option("--theta-count", gp_theta_count);
  gen_povm->add_flag("--theta-inclusive", gp_inclusive, "Angles 0..pi including pi");
  gen_povm->add_option("--z-min", gp_z_min);
  gen_povm->add_option("--z-max", gp_z_max);
  gen_povm->add_option("--z-count", gp_z_count);
  gen_povm->add_option("--subset", gp_subset, "Random subset size (default: whole grid)");
  gen_povm->add_flag("--materialize", gp_materialize, "Write element matrices");
  gen_povm->add_option("--out", gp_out);

  // simulate
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate measurement frequencies");
  std::string sm_state, sm_povm, sm_out, sm_sino;
  std::optional<double> sm_snr;
  std::optional<std::uint64_t> sm_noise_seed;
  bool sm_noiseless = false;
  simulate_cmd->add_option("--state", sm_state)->required();
  simulate_cmd->add_option("--povm", sm_povm)->required();
  simulate_cmd->add_option("--snr", sm_snr, "Poisson SNR in percent (enables noise)");
  simulate_cmd->add_option("--noise-seed", sm_noise_seed);
  simulate_cmd->add_flag("--noiseless", sm_noiseless, "Exact expectations");
  simulate_cmd->add_option("--out", sm_out);
  simulate_cmd->add_option("--sinogram-out", sm_sino, "Also write the sinogram CSV (single-mode full quadrature grid)");

  // reconstruct-sdp
  auto* rec_sdp = app.add_subcommand("reconstruct-sdp", "Max-entropy SDP reconstruction");
  std::string rs_data, rs_povm, rs_alg = "ip", rs_out, rs_report;
  std::optional<double> rs_tol;
  std::optional<int> rs_max_iters;
  bool rs_no_maxent = false, rs_verbose = false;
  rec_sdp->add_option("--data", rs_data)->required();
  rec_sdp->add_option("--povm", rs_povm)->required();
  rec_sdp->add_option("--algorithm", rs_alg)->check(CLI::IsMember({"ip", "admm"}));
  rec_sdp->add_option("--tol", rs_tol, "Primal, dual and gap tolerance");
  rec_sdp->add_option("--max-iters", rs_max_iters);
  rec_sdp->add_flag("--no-maxent", rs_no_maxent, "Drop the max-entropy line");
  rec_sdp->add_option("--out", rs_out);
  rec_sdp->add_option("--report", rs_report, "Solver report JSON");
  rec_sdp->add_flag("--verbose", rs_verbose, "Iteration log on stderr");

  // reconstruct-irt
  auto* rec_irt = app.add_subcommand("reconstruct-irt", "Inverse Radon baseline");
  std::string ri_sino, ri_grid = "-5:0.1:5", ri_out, ri_rho_out;
  double ri_kc = 4.0;
  int ri_cutoff = 10;
  rec_irt->add_option("--sinogram", ri_sino)->required();
  rec_irt->add_option("--kc", ri_kc);
  rec_irt->add_option("--grid", ri_grid, "min:step:max for both q and p");
  rec_irt->add_option("--cutoff", ri_cutoff);
  rec_irt->add_option("--out", ri_out);
  rec_irt->add_option("--rho-out", ri_rho_out);

  // wigner
  auto* wigner_cmd = app.add_subcommand("wigner", "Wigner function on a grid");
  std::string wg_rho, wg_grid = "-5:0.1:5", wg_out, wg_json, wg_fixed = "0,0";
  int wg_plot_mode = 1;
  bool wg_full = false;
  wigner_cmd->add_option("--rho", wg_rho)->required();
  wigner_cmd->add_option("--grid", wg_grid);
  wigner_cmd->add_option("--plot-mode", wg_plot_mode)->check(CLI::IsMember({1, 2}));
  wigner_cmd->add_option("--fixed", wg_fixed, "q,p of the other mode (two modes)");
  wigner_cmd->add_flag("--full", wg_full, "Full four-dimensional table (two modes)");
  wigner_cmd->add_option("--out", wg_out);
  wigner_cmd->add_option("--json-out", wg_json);

  // metrics
  auto* metrics_cmd = app.add_subcommand("metrics", "Fidelity, negativity, entropy");
  std::string mt_rho, mt_target, mt_probes, mt_out;
  metrics_cmd->add_option("--rho", mt_rho)->required();
  metrics_cmd->add_option("--target", mt_target);
  metrics_cmd->add_option("--probes", mt_probes, "POVM file of probe elements");
  metrics_cmd->add_option("--out", mt_out);

  // run / sweep
  auto* run_cmd = app.add_subcommand("run", "Generate, simulate, reconstruct, evaluate");
  bool print_config = false;
  run_cmd->add_flag("--print-config", print_config, "Print the resolved configuration and exit");
  auto* sweep_cmd = app.add_subcommand("sweep", "Fidelity versus measurement count");
  sweep_cmd->add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*gen_state) {
      RunConfig c = base_config(g);
      if (!gs_kind.empty()) c.state = StateSpec{state_kind_from_string(gs_kind), {}};
      if (!gs_params.empty()) c.state.params = parse_params(gs_params);
      if (gs_cutoff) c.trunc.cutoff_n = *gs_cutoff;
      if (gs_modes)
        c.trunc.modes = *gs_modes;
      else if (!gs_kind.empty())
        c.trunc.modes = std::max(1, c.state.resolved().required_modes());
      BuildOptions opts;
      opts.max_discarded_weight = gs_max_discarded.value_or(c.max_discarded_weight);
      const DensityMatrix rho = build_state(c.state, c.trunc, opts);
      io::write_json(output_path(g, gs_out, "state.json"), io::to_json(rho));
      std::cout << "discarded_weight " << rho.discarded_weight() << "\n";
      return kOk;
    }
    if (*gen_povm) {
      RunConfig c = base_config(g);
      if (!gp_kind.empty()) c.grid.kind = povm_kind_from_string(gp_kind);
      if (gp_modes) c.trunc.modes = *gp_modes;
      if (gp_cutoff) c.trunc.cutoff_n = *gp_cutoff;
      if (gp_q_min) c.grid.q_min = *gp_q_min;
      if (gp_q_max) c.grid.q_max = *gp_q_max;
      if (gp_q_count) c.grid.q_count = *gp_q_count;
      if (gp_theta_count) c.grid.theta_count = *gp_theta_count;
      if (gp_inclusive) c.grid.theta_inclusive = true;
      if (gp_z_min) c.grid.z_min = *gp_z_min;
      if (gp_z_max) c.grid.z_max = *gp_z_max;
      if (gp_z_count) c.grid.z_count = *gp_z_count;
      c.trunc.validate();
      const SamplingGrid grid = c.grid.build(c.trunc.modes);
      std::vector<POVMElement> elements;
      if (gp_subset) {
        if (*gp_subset < 1) throw ConfigError("--subset must be >= 1");
        elements = grid_elements(grid, draw_subset(grid.cardinality(), static_cast<std::size_t>(*gp_subset), c.subset_seed),
                                 c.trunc);
      } else {
        elements = all_grid_elements(grid, c.trunc);
      }
      io::write_json(output_path(g, gp_out, "povm.json"), io::to_json(io::PovmFile{grid, c.trunc, elements}, gp_materialize));
      const CompletenessReport rep = completeness_report(elements, c.trunc);
      std::cout << "elements " << elements.size() << " completeness_residual " << rep.residual << " max_eigenvalue_of_sum "
                << rep.max_eigenvalue_of_sum << (rep.dominated() ? "" : " (sum exceeds identity)") << "\n";
      return kOk;
    }
    if (*simulate_cmd) {
      RunConfig c = base_config(g);
      const DensityMatrix rho = io::density_from_json(io::read_json(sm_state));
      const io::PovmFile povm = io::povm_file_from_json(io::read_json(sm_povm));
      if (povm.trunc != rho.trunc()) throw ConfigError("state and POVM truncations differ");
      NoiseConfig noise = c.noise;
      if (sm_noiseless) noise.enabled = false;
      if (sm_snr) {
        noise.enabled = true;
        noise.snr_percent = *sm_snr;
      }
      if (sm_noise_seed) noise.seed = *sm_noise_seed;
      noise.validate();
      io::Dataset d;
      d.header = {c.state.resolved(), rho.trunc(), povm.grid, noise, io::creation_timestamp()};
      d.records = simulate(rho, povm.elements, noise);
      io::write_dataset(output_path(g, sm_out, "data.jsonl"), d);
      if (!sm_sino.empty()) {
        if (rho.trunc().modes != 1 || povm.grid.kind != PovmKind::quadrature)
          throw ConfigError("--sinogram-out needs a single-mode quadrature POVM");
        Sinogram s{povm.grid.q_axis, povm.grid.theta_axis, RMatrix::Zero(povm.grid.q_axis.size(), povm.grid.theta_axis.size())};
        if (povm.elements.size() != povm.grid.cardinality()) throw ConfigError("--sinogram-out needs the whole grid");
        for (std::size_t i = 0; i < povm.elements.size(); ++i) {
          const auto& pt = povm.elements[i].quadrature_coords.at(0);
          const auto a = std::lower_bound(s.q_axis.begin(), s.q_axis.end(), pt.q - 1e-9) - s.q_axis.begin();
          const auto b = std::lower_bound(s.theta_axis.begin(), s.theta_axis.end(), pt.theta - 1e-9) - s.theta_axis.begin();
          s.values(a, b) = d.records[i].frequency / povm.elements[i].weight;
        }
        io::write_text(sm_sino, io::sinogram_csv(s));
      }
      std::cout << "records " << d.records.size() << (noise.enabled ? " noisy" : " noiseless") << "\n";
      return kOk;
    }
    if (*rec_sdp) {
      const io::PovmFile povm = io::povm_file_from_json(io::read_json(rs_povm));
      const io::Dataset data = io::read_dataset(rs_data);
      SolverConfig cfg;
      cfg.algorithm = solver_algorithm_from_string(rs_alg);
      if (rs_tol) cfg.tol_primal = cfg.tol_dual = cfg.tol_gap = *rs_tol;
      if (rs_max_iters) cfg.max_iters = *rs_max_iters;
      cfg.maxent = !rs_no_maxent;
      cfg.verbose = rs_verbose;
      const ReconstructionResult r = solve(assemble(povm.elements, data.records), cfg);
      io::write_json(output_path(g, rs_out, "rho.json"), io::to_json(r.rho));
      const json report = {{"status", to_string(r.status)},        {"iterations", r.iterations},
                           {"objective", r.objective},             {"delta_maxent", r.delta_maxent},
                           {"primal_residual", r.primal_residual}, {"dual_residual", r.dual_residual},
                           {"gap", r.gap},                         {"runtime_seconds", r.runtime_seconds}};
      if (!rs_report.empty()) io::write_json(rs_report, report);
      print_json(report);
      return exit_for(to_string(r.status));
    }
    if (*rec_irt) {
      const Sinogram s = io::sinogram_from_csv(io::read_text(ri_sino));
      const auto axis = io::parse_axis(ri_grid);
      const PhaseSpaceGrid w = inverse_radon(s, KernelConfig{ri_kc}, axis, axis);
      io::write_text(output_path(g, ri_out, "wigner_irt.csv"), io::phase_space_csv(w));
      const TruncationConfig t{ri_cutoff, 1};
      const CMatrix rho = density_from_wigner(w, t);
      io::write_json(output_path(g, ri_rho_out, "rho_irt.json"), io::matrix_to_json(rho, t));
      const double min_diag = rho.diagonal().real().minCoeff();
      print_json({{"min_diagonal", min_diag}, {"negative_diagonal", min_diag < 0.0}, {"trace", rho.trace().real()}});
      return kOk;
    }
    if (*wigner_cmd) {
      const DensityMatrix rho = io::density_from_json(io::read_json(wg_rho));
      const auto axis = io::parse_axis(wg_grid);
      if (wg_full) {
        const PhaseSpaceTensor t = wigner_two_mode_full(rho, axis, axis);
        std::ostringstream os;
        os.precision(17);
        os << "q1,p1,q2,p2,W\n";
        for (std::size_t a = 0; a < axis.size(); ++a)
          for (std::size_t b = 0; b < axis.size(); ++b)
            for (std::size_t c = 0; c < axis.size(); ++c)
              for (std::size_t d = 0; d < axis.size(); ++d)
                os << axis[a] << "," << axis[b] << "," << axis[c] << "," << axis[d] << "," << t.at(a, b, c, d) << "\n";
        io::write_text(output_path(g, wg_out, "wigner_full.csv"), os.str());
        std::cout << "integral " << t.integral() << "\n";
        return kOk;
      }
      PhaseSpaceGrid w;
      if (rho.trunc().modes == 1) {
        w = wigner_grid(rho, axis, axis);
      } else {
        const auto [fq, fp] = parse_pair(wg_fixed);
        w = wigner_two_mode_slice(rho, ModeSlice{wg_plot_mode, fq, fp}, axis, axis);
      }
      for (const auto& warning : w.warnings) std::cerr << "warning: " << warning << "\n";
      io::write_text(output_path(g, wg_out, "wigner.csv"), io::phase_space_csv(w));
      if (!wg_json.empty()) io::write_json(wg_json, io::to_json(w));
      std::cout << "integral " << w.integral() << "\n";
      return kOk;
    }
    if (*metrics_cmd) {
      const DensityMatrix rho = io::density_from_json(io::read_json(mt_rho));
      json m = {{"min_eigenvalue", rho.min_eigenvalue()}, {"rank", rho.rank()}};
      if (!mt_target.empty()) {
        const DensityMatrix target = io::density_from_json(io::read_json(mt_target));
        m["fidelity"] = fidelity(rho, target);
        m["trace_distance"] = trace_distance(rho.entries(), target.entries());
      }
      if (rho.trunc().modes == 2) m["negativity"] = negativity(rho);
      if (!mt_probes.empty())
        m["entropy"] = shannon_entropy_probe(rho, io::povm_file_from_json(io::read_json(mt_probes)).elements);
      if (!mt_out.empty()) io::write_json(mt_out, m);
      print_json(m);
      return kOk;
    }
    if (*run_cmd) {
      const RunConfig c = base_config(g);
      if (print_config) {
        print_json(to_json(c));
        return kOk;
      }
      const Manifest m = run(c);
      print_json(m.json["metrics"]);
      return exit_for(m.metrics.status);
    }
    if (*sweep_cmd) {
      SweepConfig c = g.config.empty() ? SweepConfig{} : sweep_config_from_json(io::read_json(g.config));
      if (!g.out_dir.empty()) c.base.outputs = g.out_dir;
      if (g.seed) {
        c.base.subset_seed = *g.seed;
        c.base.noise.seed = *g.seed;
      }
      if (print_config) {
        print_json(to_json(c));
        return kOk;
      }
      const SweepResult r = sweep(c, g.jobs);
      io::write_text(c.base.outputs / "sweep.csv", sweep_csv(r));
      io::write_text(c.base.outputs / "sweep_cells.csv", sweep_cells_csv(r));
      std::cout << sweep_csv(r);
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
  return kOk;
}
