#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cvtomo/io.hpp"
#include "cvtomo/radon.hpp"
#include "cvtomo/sdp.hpp"

namespace cvtomo {

/// Generative description of a per-mode sampling grid.
struct GridSpec {
  PovmKind kind = PovmKind::quadrature;
  double q_min = -5.0;
  double q_max = 5.0;
  int q_count = 11;
  int theta_count = 4;
  // Angles 0..pi inclusive (theta_count samples) instead of pi k / theta_count.
  bool theta_inclusive = false;
  double z_min = 0.0;
  double z_max = 2.0;
  int z_count = 21;

  SamplingGrid build(int modes) const;
};

enum class Method { sdp, sdp_biased, irt };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct RunConfig {
  StateSpec state{StateKind::noon, {}};
  TruncationConfig trunc{10, 2};
  double max_discarded_weight = 1e-3;
  GridSpec grid;
  int subset_size = 400;
  std::uint64_t subset_seed = 1;
  NoiseConfig noise{true, 10.0, 1};
  Method method = Method::sdp;
  SolverConfig solver;
  // Non-measured elements drawn for the entropy probe (0 disables it).
  int probe_count = 10;
  std::uint64_t probe_seed = 7;
  double irt_cutoff_kc = 4.0;
  std::string phase_space_axis = "-5:0.1:5";
  bool materialize_povm = false;
  std::filesystem::path outputs = "out";

  // Throws ConfigError.
  void validate() const;
};

io::json to_json(const RunConfig& c);
// Missing fields keep their defaults.
RunConfig run_config_from_json(const io::json& j);

struct SweepConfig {
  RunConfig base;
  std::vector<int> subset_sizes{100, 200, 400};
  int repeats = 5;

  void validate() const;
};

io::json to_json(const SweepConfig& c);
SweepConfig sweep_config_from_json(const io::json& j);

struct RunMetrics {
  double fidelity = 0.0;
  double trace_distance = 0.0;
  std::optional<double> negativity;
  std::optional<double> entropy;
  std::string status = "optimal";
  int iterations = 0;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  double solve_seconds = 0.0;
  double wall_seconds = 0.0;
  // IRT only: smallest diagonal entry of the extracted matrix and whether it is negative.
  std::optional<double> min_diagonal;
  bool negative_diagonal = false;
};

// metrics.json leaves the timings out so that reruns reproduce it byte for
// byte; the manifest keeps them.
io::json to_json(const RunMetrics& m, bool timing = true);

struct RunArtifacts {
  DensityMatrix target;
  std::vector<POVMElement> measured;
  std::vector<MeasurementRecord> records;
  std::vector<POVMElement> probes;
  std::optional<ReconstructionResult> reconstruction;
  std::optional<Sinogram> sinogram;
  std::optional<PhaseSpaceGrid> irt_wigner;
  std::optional<CMatrix> irt_rho;
  RunMetrics metrics;
};

// Uniform draw of `count` distinct flat indices out of `cardinality`.
std::vector<std::size_t> draw_subset(std::size_t cardinality, std::size_t count, std::uint64_t seed);

// Every stage in memory, nothing written.
RunArtifacts execute(const RunConfig& config);

struct ManifestEntry {
  std::string name;
  std::filesystem::path path;
  std::string sha256;
};

struct Manifest {
  std::vector<ManifestEntry> files;
  RunMetrics metrics;
  io::json json;
};

// execute() plus all artifacts in config.outputs and manifest.json.
Manifest run(const RunConfig& config);

struct SweepCell {
  int subset_size = 0;
  int repeat = 0;
  std::uint64_t seed = 0;
  std::optional<RunMetrics> metrics;
  std::string error;
};

struct SweepRow {
  int subset_size = 0;
  double mean_fidelity = 0.0;
  double std_fidelity = 0.0;
  int runs = 0;
  int failures = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::vector<SweepRow> rows;
};

// Cells run on up to `jobs` threads; a failing cell is recorded and skipped.
SweepResult sweep(const SweepConfig& config, int jobs);
std::string sweep_csv(const SweepResult& r);
std::string sweep_cells_csv(const SweepResult& r);

} // namespace cvtomo
