#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "cvtomo/fock.hpp"
#include "cvtomo/measure.hpp"
#include "cvtomo/povm.hpp"
#include "cvtomo/radon.hpp"
#include "cvtomo/wigner.hpp"

namespace cvtomo::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

json to_json(const TruncationConfig& t);
TruncationConfig truncation_from_json(const json& j);

json to_json(const StateSpec& s);
StateSpec state_spec_from_json(const json& j);

json to_json(const SamplingGrid& g);
SamplingGrid sampling_grid_from_json(const json& j);

json to_json(const NoiseConfig& n);
NoiseConfig noise_from_json(const json& j);

// {dim, cutoff_n, modes, re, im}; re/im are row-major flat arrays.
json matrix_to_json(const CMatrix& m, const TruncationConfig& t);
CMatrix matrix_from_json(const json& j, TruncationConfig* trunc = nullptr);
json to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

struct PovmFile {
  SamplingGrid grid;
  TruncationConfig trunc;
  std::vector<POVMElement> elements;
};

// Header {grid, trunc, count} plus the element array; matrices only with `materialize`.
json to_json(const PovmFile& f, bool materialize);
// Vectors are always rebuilt from coordinates; a stored matrix is checked against them.
PovmFile povm_file_from_json(const json& j);

struct DatasetHeader {
  StateSpec state_spec;
  TruncationConfig trunc;
  SamplingGrid grid;
  NoiseConfig noise;
  std::string created;
};

struct Dataset {
  DatasetHeader header;
  std::vector<MeasurementRecord> records;
};

json to_json(const MeasurementRecord& r);
MeasurementRecord record_from_json(const json& j);

// UTC timestamp from SOURCE_DATE_EPOCH when set, else the current time.
std::string creation_timestamp();

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

void write_dataset(const fs::path& path, const Dataset& d);
Dataset read_dataset(const fs::path& path);

// First row: "q\p" then p values; then one row per q: q, W(q, p...).
std::string phase_space_csv(const PhaseSpaceGrid& g);
PhaseSpaceGrid phase_space_from_csv(const std::string& text);
json to_json(const PhaseSpaceGrid& g);

// Row 1: q_axis, row 2: theta_axis, then one row of values per q.
std::string sinogram_csv(const Sinogram& s);
Sinogram sinogram_from_csv(const std::string& text);

// "min:step:max"
std::vector<double> parse_axis(const std::string& spec);

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const fs::path& path);

} // namespace cvtomo::io
