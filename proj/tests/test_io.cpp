#include "doctest.h"

#include <cstdlib>
#include <filesystem>

#include "cvtomo/errors.hpp"
#include "cvtomo/io.hpp"

using namespace cvtomo;
namespace fs = std::filesystem;

namespace {
fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cvtomo_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
} // namespace

TEST_CASE("sha256 of known content") {
  const fs::path dir = scratch_dir("sha");
  io::write_text(dir / "abc.txt", "abc");
  CHECK(io::sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  io::write_text(dir / "empty.txt", "");
  CHECK(io::sha256_file(dir / "empty.txt") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK_THROWS_AS(io::sha256_file(dir / "missing"), IoError);
}

TEST_CASE("configuration values round trip through JSON") {
  const TruncationConfig t{7, 2};
  CHECK(io::truncation_from_json(io::to_json(t)).cutoff_n == 7);
  const StateSpec s{StateKind::coherent, {{"z_re", 0.25}, {"z_im", -1.0}}};
  const StateSpec s2 = io::state_spec_from_json(io::to_json(s));
  CHECK(s2.kind == StateKind::coherent);
  CHECK(s2.params.at("z_im") == -1.0);
  const SamplingGrid g = SamplingGrid::quadrature_inclusive(2, -5, 5, 7, kPi / 4, kPi);
  const SamplingGrid g2 = io::sampling_grid_from_json(io::to_json(g));
  CHECK(g2.cardinality() == g.cardinality());
  CHECK(g2.theta_axis == g.theta_axis);
  const NoiseConfig n{true, 5.0, 99};
  const NoiseConfig n2 = io::noise_from_json(io::to_json(n));
  CHECK(n2.enabled);
  CHECK(n2.seed == 99);
  CHECK(n2.snr_percent == 5.0);
}

TEST_CASE("density matrices round trip exactly") {
  const TruncationConfig t{10, 1};
  const DensityMatrix rho = build_state(StateSpec{StateKind::coherent, {{"z_re", 0.3}, {"z_im", 0.8}}}, t);
  const DensityMatrix back = io::density_from_json(io::json::parse(io::to_json(rho).dump()));
  CHECK(back.entries() == rho.entries());
  CHECK(back.trunc().cutoff_n == 10);
  io::json broken = io::to_json(rho);
  broken["re"].erase(0);
  CHECK_THROWS(io::density_from_json(broken));
}

TEST_CASE("POVM files regenerate and verify elements") {
  const TruncationConfig t{10, 1};
  const SamplingGrid g = SamplingGrid::quadrature(1, -5, 5, 11, 4);
  const auto elements = grid_elements(g, {0, 5, 17, 43}, t);
  const io::json j = io::to_json(io::PovmFile{g, t, elements}, true);
  const io::PovmFile f = io::povm_file_from_json(io::json::parse(j.dump()));
  REQUIRE(f.elements.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(f.elements[i].id == elements[i].id);
    CHECK((f.elements[i].vector - elements[i].vector).norm() < 1e-15);
  }
  io::json tampered = j;
  tampered["elements"][1]["matrix"]["re"][0] = 5.0;
  CHECK_THROWS(io::povm_file_from_json(tampered));
  CHECK_FALSE(io::to_json(io::PovmFile{g, t, elements}, false)["elements"][0].contains("matrix"));
}

TEST_CASE("datasets round trip") {
  const fs::path dir = scratch_dir("data");
  io::Dataset d;
  d.header = {StateSpec{StateKind::fock, {{"n", 1}}}, TruncationConfig{10, 1}, SamplingGrid::quadrature(1, -5, 5, 11, 4),
              NoiseConfig{true, 10.0, 3}, "2020-01-01T00:00:00Z"};
  d.records = {{"a", 0.125, 0.1, 12}, {"b", 0.0, 0.0, 0}};
  io::write_dataset(dir / "d.jsonl", d);
  const io::Dataset back = io::read_dataset(dir / "d.jsonl");
  CHECK(back.header.created == d.header.created);
  CHECK(back.header.noise.seed == 3);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].frequency == 0.125);
  CHECK(back.records[0].counts == 12);
  CHECK(back.records[1].element_id == "b");
  CHECK_THROWS_AS(io::read_dataset(dir / "none.jsonl"), IoError);
}

TEST_CASE("creation timestamp honours SOURCE_DATE_EPOCH") {
  setenv("SOURCE_DATE_EPOCH", "0", 1);
  CHECK(io::creation_timestamp() == "1970-01-01T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
  CHECK(io::creation_timestamp().size() == 20);
}

TEST_CASE("phase-space and sinogram CSV") {
  PhaseSpaceGrid w;
  w.q_axis = {-0.5, 0.0, 0.5};
  w.p_axis = {1.0, 2.0};
  w.values.resize(3, 2);
  w.values << 0.1, -0.2, 0.3, 1e-17, 5.5, 6.25;
  const PhaseSpaceGrid back = io::phase_space_from_csv(io::phase_space_csv(w));
  CHECK(back.q_axis == w.q_axis);
  CHECK(back.p_axis == w.p_axis);
  CHECK(back.values == w.values);

  Sinogram s;
  s.q_axis = {-1.0, 0.0, 1.0};
  s.theta_axis = {0.0, kPi / 2};
  s.values.resize(3, 2);
  s.values << 0.1, 0.2, 0.3, 0.4, 0.5, 0.6;
  const Sinogram sb = io::sinogram_from_csv(io::sinogram_csv(s));
  CHECK(sb.theta_axis == s.theta_axis);
  CHECK(sb.values == s.values);
  CHECK_THROWS(io::sinogram_from_csv("q_axis,1,2\n"));
}

TEST_CASE("axis strings") {
  const auto a = io::parse_axis("-5:0.1:5");
  CHECK(a.size() == 101);
  CHECK(a.back() == doctest::Approx(5.0));
  CHECK_THROWS_AS(io::parse_axis("1:2"), ConfigError);
  CHECK_THROWS_AS(io::parse_axis("1:0:2"), ConfigError);
  CHECK_THROWS_AS(io::parse_axis("a:b:c"), ConfigError);
}
