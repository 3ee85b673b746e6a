#include "doctest.h"

#include <cmath>
#include <numeric>

#include "cvtomo/errors.hpp"
#include "cvtomo/measure.hpp"

using namespace cvtomo;

namespace {
struct Setup {
  TruncationConfig t{10, 1};
  SamplingGrid g = SamplingGrid::quadrature(1, -5, 5, 21, 8);
  std::vector<POVMElement> elements = all_grid_elements(g, t);
  DensityMatrix rho = build_state(StateSpec{StateKind::coherent, {{"z_re", 0.6}, {"z_im", 0.3}}}, t);
};
} // namespace

TEST_CASE("noiseless simulation returns the Born-rule values") {
  Setup s;
  const auto records = simulate(s.rho, s.elements, NoiseConfig{});
  REQUIRE(records.size() == s.elements.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CVector& v = s.elements[i].vector;
    const double direct = s.elements[i].weight * (v.adjoint() * s.rho.entries() * v)(0, 0).real();
    CHECK(records[i].frequency == doctest::Approx(direct).epsilon(1e-12));
    CHECK(records[i].ideal == records[i].frequency);
    CHECK(records[i].counts == 0);
    CHECK(records[i].element_id == s.elements[i].id);
  }
}

TEST_CASE("Poisson noise has the requested relative size") {
  Setup s;
  NoiseConfig noise{true, 10.0, 42};
  CHECK(noise.intensity() == doctest::Approx(100.0));
  // Many independent draws of one record: mean ~ ideal, relative spread ~ snr at the mean level.
  const double mean_ideal = [&] {
    double m = 0;
    for (const auto& r : simulate(s.rho, s.elements, NoiseConfig{})) m += r.ideal;
    return m / s.elements.size();
  }();
  double sum = 0, sum2 = 0;
  const int draws = 400;
  std::size_t pick = 0;
  {
    const auto ideal = simulate(s.rho, s.elements, NoiseConfig{});
    for (std::size_t i = 0; i < ideal.size(); ++i)
      if (std::abs(ideal[i].ideal - mean_ideal) < std::abs(ideal[pick].ideal - mean_ideal)) pick = i;
  }
  double ideal_value = 0;
  for (int d = 0; d < draws; ++d) {
    noise.seed = 1000 + d;
    const auto r = simulate(s.rho, s.elements, noise)[pick];
    ideal_value = r.ideal;
    sum += r.frequency;
    sum2 += r.frequency * r.frequency;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt(sum2 / draws - mean * mean);
  CHECK(mean == doctest::Approx(ideal_value).epsilon(0.02));
  const double expected_rel = std::sqrt(mean_ideal / ideal_value) / std::sqrt(noise.intensity());
  CHECK(sd / ideal_value == doctest::Approx(expected_rel).epsilon(0.15));
}

TEST_CASE("noise is reproducible per seed") {
  Setup s;
  const auto a = simulate(s.rho, s.elements, NoiseConfig{true, 10.0, 5});
  const auto b = simulate(s.rho, s.elements, NoiseConfig{true, 10.0, 5});
  const auto c = simulate(s.rho, s.elements, NoiseConfig{true, 10.0, 6});
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].counts == b[i].counts);
    differs = differs || a[i].counts != c[i].counts;
  }
  CHECK(differs);
  CHECK(record_seed(5, 1) != record_seed(5, 2));
}

TEST_CASE("degenerate and invalid inputs") {
  Setup s;
  CHECK_THROWS_AS(simulate(s.rho, {}, NoiseConfig{}), DegenerateDataError);
  // a far displaced probe sees nothing of the vacuum
  TruncationConfig t{10, 1};
  const DensityMatrix vac = build_state(StateSpec{StateKind::fock, {{"n", 0}}}, t);
  POVMElement zero = s.elements.front();
  zero.vector.setZero();
  CHECK_THROWS_AS(simulate(vac, {zero}, NoiseConfig{}), DegenerateDataError);
  CHECK_THROWS_AS((NoiseConfig{true, 0.0, 0}.validate()), ConfigError);
  POVMElement wrong = s.elements.front();
  wrong.vector = CVector::Ones(5);
  CHECK_THROWS_AS(expectation(s.rho, wrong), DimensionError);
}
