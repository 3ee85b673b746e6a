#include "doctest.h"

#include <cmath>

#include "cvtomo/errors.hpp"
#include "cvtomo/metrics.hpp"
#include "oracles.hpp"

using namespace cvtomo;

TEST_CASE("partial transpose matches the index definition") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  CMatrix m(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) m(i, j) = cplx(nd(rng), nd(rng));
  CHECK((partial_transpose_first(m, 4) - oracle::partial_transpose(m, 4)).norm() < 1e-14);
}

TEST_CASE("negativity of the ideal targets") {
  TruncationConfig t{10, 2};
  const DensityMatrix noon = build_state(StateSpec{StateKind::noon, {}}, t);
  CHECK(negativity(noon) == doctest::Approx(0.5).epsilon(1e-12));
  const DensityMatrix sq = build_state(StateSpec{StateKind::squeezed_vacuum, {}}, t);
  const double lambda = std::tanh(0.2);
  CHECK(std::abs(negativity(sq) - lambda / (1 - lambda)) < 1e-6);
  for (StateKind k : {StateKind::hermite_gauss, StateKind::dephased_cat}) {
    const DensityMatrix rho = build_state(StateSpec{k, {}}, t);
    CHECK(negativity(rho) == doctest::Approx(oracle::negativity(rho.entries(), 11)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(negativity(build_state(StateSpec{StateKind::fock, {}}, TruncationConfig{10, 1})), UnsupportedError);
}

TEST_CASE("negativity of a pure Schmidt state") {
  // |psi> = sum s_k |k k>: negativity ((sum s_k)^2 - 1) / 2
  TruncationConfig t{2, 2};
  const std::vector<double> s = {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
  CVector v = CVector::Zero(9);
  for (int k = 0; k < 3; ++k) v(k * 3 + k) = s[k];
  const DensityMatrix rho = DensityMatrix::from_pure(PureState::from_amplitudes(t, v));
  const double sum = s[0] + s[1] + s[2];
  CHECK(negativity(rho) == doctest::Approx((sum * sum - 1) / 2).epsilon(1e-12));
}

TEST_CASE("fidelity properties") {
  TruncationConfig t{4, 1};
  const DensityMatrix a = build_state(StateSpec{StateKind::coherent, {{"z_re", 0.4}}}, t, BuildOptions{1.0, 80});
  const DensityMatrix b = build_state(StateSpec{StateKind::fock, {{"n", 1}}}, t);
  CMatrix mix = CMatrix::Zero(5, 5);
  mix.diagonal() << 0.4, 0.3, 0.2, 0.1, 0.0;
  const DensityMatrix c = DensityMatrix::from_matrix(t, mix);
  CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(fidelity(c, c) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(fidelity(a, b) == doctest::Approx((a.entries() * b.entries()).trace().real()).epsilon(1e-10));
  CHECK(fidelity(b, c) == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(fidelity(c, b) == doctest::Approx(0.3).epsilon(1e-8));
  // commuting mixed states: (sum sqrt(p q))^2
  CMatrix other = CMatrix::Zero(5, 5);
  other.diagonal() << 0.1, 0.2, 0.3, 0.4, 0.0;
  const DensityMatrix d = DensityMatrix::from_matrix(t, other);
  double bc = 0;
  for (int k = 0; k < 5; ++k) bc += std::sqrt(mix(k, k).real() * other(k, k).real());
  CHECK(fidelity(c, d) == doctest::Approx(bc * bc).epsilon(1e-8));
  CHECK_THROWS_AS(fidelity(a, build_state(StateSpec{StateKind::fock, {}}, TruncationConfig{3, 1})), DimensionError);
}

TEST_CASE("trace distance") {
  CMatrix a = CMatrix::Zero(2, 2), b = CMatrix::Zero(2, 2);
  a(0, 0) = 1;
  b(1, 1) = 1;
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, a) == doctest::Approx(0.0));
}

TEST_CASE("entropy probe") {
  TruncationConfig t{10, 1};
  const SamplingGrid g = SamplingGrid::quadrature(1, -5, 5, 11, 4);
  const auto elements = all_grid_elements(g, t);
  const DensityMatrix vac = build_state(StateSpec{StateKind::fock, {{"n", 0}}}, t);
  // vacuum marginals do not depend on the angle: 4 probes at q=0 give a uniform vector
  std::vector<POVMElement> same_q;
  for (const auto& e : elements)
    if (std::abs(e.quadrature_coords[0].q) < 1e-12) same_q.push_back(e);
  REQUIRE(same_q.size() == 4);
  CHECK(shannon_entropy_probe(vac, same_q) == doctest::Approx(std::log10(4.0)).epsilon(1e-10));
  // a probe set with one dominant element has entropy near zero
  std::vector<POVMElement> skewed = {same_q[0], elements.front()};
  CHECK(shannon_entropy_probe(vac, skewed) < 0.01);
  POVMElement zero = elements.front();
  zero.vector.setZero();
  CHECK_THROWS_AS(shannon_entropy_probe(vac, {zero}), DegenerateDataError);
  CHECK_THROWS_AS(shannon_entropy_probe(vac, {}), DomainError);
}
