#include "doctest.h"

#include <cmath>
#include <random>

#include "cvtomo/errors.hpp"
#include "cvtomo/wigner.hpp"
#include "oracles.hpp"

using namespace cvtomo;

namespace {
const double inv_pi = 1.0 / kPi;
}

TEST_CASE("closed-form kernels match the Wigner integral") {
  const oracle::Rule rule = oracle::gauss_hermite(120);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  for (int k = 0; k < 25; ++k) {
    const double q = u(rng), p = u(rng);
    const CMatrix kern = wigner_kernel_matrix(11, q, p);
    for (int m = 0; m <= 10; ++m)
      for (int n = 0; n <= 10; ++n) {
        worst = std::max(worst, std::abs(kern(m, n) - oracle::wigner_integral(m, n, q, p, rule)));
        CHECK(kern(m, n) == wigner_kernel(m, n, q, p));
      }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("kernel values at the origin and symmetry") {
  CHECK(std::abs(wigner_kernel(0, 0, 0, 0) - inv_pi) < 1e-12);
  CHECK(std::abs(wigner_kernel(1, 1, 0, 0) + inv_pi) < 1e-12);
  CHECK(std::abs(wigner_kernel(3, 1, 0.4, -1.1) - std::conj(wigner_kernel(1, 3, 0.4, -1.1))) < 1e-15);
}

TEST_CASE("kernels integrate to the identity") {
  const auto axis = uniform_axis(-7, 0.1, 7);
  CMatrix total = CMatrix::Zero(4, 4);
  for (double q : axis)
    for (double p : axis) total += wigner_kernel_matrix(4, q, p) * 0.01;
  CHECK((total - CMatrix::Identity(4, 4)).norm() < 1e-8);
}

TEST_CASE("vacuum and Fock-1 grids") {
  TruncationConfig t{10, 1};
  const auto axis = uniform_axis(-5, 0.1, 5);
  const PhaseSpaceGrid vac = wigner_grid(build_state(StateSpec{StateKind::fock, {{"n", 0}}}, t), axis, axis);
  double worst = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i)
    for (std::size_t j = 0; j < axis.size(); ++j)
      worst = std::max(worst, std::abs(vac.values(i, j) - inv_pi * std::exp(-axis[i] * axis[i] - axis[j] * axis[j])));
  CHECK(worst < 1e-8);
  CHECK(vac.integral() == doctest::Approx(1.0).epsilon(1e-3));

  const PhaseSpaceGrid one = wigner_grid(build_state(StateSpec{StateKind::fock, {{"n", 1}}}, t), axis, axis);
  CHECK(one.values(50, 50) == doctest::Approx(-inv_pi).epsilon(1e-10));
  CHECK(one.values.minCoeff() >= -inv_pi - 1e-12);
  CHECK(one.within_bound());
  CHECK(one.integral() == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("marginal over p is the position density") {
  TruncationConfig t{10, 1};
  const DensityMatrix rho = build_state(StateSpec{StateKind::coherent, {{"z_re", 0.7}, {"z_im", -0.4}}}, t);
  const auto axis = uniform_axis(-6, 0.1, 6);
  const PhaseSpaceGrid w = wigner_grid(rho, axis, axis);
  for (std::size_t i = 0; i < axis.size(); i += 10) {
    CVector psi(11);
    for (int n = 0; n <= 10; ++n) psi(n) = oracle::hermite_function(n, axis[i]);
    const double density = (psi.adjoint() * rho.entries() * psi)(0, 0).real();
    CHECK(std::abs(w.values.row(i).sum() * 0.1 - density) < 1e-4);
  }
}

TEST_CASE("coherent states peak at sqrt(2) times the amplitude") {
  TruncationConfig t{10, 1};
  const DensityMatrix rho = build_state(StateSpec{StateKind::coherent, {{"z_re", 0.5}, {"z_im", 0.25}}}, t);
  const auto axis = uniform_axis(-2 * std::sqrt(2.0), std::sqrt(2.0) / 8, 2 * std::sqrt(2.0));
  const PhaseSpaceGrid w = wigner_grid(rho, axis, axis);
  Eigen::Index i = 0, j = 0;
  w.values.maxCoeff(&i, &j);
  CHECK(axis[i] == doctest::Approx(std::sqrt(2.0) * 0.5).epsilon(1e-12));
  CHECK(axis[j] == doctest::Approx(std::sqrt(2.0) * 0.25).epsilon(1e-12));
}

TEST_CASE("Wigner grids are linear in the state") {
  TruncationConfig t{6, 1};
  const DensityMatrix a = build_state(StateSpec{StateKind::fock, {{"n", 2}}}, t);
  const DensityMatrix b = build_state(StateSpec{StateKind::coherent, {{"z_re", 0.3}}}, t, BuildOptions{1e-2, 80});
  const DensityMatrix mix = DensityMatrix::from_matrix(t, 0.3 * a.entries() + 0.7 * b.entries());
  const auto axis = uniform_axis(-3, 0.25, 3);
  const RMatrix lhs = wigner_grid(mix, axis, axis).values;
  const RMatrix rhs = 0.3 * wigner_grid(a, axis, axis).values + 0.7 * wigner_grid(b, axis, axis).values;
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("two-mode slices") {
  const auto axis = uniform_axis(-4, 0.2, 4);
  TruncationConfig t2{3, 2};
  CVector vac = CVector::Zero(16);
  vac(0) = 1.0;
  const DensityMatrix product = DensityMatrix::from_pure(PureState::from_amplitudes(t2, vac));
  const PhaseSpaceGrid s = wigner_two_mode_slice(product, ModeSlice{1, 0.0, 0.0}, axis, axis);
  double worst = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i)
    for (std::size_t j = 0; j < axis.size(); ++j)
      worst = std::max(worst, std::abs(s.values(i, j) - inv_pi * inv_pi * std::exp(-axis[i] * axis[i] - axis[j] * axis[j])));
  CHECK(worst < 1e-12);

  const DensityMatrix noon = build_state(StateSpec{StateKind::noon, {}}, t2);
  const PhaseSpaceGrid n1 = wigner_two_mode_slice(noon, ModeSlice{1, 0.0, 0.0}, axis, axis);
  // both diagonal terms of (|10> + |01>)/sqrt(2) carry one W_11(0, 0) = -1/pi factor
  CHECK(n1.values(20, 20) == doctest::Approx(-inv_pi * inv_pi).epsilon(1e-12));
  cplx direct = 0.0;
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      direct += noon.entries()(a, b) * oracle::wigner_integral(a / 4, b / 4, axis[7], axis[3], oracle::gauss_hermite(60)) *
                oracle::wigner_integral(a % 4, b % 4, 0.0, 0.0, oracle::gauss_hermite(60));
  CHECK(n1.values(7, 3) == doctest::Approx(direct.real()).epsilon(1e-10));
  const PhaseSpaceGrid a = wigner_two_mode_slice(noon, ModeSlice{1, 0.6, -0.2}, axis, axis);
  const PhaseSpaceGrid b = wigner_two_mode_slice(noon, ModeSlice{2, 0.6, -0.2}, axis, axis);
  CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(a.mode_slice.has_value());

  const PhaseSpaceGrid far = wigner_two_mode_slice(noon, ModeSlice{1, 9.0, 0.0}, axis, axis);
  CHECK_FALSE(far.warnings.empty());
  CHECK_THROWS_AS(wigner_grid(noon, axis, axis), UnsupportedError);
}

TEST_CASE("the full two-mode tensor integrates to one") {
  TruncationConfig t2{3, 2};
  const DensityMatrix noon = build_state(StateSpec{StateKind::noon, {}}, t2);
  const auto axis = uniform_axis(-5, 0.5, 5);
  const PhaseSpaceTensor w = wigner_two_mode_full(noon, axis, axis);
  CHECK(w.integral() == doctest::Approx(1.0).epsilon(1e-3));
  const PhaseSpaceGrid s = wigner_two_mode_slice(noon, ModeSlice{1, axis[4], axis[7]}, axis, axis);
  CHECK(w.at(3, 9, 4, 7) == doctest::Approx(s.values(3, 9)).epsilon(1e-12));
}

TEST_CASE("grid validation") {
  PhaseSpaceGrid g;
  g.q_axis = {0.0, 0.1, 0.3};
  g.p_axis = {0.0, 0.1};
  g.values = RMatrix::Zero(3, 2);
  CHECK_THROWS_AS(g.validate(), DomainError);
  g.q_axis = {0.0, 0.1, 0.2};
  g.values = RMatrix::Zero(2, 2);
  CHECK_THROWS_AS(g.validate(), DimensionError);
  CHECK(uniform_axis(-1, 0.5, 1).size() == 5);
}
