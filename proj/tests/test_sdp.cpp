#include "doctest.h"

#include <cmath>
#include <random>

#include "cvtomo/errors.hpp"
#include "cvtomo/metrics.hpp"
#include "cvtomo/sdp.hpp"
#include "cvtomo/sdp_core.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace cvtomo;

TEST_CASE("interior point matches the smoothed-minimization oracle on qutrit problems") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (bool maxent : {true, false}) {
      const TomographyProblem p = fixture::random_qutrit_problem(4 + static_cast<int>(seed), seed);
      SolverConfig cfg;
      cfg.maxent = maxent;
      const ReconstructionResult r = solve(p, cfg);
      CHECK(r.status == SolveStatus::optimal);
      const oracle::TomographyData d = fixture::raw_data(p, maxent);
      const double reference = oracle::smoothed_min(d, 3);
      INFO("solver " << r.objective << " oracle " << reference);
      CHECK(std::abs(r.objective - reference) <= 1e-3);
      CHECK(r.objective == doctest::Approx(oracle::tomography_objective(d, r.rho.entries())).epsilon(1e-9));
    }
  }
}

TEST_CASE("reconstructions are states and satisfy the residual tolerance") {
  const TomographyProblem p = fixture::random_qutrit_problem(6, 9);
  const ReconstructionResult r = solve(p, SolverConfig{});
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.primal_residual <= 1e-7);
  CHECK(r.rho.entries().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hermitian_eigenvalues(r.rho.entries())(0) >= -1e-12);
  CHECK(r.raw_min_eigenvalue >= -1e-7);
  CHECK(r.deltas.size() == 6);
}

TEST_CASE("noiseless Fock-1 data on the 35-projector grid") {
  TruncationConfig t{10, 1};
  const SamplingGrid g = SamplingGrid::quadrature_inclusive(1, -5, 5, 7, kPi / 4, kPi);
  const auto elements = all_grid_elements(g, t);
  const DensityMatrix one = build_state(StateSpec{StateKind::fock, {{"n", 1}}}, t);
  const TomographyProblem p = assemble(elements, simulate(one, elements, NoiseConfig{}));
  const ReconstructionResult r = solve(p, SolverConfig{});
  CHECK(r.status == SolveStatus::optimal);
  CHECK(fidelity(r.rho, one) >= 0.99);
  CHECK(r.deltas.maxCoeff() <= 1e-5);
}

TEST_CASE("biased solve drops the max-entropy term") {
  const TomographyProblem p = fixture::random_qutrit_problem(5, 4);
  const ReconstructionResult b = solve_biased(p, SolverConfig{});
  CHECK(b.delta_maxent == 0.0);
  CHECK(b.objective == doctest::Approx(b.deltas.sum()));
}

TEST_CASE("ADMM agrees with the interior point on small problems") {
  for (std::uint64_t seed : {5u, 6u}) {
    const TomographyProblem p = fixture::random_qutrit_problem(5, seed);
    SolverConfig ip;
    SolverConfig admm;
    admm.algorithm = SolverAlgorithm::admm;
    admm.tol_primal = admm.tol_dual = admm.tol_gap = 1e-6;
    const ReconstructionResult a = solve(p, ip);
    const ReconstructionResult b = solve(p, admm);
    CHECK(b.objective == doctest::Approx(a.objective).epsilon(1e-3));
  }
}

TEST_CASE("an inconsistent program is reported infeasible") {
  sdp::Problem sp;
  sp.n = 2;
  sp.cost_linear = RVector();
  sp.vectors = CMatrix(2, 0);
  sdp::Row a, b;
  a.dense = CMatrix::Identity(2, 2);
  a.rhs = 1.0;
  b.dense = CMatrix::Identity(2, 2);
  b.rhs = 2.0;
  sp.rows = {a, b};
  const sdp::Solution s = sdp::solve_interior_point(sp, sdp::Options{});
  CHECK(s.status == sdp::Status::infeasible);
}

TEST_CASE("a feasible standard-form program reaches its known optimum") {
  // min <C, X> s.t. Tr X = 1: the smallest eigenvalue of C
  sdp::Problem sp;
  sp.n = 3;
  sp.vectors = CMatrix(3, 0);
  sp.cost_linear = RVector();
  CMatrix c(3, 3);
  c << 2, cplx(0, 1), 0, cplx(0, -1), 1, 0.5, 0, 0.5, 3;
  sp.cost_matrix = c;
  sdp::Row tr;
  tr.dense = CMatrix::Identity(3, 3);
  tr.rhs = 1.0;
  sp.rows = {tr};
  const sdp::Solution s = sdp::solve_interior_point(sp, sdp::Options{});
  CHECK(s.status == sdp::Status::optimal);
  CHECK(s.primal_objective == doctest::Approx(hermitian_eigenvalues(c)(0)).epsilon(1e-6));
}

TEST_CASE("problem validation and assembly") {
  TruncationConfig t{4, 1};
  const SamplingGrid g = SamplingGrid::quadrature(1, -2, 2, 5, 2);
  const auto elements = all_grid_elements(g, t);
  CHECK_THROWS_AS(assemble(elements, {}), DegenerateDataError);
  CHECK_THROWS_AS(assemble(elements, {MeasurementRecord{"nope", 0.1, 0.1, 0}}), ConfigError);
  const TomographyProblem p = assemble(elements, {MeasurementRecord{elements[3].id, 0.1, 0.1, 0}});
  CHECK(p.trunc.cutoff_n == 4);
  CHECK(p.elements[0].id == elements[3].id);
  TomographyProblem bad = p;
  bad.frequencies(0) = -1.0;
  CHECK_THROWS_AS(solve(bad, SolverConfig{}), DomainError);
  SolverConfig neg;
  neg.tol_gap = 0;
  CHECK_THROWS_AS(solve(p, neg), ConfigError);
  CHECK(solver_algorithm_from_string("ip") == SolverAlgorithm::interior_point);
  CHECK_THROWS_AS(solver_algorithm_from_string("simplex"), ConfigError);
}

TEST_CASE("solver invariants on a fixed problem") {
  const TomographyProblem p = fixture::random_qutrit_problem(6, 21);
  const ReconstructionResult a = solve(p, SolverConfig{});
  const ReconstructionResult again = solve(p, SolverConfig{});
  CHECK(a.rho.entries() == again.rho.entries());
  CHECK(a.objective == again.objective);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = p.elements[i].weighted_expectation(a.rho.entries());
    CHECK(std::abs(e - p.frequencies(i)) <= (a.deltas(i) + 1e-7) * p.band(i));
  }
  CHECK(a.delta_maxent >= -1e-9);
  const ReconstructionResult b = solve_biased(p, SolverConfig{});
  CHECK(b.deltas.sum() <= a.deltas.sum() + 1e-7);

  // bands are relative: scaling weights and frequencies together changes nothing
  TomographyProblem scaled = p;
  for (auto& e : scaled.elements) e.weight *= 3.0;
  scaled.frequencies *= 3.0;
  SolverConfig biased;
  biased.maxent = false;
  CHECK(trace_distance(solve(scaled, biased).rho.entries(), b.rho.entries()) <= 1e-6);
}

TEST_CASE("consistent data need no slack") {
  TruncationConfig t{4, 1};
  const SamplingGrid g = SamplingGrid::quadrature(1, -2, 2, 5, 2);
  const DensityMatrix truth = build_state(StateSpec{StateKind::coherent, {{"z_re", 0.3}}}, t, BuildOptions{1e-2, 80});
  const auto element = grid_elements(g, {3}, t);
  const TomographyProblem p = assemble(element, simulate(truth, element, NoiseConfig{}));
  const ReconstructionResult r = solve(p, SolverConfig{});
  CHECK(r.deltas.sum() <= 1e-7);
}

TEST_CASE("a dense complete grid leaves no room for the max-entropy slack") {
  TruncationConfig t{4, 1};
  const SamplingGrid g = SamplingGrid::quadrature(1, -7, 7, 141, 16);
  const auto elements = all_grid_elements(g, t);
  REQUIRE(completeness_residual(elements, t) < 0.01);
  const DensityMatrix truth = build_state(StateSpec{StateKind::fock, {{"n", 2}}}, t);
  const TomographyProblem p = assemble(elements, simulate(truth, elements, NoiseConfig{}));
  const ReconstructionResult r = solve(p, SolverConfig{});
  CHECK(r.delta_maxent <= 0.01);
  CHECK(fidelity(r.rho, truth) >= 0.99);
  const ReconstructionResult b = solve_biased(p, SolverConfig{});
  CHECK(trace_distance(r.rho.entries(), b.rho.entries()) <= 1e-6);
}
