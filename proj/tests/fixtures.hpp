#pragma once
// Shared generators for solver tests.
#include <random>
#include <string>

#include "cvtomo/sdp.hpp"
#include "oracles.hpp"

namespace fixture {

using namespace cvtomo;

// Random qutrit problem: K unit-norm rank-one elements, frequencies drawn
// from a random state and perturbed so the optimum is not zero.
inline TomographyProblem random_qutrit_problem(int K, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.1, 0.5);
  TomographyProblem p;
  p.trunc = TruncationConfig{2, 1};
  CVector psi(3);
  for (int k = 0; k < 3; ++k) psi(k) = cplx(normal(rng), normal(rng));
  psi.normalize();
  const CMatrix truth = 0.8 * psi * psi.adjoint() + 0.2 / 3.0 * CMatrix::Identity(3, 3);
  p.frequencies.resize(K);
  for (int i = 0; i < K; ++i) {
    POVMElement e;
    e.id = "e" + std::to_string(i);
    e.kind = PovmKind::coherent;
    e.coherent_coords = {CoherentPoint{}};
    e.vector.resize(3);
    for (int k = 0; k < 3; ++k) e.vector(k) = cplx(normal(rng), normal(rng));
    e.vector.normalize();
    e.weight = unif(rng);
    const double ideal = e.weight * (e.vector.adjoint() * truth * e.vector)(0, 0).real();
    p.frequencies(i) = std::max(0.01, ideal * (1.0 + 0.3 * normal(rng)));
    p.elements.push_back(e);
  }
  return p;
}

inline oracle::TomographyData raw_data(const TomographyProblem& p, bool maxent) {
  oracle::TomographyData d;
  d.maxent = maxent;
  for (std::size_t i = 0; i < p.size(); ++i) {
    d.vectors.push_back(p.elements[i].vector);
    d.weights.push_back(p.elements[i].weight);
    d.frequencies.push_back(p.frequencies(static_cast<Eigen::Index>(i)));
  }
  return d;
}

} // namespace fixture
