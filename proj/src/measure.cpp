#include "cvtomo/measure.hpp"

#include <cmath>
#include <random>

#include "cvtomo/errors.hpp"

namespace cvtomo {

void NoiseConfig::validate() const {
  if (!(snr_percent > 0.0 && snr_percent <= 100.0)) throw ConfigError("noise: snr_percent must lie in (0, 100]");
}

double expectation(const DensityMatrix& rho, const POVMElement& e) {
  if (e.vector.size() != rho.dim()) throw DimensionError("expectation: element and state dimensions differ");
  const cplx value = e.vector.dot(rho.entries() * e.vector);
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value.real())))
    throw DomainError("expectation: Born-rule value has a non-negligible imaginary part");
  return e.weight * value.real();
}

std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer of seed xor index
  std::uint64_t z = (seed ^ index) + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<MeasurementRecord> simulate(const DensityMatrix& rho, const std::vector<POVMElement>& elements,
                                        const NoiseConfig& noise) {
  if (elements.empty()) throw DegenerateDataError("simulate: no measurement elements");
  std::vector<MeasurementRecord> out(elements.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    out[i].element_id = elements[i].id;
    out[i].ideal = std::max(0.0, expectation(rho, elements[i]));
    out[i].frequency = out[i].ideal;
    mean += out[i].ideal;
  }
  mean /= static_cast<double>(elements.size());
  if (!(mean > 0.0)) throw DegenerateDataError("simulate: every ideal expectation is zero");
  if (!noise.enabled) return out;

  noise.validate();
  const double lambda = noise.intensity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double rate = lambda * out[i].ideal / mean;
    std::int64_t k = 0;
    if (rate > 0.0) {
      std::mt19937_64 gen(record_seed(noise.seed, i));
      std::poisson_distribution<std::int64_t> poisson(rate);
      k = poisson(gen);
    }
    out[i].counts = k;
    out[i].frequency = mean * static_cast<double>(k) / lambda;
  }
  return out;
}

} // namespace cvtomo
