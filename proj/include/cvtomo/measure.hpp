#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvtomo/fock.hpp"
#include "cvtomo/povm.hpp"

namespace cvtomo {

struct MeasurementRecord {
  std::string element_id;
  double frequency = 0.0;  // observed weighted expectation f_i
  double ideal = 0.0;      // noiseless value
  std::int64_t counts = 0; // raw Poisson draw, 0 when noise is off
};

/// Poisson shot noise. A record whose ideal value equals the dataset mean
/// receives (100 / snr_percent)^2 expected counts, so its relative
/// fluctuation is snr_percent / 100.
struct NoiseConfig {
  bool enabled = false;
  double snr_percent = 10.0;
  std::uint64_t seed = 0;

  double intensity() const { return (100.0 / snr_percent) * (100.0 / snr_percent); }
  void validate() const;
};

// weight * Tr(rho E); throws DimensionError on size mismatch.
double expectation(const DensityMatrix& rho, const POVMElement& e);

std::vector<MeasurementRecord> simulate(const DensityMatrix& rho, const std::vector<POVMElement>& elements,
                                        const NoiseConfig& noise);

// Seed of the generator used for record `index`.
std::uint64_t record_seed(std::uint64_t seed, std::uint64_t index);

} // namespace cvtomo
