#include "pbc/noise.hpp"

#include <algorithm>
#include <cmath>

namespace pbc {

NoiseSpec NoiseSpec::uniform(uint64_t seed) { return {NoiseLaw::uniform_symmetric, 1.0, seed}; }

NoiseSpec NoiseSpec::skewed(double nu, uint64_t seed) {
  if (!(nu >= 1.0)) throw ConfigError("noise: nu must be at least 1");
  return {NoiseLaw::log_skewed, nu, seed};
}

double uniform_symmetric_transform(double u) { return 2.0 * u - 1.0; }

double log_skewed_transform(double zeta, double nu) {
  if (!(nu >= 1.0)) throw ConfigError("noise: nu must be at least 1");
  zeta = std::clamp(zeta, 0x1.0p-53, 1.0 - 0x1.0p-53);
  return std::exp(std::log(nu + 1.0) * std::log(2.0 * zeta) / std::log(2.0)) - 1.0;
}

SampleStream::SampleStream(const NoiseSpec& spec, uint64_t trajectory_index)
    : key_(rng::stream_key(spec.base_seed, trajectory_index)), law_(spec.law), nu_(spec.nu) {
  if (spec.law == NoiseLaw::uniform_symmetric && spec.nu != 1.0) {
    throw ConfigError("noise: uniform law fixes nu = 1");
  }
  if (!(spec.nu >= 1.0)) throw ConfigError("noise: nu must be at least 1");
}

double SampleStream::at(uint64_t counter) const {
  double u = rng::unit_at(key_, counter);
  switch (law_) {
    case NoiseLaw::uniform_symmetric:
      return uniform_symmetric_transform(u);
    case NoiseLaw::log_skewed:
      return log_skewed_transform(u, nu_);
  }
  return 0.0;
}

SampleStream derive_stream(const NoiseSpec& spec, uint64_t trajectory_index) {
  return SampleStream(spec, trajectory_index);
}

}  // namespace pbc
