#pragma once

#include "phaseslope/layout.hpp"
#include "phaseslope/timeseries.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace fixtures {

using phaseslope::Index;

Eigen::MatrixXd white(Index channels, Index samples, std::uint64_t seed);

/// z(t) = A z(t-1) + xi(t) with A = [[a, c], [0, b]]: channel 1 drives channel 0.
phaseslope::MultichannelRecord coupled_ar1(std::uint64_t seed, Index samples = 2000, double a = 0.5,
                                           double b = 0.5, double c = 1.5);

/// A random 2x2 Gaussian mix of a unit-variance random walk and unit-variance white noise.
phaseslope::MultichannelRecord brown_white(std::uint64_t seed, Index samples = 60000);

/// y1 = s, y2(t) = s(t - delay) + noise_std * e(t), s and e white.
phaseslope::MultichannelRecord delayed_pair(std::uint64_t seed, Index samples = 60000, Index delay = 5,
                                            double noise_std = 1.0);

/// Independent sources of different colours, mixed by a random real matrix.
phaseslope::MultichannelRecord mixed_independent(std::uint64_t seed, Index channels = 2,
                                                 Index samples = 20000);

/// Chain 0 -> 1 -> 2 with one-sample lags.
phaseslope::MultichannelRecord chain3(std::uint64_t seed, Index samples = 20000);

/// 19 channels on the bundled 10-20 layout. A narrow 10 Hz rhythm reaches each
/// sensor with a delay growing from front to back; a zero-lag broadband source
/// and sensor noise sit underneath.
struct AlphaFixture {
  phaseslope::MultichannelRecord record;
  phaseslope::SensorLayout layout;
  double peak_hz = 10.0;
};

AlphaFixture frontal_alpha(std::uint64_t seed, Index samples = 60000);

phaseslope::SensorLayout default_layout();

}  // namespace fixtures
