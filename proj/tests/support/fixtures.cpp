#include "fixtures.hpp"

#include <cmath>

namespace fixtures {

using phaseslope::make_record;
using phaseslope::MultichannelRecord;

namespace {

void unit_variance(Eigen::Ref<Eigen::VectorXd> x) {
  x.array() -= x.mean();
  x /= std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
}

}  // namespace

Eigen::MatrixXd white(Index channels, Index samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd out(channels, samples);
  for (Index t = 0; t < samples; ++t)
    for (Index c = 0; c < channels; ++c) out(c, t) = gauss(rng);
  return out;
}

MultichannelRecord coupled_ar1(std::uint64_t seed, Index samples, double a, double b, double c) {
  const Index burn = 500;
  const Eigen::MatrixXd xi = white(2, samples + burn, seed);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, samples + burn);
  for (Index t = 1; t < z.cols(); ++t) {
    z(0, t) = a * z(0, t - 1) + c * z(1, t - 1) + xi(0, t);
    z(1, t) = b * z(1, t - 1) + xi(1, t);
  }
  return make_record(z.rightCols(samples), 100.0);
}

MultichannelRecord brown_white(std::uint64_t seed, Index samples) {
  const Eigen::MatrixXd e = white(4, samples, seed);
  Eigen::MatrixXd src(2, samples);
  double walk = 0.0;
  for (Index t = 0; t < samples; ++t) {
    walk += e(0, t);
    src(0, t) = walk;
    src(1, t) = e(1, t);
  }
  Eigen::VectorXd r0 = src.row(0).transpose();
  unit_variance(r0);
  src.row(0) = r0.transpose();
  Eigen::Matrix2d mix;
  mix << e(2, 0), e(2, 1), e(3, 0), e(3, 1);
  return make_record(mix * src, 100.0);
}

MultichannelRecord delayed_pair(std::uint64_t seed, Index samples, Index delay, double noise_std) {
  const Eigen::MatrixXd e = white(2, samples + delay, seed);
  Eigen::MatrixXd y(2, samples);
  for (Index t = 0; t < samples; ++t) {
    y(0, t) = e(0, t + delay);
    y(1, t) = e(0, t) + noise_std * e(1, t + delay);
  }
  return make_record(std::move(y), 100.0);
}

MultichannelRecord mixed_independent(std::uint64_t seed, Index channels, Index samples) {
  const Eigen::MatrixXd e = white(channels, samples + 200, seed);
  Eigen::MatrixXd src = Eigen::MatrixXd::Zero(channels, samples + 200);
  for (Index c = 0; c < channels; ++c) {
    const double pole = 0.9 * std::cos(static_cast<double>(c) + 0.3);
    for (Index t = 1; t < src.cols(); ++t) src(c, t) = pole * src(c, t - 1) + e(c, t);
  }
  const Eigen::MatrixXd mix = white(channels, channels, seed ^ 0x9e3779b97f4a7c15ULL);
  return make_record(mix * src.rightCols(samples), 100.0);
}

MultichannelRecord chain3(std::uint64_t seed, Index samples) {
  const Index burn = 200;
  const Eigen::MatrixXd xi = white(3, samples + burn, seed);
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, samples + burn);
  for (Index t = 1; t < z.cols(); ++t) {
    z(0, t) = 0.6 * z(0, t - 1) + xi(0, t);
    z(1, t) = 0.3 * z(1, t - 1) + 0.8 * z(0, t - 1) + xi(1, t);
    z(2, t) = 0.3 * z(2, t - 1) + 0.8 * z(1, t - 1) + xi(2, t);
  }
  return make_record(z.rightCols(samples), 100.0);
}

phaseslope::SensorLayout default_layout() {
  return phaseslope::load_layout(PHASESLOPE_TEST_DATA_DIR "/layout_1020.csv");
}

AlphaFixture frontal_alpha(std::uint64_t seed, Index samples) {
  AlphaFixture fx;
  fx.layout = default_layout();
  const auto n = static_cast<Index>(fx.layout.size());
  const Index max_delay = 8;
  const Index burn = 500;
  const Index len = samples + max_delay + burn;

  const Eigen::MatrixXd e = white(n + 2, len, seed);
  const double r = 0.98;
  const double w = 2.0 * M_PI * fx.peak_hz / 100.0;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(len);
  Eigen::VectorXd common = Eigen::VectorXd::Zero(len);
  for (Index t = 2; t < len; ++t) {
    alpha(t) = 2.0 * r * std::cos(w) * alpha(t - 1) - r * r * alpha(t - 2) + e(0, t);
    common(t) = 0.9 * common(t - 1) + e(1, t);
  }
  unit_variance(alpha);
  unit_variance(common);

  const double front = fx.layout.positions[0].y();
  Eigen::MatrixXd y(n, samples);
  for (Index c = 0; c < n; ++c) {
    const auto d = static_cast<Index>(std::lround(2.0 * (front - fx.layout.positions[static_cast<std::size_t>(c)].y())));
    const double gain = 0.75 + 0.5 * std::abs(std::sin(static_cast<double>(c) + static_cast<double>(seed % 97)));
    for (Index t = 0; t < samples; ++t) {
      const Index s = t + max_delay + burn;
      y(c, t) = alpha(s - d) + gain * common(s) + 0.5 * e(c + 2, s);
    }
  }
  fx.record = make_record(std::move(y), 100.0, fx.layout.labels);
  return fx;
}

}  // namespace fixtures
