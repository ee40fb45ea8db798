#include "phaseslope/simulate.hpp"

#include "phaseslope/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace phaseslope {

namespace {

constexpr int kMaxRejections = 1000;
constexpr double kShrink = 0.95;
constexpr double kStabilityMargin = 1e-8;

void apply_constraint(ARModel& model, ARConstraint constraint) {
  for (auto& a : model.coefficients) {
    switch (constraint) {
      case ARConstraint::unidirectional_2to1:
        a(1, 0) = 0.0;
        break;
      case ARConstraint::diagonal:
        for (Index j = 0; j < a.cols(); ++j)
          for (Index i = 0; i < a.rows(); ++i)
            if (i != j) a(i, j) = 0.0;
        break;
    }
  }
}

ARModel draw_candidate(Index n, Index order, ARConstraint constraint, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ARModel model;
  model.residual_cov = Eigen::MatrixXd::Identity(n, n);
  for (Index p = 0; p < order; ++p) {
    Eigen::MatrixXd a(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) a(i, j) = gauss(rng);
    model.coefficients.push_back(std::move(a));
  }
  apply_constraint(model, constraint);
  return model;
}

}  // namespace

Eigen::MatrixXd companion_matrix(const ARModel& model) {
  const Index n = model.n_channels();
  const Index p = model.order();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n * p, n * p);
  for (Index k = 0; k < p; ++k) c.block(0, k * n, n, n) = model.coefficients[static_cast<std::size_t>(k)];
  if (p > 1) c.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
  return c;
}

double spectral_radius(const ARModel& model) {
  if (model.order() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion_matrix(model), false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

bool is_stable(const ARModel& model) { return spectral_radius(model) < 1.0 - kStabilityMargin; }

StableDraw random_stable_ar(Index n_channels, Index order, ARConstraint constraint, Rng& rng) {
  if (n_channels < 1 || order < 1) throw InputError("AR model needs at least one channel and one lag");
  if (constraint == ARConstraint::unidirectional_2to1 && n_channels < 2)
    throw InputError("unidirectional constraint needs two channels");
  StableDraw draw;
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    draw.model = draw_candidate(n_channels, order, constraint, rng);
    if (is_stable(draw.model)) return draw;
    ++draw.rejections;
  }
  // Scaling A(p) by c^p scales every companion eigenvalue by c.
  draw.used_fallback = true;
  while (!is_stable(draw.model)) {
    double factor = 1.0;
    for (auto& a : draw.model.coefficients) {
      factor *= kShrink;
      a *= factor;
    }
  }
  return draw;
}

ARModel random_stable_ar(Index n_channels, Index order, ARConstraint constraint, std::uint64_t seed) {
  Rng rng(seed);
  return random_stable_ar(n_channels, order, constraint, rng).model;
}

Eigen::MatrixXd simulate_ar(const ARModel& model, Index n_samples, Index burn_in, Rng& rng) {
  const Index n = model.n_channels();
  const Index order = model.order();
  Eigen::LLT<Eigen::MatrixXd> chol(model.residual_cov);
  if (chol.info() != Eigen::Success) throw InputError("innovation covariance is not positive definite");
  const Eigen::MatrixXd factor = chol.matrixL();
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index total = burn_in + n_samples;
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, total);
  Eigen::VectorXd xi(n);
  for (Index t = 0; t < total; ++t) {
    for (Index c = 0; c < n; ++c) xi(c) = gauss(rng);
    Eigen::VectorXd next = factor * xi;
    for (Index p = 1; p <= std::min(order, t); ++p)
      next.noalias() += model.coefficients[static_cast<std::size_t>(p - 1)] * z.col(t - p);
    z.col(t) = next;
  }
  return z.rightCols(n_samples);
}

GeneratedSystem generate(const SystemSpec& spec) {
  if (!(spec.gamma >= 0.0 && spec.gamma <= 1.0)) throw InputError("gamma must lie in [0, 1]");
  if (spec.n_noise_sources < 1) throw InputError("need at least one noise source");
  if (spec.n_samples < 2) throw InputError("too few samples");
  Rng rng(spec.seed);
  GeneratedSystem sys;
  auto signal_draw = random_stable_ar(2, spec.signal_order, ARConstraint::unidirectional_2to1, rng);
  auto noise_draw = random_stable_ar(spec.n_noise_sources, spec.noise_order, ARConstraint::diagonal, rng);
  sys.signal_model = std::move(signal_draw.model);
  sys.noise_model = std::move(noise_draw.model);
  sys.signal_fallback = signal_draw.used_fallback;
  sys.noise_fallback = noise_draw.used_fallback;

  std::normal_distribution<double> gauss(0.0, 1.0);
  sys.mixing.resize(2, spec.n_noise_sources);
  for (Index j = 0; j < sys.mixing.cols(); ++j)
    for (Index i = 0; i < 2; ++i) sys.mixing(i, j) = gauss(rng);

  const Eigen::MatrixXd x = simulate_ar(sys.signal_model, spec.n_samples, spec.burn_in, rng);
  const Eigen::MatrixXd eta = simulate_ar(sys.noise_model, spec.n_samples, spec.burn_in, rng);
  const Eigen::MatrixXd mixed = sys.mixing * eta;
  const double nx = x.norm();
  const double neta = mixed.norm();
  if (!(nx > 0.0) || !(neta > 0.0)) throw DegenerateError("simulated component has zero norm");
  sys.signal = ((1.0 - spec.gamma) / nx) * x;
  sys.noise = (spec.gamma / neta) * mixed;
  sys.record = make_record(sys.signal + sys.noise, spec.sampling_rate, {});
  return sys;
}

std::vector<double> ar_power_spectrum(const ARModel& model, double sampling_rate, double resolution) {
  const auto n_bins = static_cast<std::size_t>(std::llround(0.5 * sampling_rate / resolution)) + 1;
  std::vector<double> power(n_bins);
  for (std::size_t m = 0; m < n_bins; ++m)
    power[m] = model_spectrum(model, static_cast<double>(m) * resolution, sampling_rate).trace().real();
  return power;
}

NarrowBandChoice narrow_band_for(const ARModel& model, double sampling_rate, double resolution,
                                 double width) {
  const auto power = ar_power_spectrum(model, sampling_rate, resolution);
  const auto peak_it = std::max_element(power.begin(), power.end());  // first maximum
  const auto peak_bin = static_cast<std::size_t>(peak_it - power.begin());
  const auto half_bins = static_cast<std::ptrdiff_t>(std::llround(0.5 * width / resolution));
  const auto last = static_cast<std::ptrdiff_t>(power.size()) - 1;
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(1, static_cast<std::ptrdiff_t>(peak_bin) - half_bins);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(last - 1, static_cast<std::ptrdiff_t>(peak_bin) + half_bins);

  NarrowBandChoice out;
  out.peak = static_cast<double>(peak_bin) * resolution;
  out.band = Band{static_cast<double>(lo) * resolution, static_cast<double>(hi) * resolution};
  double total = 0.0, inside = 0.0;
  for (std::ptrdiff_t m = 0; m <= last; ++m) {
    total += power[static_cast<std::size_t>(m)];
    if (m >= lo && m <= hi) inside += power[static_cast<std::size_t>(m)];
  }
  out.power_fraction = total > 0.0 ? inside / total : 0.0;
  out.accepted = hi > lo && out.power_fraction >= 0.6;
  return out;
}

}  // namespace phaseslope
