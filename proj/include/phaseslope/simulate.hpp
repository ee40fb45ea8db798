#pragma once

#include "phaseslope/granger.hpp"
#include "phaseslope/psi.hpp"
#include "phaseslope/timeseries.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>

namespace phaseslope {

using Rng = std::mt19937_64;

enum class ARConstraint {
  /// A(p)(1, 0) = 0 for every lag: the second channel drives the first,
  /// nothing flows back.
  unidirectional_2to1,
  /// Off-diagonal entries zero: independent sources.
  diagonal,
};

/// Block companion matrix of an AR model (order * n square).
Eigen::MatrixXd companion_matrix(const ARModel& model);

/// Largest eigenvalue modulus of the companion matrix.
double spectral_radius(const ARModel& model);

/// Spectral radius below 1 - 1e-8.
bool is_stable(const ARModel& model);

struct StableDraw {
  ARModel model;
  int rejections = 0;
  bool used_fallback = false;
};

/// Draws i.i.d. standard Gaussian coefficients, applies the constraint and
/// resamples until stable. After 1000 rejections the last candidate is
/// shrunk by A(p) *= 0.95^p until it is stable. Residual covariance is I.
StableDraw random_stable_ar(Index n_channels, Index order, ARConstraint constraint, Rng& rng);

ARModel random_stable_ar(Index n_channels, Index order, ARConstraint constraint, std::uint64_t seed);

/// Runs the recursion with unit-covariance Gaussian innovations (scaled by
/// the Cholesky factor of residual_cov), discarding `burn_in` samples.
Eigen::MatrixXd simulate_ar(const ARModel& model, Index n_samples, Index burn_in, Rng& rng);

/// Parameters of one mixed system y = (1-g) x / |x|_F + g B eta / |B eta|_F.
struct SystemSpec {
  Index signal_order = 5;
  Index noise_order = 5;
  Index n_noise_sources = 2;
  double gamma = 0.0;
  double sampling_rate = 100.0;
  Index n_samples = 60000;
  Index burn_in = 1000;
  std::uint64_t seed = 0;
};

struct GeneratedSystem {
  MultichannelRecord record;
  ARModel signal_model;
  ARModel noise_model;
  Eigen::MatrixXd mixing;  // 2 x M
  Eigen::MatrixXd signal;  // normalized signal part (1-g) x / N_x
  Eigen::MatrixXd noise;   // normalized noise part g B eta / N_eta
  bool signal_fallback = false;
  bool noise_fallback = false;
};

/// Ground truth of every generated system: information flows from the
/// second channel to the first (index 1 -> index 0).
inline constexpr Index kTrueSource = 1;
inline constexpr Index kTrueTarget = 0;

GeneratedSystem generate(const SystemSpec& spec);

/// Analytic summed-channel power of `model` on the grid 0, df, ..., rate/2.
std::vector<double> ar_power_spectrum(const ARModel& model, double sampling_rate, double resolution);

struct NarrowBandChoice {
  Band band;
  double peak = 0.0;
  double power_fraction = 0.0;
  bool accepted = false;
};

/// Band of `width` Hz around the model's spectral peak (lowest frequency on
/// ties), clipped to [df, Nyquist - df]; accepted when it holds at least 60%
/// of the total power.
NarrowBandChoice narrow_band_for(const ARModel& model, double sampling_rate, double resolution,
                                 double width = 5.0);

}  // namespace phaseslope
