#pragma once

#include "phaseslope/psi.hpp"
#include "phaseslope/timeseries.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace phaseslope {

/// z(t) = sum_{p=1..P} A(p) z(t-p) + xi(t), cov(xi) = residual_cov.
struct ARModel {
  std::vector<Eigen::MatrixXd> coefficients;
  Eigen::MatrixXd residual_cov;
  bool biased_fallback = false;  // fitted on the biased sequence, see lwr()

  Index order() const { return static_cast<Index>(coefficients.size()); }
  Index n_channels() const { return residual_cov.rows(); }
};

/// R(k) = E[x(t) x(t-k)^T] for k = 0..max_lag.
struct Autocovariance {
  std::vector<Eigen::MatrixXd> lags;
  Index n_samples = 0;
  /// Products summed at lag k over n_samples; lags[k] * taper[k] is the
  /// biased (1/N) estimate. Empty when the lags are already biased.
  std::vector<double> taper;

  Index max_lag() const { return static_cast<Index>(lags.size()) - 1; }
};

/// Unnormalized lagged-product sums per epoch. Lags never reach across an
/// epoch boundary.
struct EpochAutocovariance {
  std::vector<std::vector<Eigen::MatrixXd>> sums;  // [epoch][lag]
  Index samples_per_epoch = 0;

  std::size_t n_epochs() const { return sums.size(); }
};

EpochAutocovariance epoch_autocovariance(const EpochedData& epochs, Index max_lag, bool demean = true);

/// Pooled over epochs, optionally leaving one out. Each lag is divided by
/// the number of products it sums, K (L - k), since lags stay inside epochs.
Autocovariance combine_autocovariance(const EpochAutocovariance& parts,
                                      std::size_t excluded = static_cast<std::size_t>(-1));

/// Restriction of R(k) to the listed channels.
Autocovariance select_channels(const Autocovariance& acov, const std::vector<Index>& channels);

/// Multichannel Levinson (Whittle / Wiggins-Robinson) recursion on the
/// Yule-Walker equations. The per-lag normalized sequence is not guaranteed
/// positive definite; if a normalized reflection matrix reaches unit norm the
/// fit is redone on the biased sequence given by `taper`. Throws
/// DegenerateError for a singular R(0) or when that also fails.
ARModel lwr(const Autocovariance& acov, Index order);

/// Autocovariance over epochs followed by lwr().
ARModel fit_lwr(const EpochedData& epochs, Index order, bool demean = true);

/// True when the pooled sample count exceeds 10 * order * n_channels.
bool fit_is_well_determined(Index n_samples, Index order, Index n_channels);

/// I - sum_p A(p) exp(-i 2 pi f p / rate), inverted.
Eigen::MatrixXcd transfer_function(const ARModel& model, double f, double sampling_rate);

/// Model power spectral matrix H Σ Hᴴ at frequency f (unnormalized).
Eigen::MatrixXcd model_spectrum(const ARModel& model, double f, double sampling_rate);

struct GrangerEstimate {
  Eigen::MatrixXd raw;  // raw(i, j) = flux i->j minus flux j->i
  Eigen::MatrixXd stddev;
  Eigen::MatrixXd normalized;
  BoolMatrix degenerate;
  std::optional<Band> band;  // empty for wide band
  std::size_t n_epochs = 0;
  std::vector<Eigen::MatrixXd> leave_one_out;
  std::vector<std::string> warnings;
};

/// Pairwise time-domain influence F(i, j) = ln(reduced_jj / full_jj): how
/// much channel i's past reduces the prediction error of channel j.
Eigen::MatrixXd wide_band_flux(const Autocovariance& acov, Index order);

/// Pairwise frequency-domain influence from the full bivariate model,
/// averaged over `frequencies`.
Eigen::MatrixXd narrow_band_flux(const Autocovariance& acov, Index order,
                                 const std::vector<double>& frequencies, double sampling_rate);

GrangerEstimate granger_wide(const EpochedData& epochs, Index order = 10, bool demean = true);

/// Band grid follows the epochs' segment length, as for PSI.
GrangerEstimate granger_narrow(const EpochedData& epochs, Index order, Band band, bool demean = true);

BoolMatrix significant(const GrangerEstimate& estimate, double threshold = 2.0);

}  // namespace phaseslope
