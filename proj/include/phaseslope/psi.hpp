#pragma once

#include "phaseslope/jackknife.hpp"
#include "phaseslope/spectra.hpp"
#include "phaseslope/timeseries.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace phaseslope {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Closed frequency interval [f_min, f_max] whose edges lie on the
/// spectral grid.
struct Band {
  double f_min = 0.0;
  double f_max = 0.0;

  double center() const { return 0.5 * (f_min + f_max); }
  double width() const { return f_max - f_min; }
};

/// Band of `width` Hz centered on `center`.
Band centered_band(double center, double width);

/// Whole grid from 0 Hz to Nyquist.
Band full_band(const std::vector<double>& frequencies);

/// Grid indices f summed over: f_min <= f and f + df <= f_max. Throws
/// InputError if the band is off-grid, outside the grid or holds fewer than
/// two bins.
std::vector<std::size_t> band_bins(const std::vector<double>& frequencies, Band band);

/// Im( sum_f conj(C_ij(f)) C_ij(f + df) ). Antisymmetric with zero diagonal.
Eigen::MatrixXd psi_raw(const Coherency& coh, Band band);

/// Same quantity written as sum_f |C(f)| |C(f+df)| sin(phase difference).
/// Used to cross-check psi_raw.
Eigen::MatrixXd psi_weighted_identity_check(const Coherency& coh, Band band);

struct PsiEstimate {
  Eigen::MatrixXd raw;
  Eigen::MatrixXd stddev;
  Eigen::MatrixXd normalized;
  BoolMatrix degenerate;
  Band band;
  std::size_t n_epochs = 0;
  /// Raw PSI with epoch k removed, one matrix per epoch.
  std::vector<Eigen::MatrixXd> leave_one_out;
};

/// PSI over `band`, normalized by the leave-one-epoch-out jackknife.
PsiEstimate jackknife_psi(const EpochedData& epochs, const SpectralConfig& config, Band band);

/// Reuses precomputed per-epoch spectra; convenient for band sweeps.
PsiEstimate jackknife_psi(const EpochSpectra& spectra, Band band);

/// |normalized| > threshold; degenerate entries are never significant.
BoolMatrix significant(const PsiEstimate& psi, double threshold = 2.0);

struct NetFlux {
  Eigen::VectorXd raw;         // row sums of the raw PSI
  Eigen::VectorXd stddev;      // jackknife spread of each row sum
  Eigen::VectorXd normalized;  // raw / std, 0 where degenerate
  std::vector<bool> degenerate;
};

/// Per-channel net flux: row sums of raw PSI divided by the jackknife
/// spread of the row sums themselves.
NetFlux net_flux(const PsiEstimate& psi);

/// One estimate per band center. Every band must lie within [0, Nyquist] and
/// `width` must cover at least two grid steps.
std::vector<PsiEstimate> band_sweep(const EpochedData& epochs, const SpectralConfig& config,
                                    double width, std::span<const double> centers);

std::vector<PsiEstimate> band_sweep(const EpochSpectra& spectra, double width,
                                    std::span<const double> centers);

}  // namespace phaseslope
