#pragma once

#include "phaseslope/timeseries.hpp"

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <vector>

namespace phaseslope {

enum class Window { hanning };

/// Segmenting and tapering applied before the Fourier transform.
struct SpectralConfig {
  Index segment_len = 0;
  Window window = Window::hanning;
  double overlap_fraction = 0.5;
  bool demean_segments = true;

  /// Matches the segment geometry of an epoch plan.
  static SpectralConfig from_plan(const EpochPlan& plan, bool demean = true);
};

/// Symmetric Hanning taper w[k] = 0.5 (1 - cos(2 pi k / (n - 1))).
std::vector<double> hanning_window(Index n);

/// Frequencies 0, df, ..., up to Nyquist for a segment of `segment_len` samples.
std::vector<double> frequency_grid(double sampling_rate, Index segment_len);

/// Segment-averaged cross-spectral matrices, S_ij(f) = <X_i(f) conj(X_j(f))>.
struct CrossSpectrum {
  std::vector<double> frequencies;
  std::vector<Eigen::MatrixXcd> matrices;
  std::size_t n_segments = 0;

  double resolution() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
  Index n_channels() const { return matrices.empty() ? 0 : matrices.front().rows(); }
};

/// S_ij(f) / sqrt(S_ii(f) S_jj(f)).
struct Coherency {
  std::vector<double> frequencies;
  std::vector<Eigen::MatrixXcd> matrices;

  double resolution() const { return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0; }
  Index n_channels() const { return matrices.empty() ? 0 : matrices.front().rows(); }
};

/// Unnormalized segment sums of X Xᴴ, kept per epoch so that leave-one-out
/// spectra can be re-averaged without re-transforming. Column f of
/// `sums[k]` is the column-major n x n matrix for frequency f.
struct EpochSpectra {
  std::vector<double> frequencies;
  std::vector<Eigen::MatrixXcd> sums;  // one (n*n) x n_freq block per epoch
  Index n_channels = 0;
  std::size_t segments_per_epoch = 0;

  std::size_t n_epochs() const { return sums.size(); }
};

/// Transforms every segment of every epoch. Epochs are processed in
/// parallel; each epoch's segments are accumulated in order.
EpochSpectra epoch_spectra(const EpochedData& epochs, const SpectralConfig& config);

/// Averages the epoch sums over all epochs, except `excluded` when it is a
/// valid epoch index. Epochs are added in index order.
CrossSpectrum average_spectra(const EpochSpectra& spectra,
                              std::size_t excluded = static_cast<std::size_t>(-1));

/// All K leave-one-epoch-out spectra, computed in parallel.
std::vector<CrossSpectrum> leave_one_out_spectra(const EpochSpectra& spectra);

/// Equal-weight average over every segment of every epoch.
CrossSpectrum cross_spectrum(const EpochedData& epochs, const SpectralConfig& config);

/// Throws DegenerateError naming channel and frequency when an auto-spectrum
/// used by the result is zero.
Coherency coherency(const CrossSpectrum& cs);

/// Like coherency(), but only frequencies with index in [first, last] must be
/// non-degenerate; other bins are left at zero.
Coherency coherency(const CrossSpectrum& cs, std::size_t first, std::size_t last);

namespace reference {

/// Serial single-pass estimator kept to check the parallel kernels.
CrossSpectrum cross_spectrum(const EpochedData& epochs, const SpectralConfig& config);

std::vector<CrossSpectrum> leave_one_out_spectra(const EpochSpectra& spectra);

}  // namespace reference

}  // namespace phaseslope
