#include "phaseslope/spectra.hpp"

#include "phaseslope/error.hpp"
#include "phaseslope/fourier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace phaseslope {

SpectralConfig SpectralConfig::from_plan(const EpochPlan& plan, bool demean) {
  return SpectralConfig{plan.segment_len, Window::hanning, plan.overlap_fraction, demean};
}

std::vector<double> hanning_window(Index n) {
  if (n < 2) throw InputError("Hanning window needs at least 2 points");
  std::vector<double> w(static_cast<std::size_t>(n));
  const double denom = static_cast<double>(n - 1);
  for (Index k = 0; k < n; ++k)
    w[static_cast<std::size_t>(k)] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / denom));
  // Force exact symmetry; cos rounding differs slightly between k and n-1-k.
  for (Index k = 0; k < n / 2; ++k) w[static_cast<std::size_t>(n - 1 - k)] = w[static_cast<std::size_t>(k)];
  return w;
}

std::vector<double> frequency_grid(double sampling_rate, Index segment_len) {
  std::vector<double> f(static_cast<std::size_t>(segment_len / 2 + 1));
  for (std::size_t m = 0; m < f.size(); ++m)
    f[m] = static_cast<double>(m) * sampling_rate / static_cast<double>(segment_len);
  return f;
}

namespace {

struct SegmentKernel {
  Index n_channels;
  Index segment_len;
  bool demean;
  std::vector<double> window;
  std::vector<Index> starts;

  SegmentKernel(const EpochedData& epochs, const SpectralConfig& config)
      : n_channels(epochs.n_channels()),
        segment_len(config.segment_len),
        demean(config.demean_segments),
        window(hanning_window(config.segment_len)) {
    if (epochs.epochs.empty()) throw InputError("no epochs to analyze");
    EpochPlan plan = epochs.plan;
    plan.segment_len = config.segment_len;
    plan.overlap_fraction = config.overlap_fraction;
    if (plan.segment_len > plan.epoch_len) throw InputError("segment longer than epoch");
    starts = segment_starts(plan);
    if (starts.empty()) throw InputError("zero segments per epoch");
  }

  Index n_freq() const { return segment_len / 2 + 1; }

  // Sum over the epoch's segments of vec(X Xᴴ) per frequency.
  Eigen::MatrixXcd epoch_sum(const Eigen::MatrixXd& epoch) const {
    const Index nf = n_freq();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n_channels * n_channels, nf);
    Eigen::MatrixXcd transform(n_channels, nf);
    std::vector<double> buf(static_cast<std::size_t>(segment_len));
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(nf));
    for (Index s : starts) {
      for (Index c = 0; c < n_channels; ++c) {
        double mean = 0.0;
        if (demean) {
          for (Index t = 0; t < segment_len; ++t) mean += epoch(c, s + t);
          mean /= static_cast<double>(segment_len);
        }
        for (Index t = 0; t < segment_len; ++t)
          buf[static_cast<std::size_t>(t)] = (epoch(c, s + t) - mean) * window[static_cast<std::size_t>(t)];
        dft_into(buf, spec);
        for (Index m = 0; m < nf; ++m) transform(c, m) = spec[static_cast<std::size_t>(m)];
      }
      for (Index m = 0; m < nf; ++m)
        for (Index j = 0; j < n_channels; ++j) {
          const std::complex<double> xj = std::conj(transform(j, m));
          for (Index i = 0; i < n_channels; ++i) sum(i + j * n_channels, m) += transform(i, m) * xj;
        }
    }
    return sum;
  }
};

CrossSpectrum unpack(const Eigen::MatrixXcd& total, Index n, const std::vector<double>& freqs,
                     std::size_t n_segments) {
  CrossSpectrum cs;
  cs.frequencies = freqs;
  cs.n_segments = n_segments;
  cs.matrices.reserve(freqs.size());
  const double scale = 1.0 / static_cast<double>(n_segments);
  for (Index m = 0; m < total.cols(); ++m) {
    Eigen::MatrixXcd s = Eigen::Map<const Eigen::MatrixXcd>(total.col(m).data(), n, n) * scale;
    // Diagonal of X conj(X) is real by construction; drop rounding residue.
    for (Index i = 0; i < n; ++i) s(i, i) = std::complex<double>(s(i, i).real(), 0.0);
    cs.matrices.push_back(std::move(s));
  }
  return cs;
}

}  // namespace

EpochSpectra epoch_spectra(const EpochedData& epochs, const SpectralConfig& config) {
  const SegmentKernel kernel(epochs, config);
  EpochSpectra out;
  out.frequencies = frequency_grid(epochs.sampling_rate, config.segment_len);
  out.n_channels = kernel.n_channels;
  out.segments_per_epoch = kernel.starts.size();
  out.sums.resize(epochs.n_epochs());
  const auto k = static_cast<std::ptrdiff_t>(epochs.n_epochs());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < k; ++e)
    out.sums[static_cast<std::size_t>(e)] = kernel.epoch_sum(epochs.epochs[static_cast<std::size_t>(e)]);
  return out;
}

CrossSpectrum average_spectra(const EpochSpectra& spectra, std::size_t excluded) {
  if (spectra.sums.empty()) throw InputError("no epochs to average");
  const std::size_t used = spectra.n_epochs() - (excluded < spectra.n_epochs() ? 1 : 0);
  if (used == 0) throw InputError("zero segments left after exclusion");
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(spectra.sums.front().rows(), spectra.sums.front().cols());
  for (std::size_t e = 0; e < spectra.n_epochs(); ++e)
    if (e != excluded) total += spectra.sums[e];
  return unpack(total, spectra.n_channels, spectra.frequencies, used * spectra.segments_per_epoch);
}

std::vector<CrossSpectrum> leave_one_out_spectra(const EpochSpectra& spectra) {
  std::vector<CrossSpectrum> out(spectra.n_epochs());
  const auto k = static_cast<std::ptrdiff_t>(spectra.n_epochs());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < k; ++e)
    out[static_cast<std::size_t>(e)] = average_spectra(spectra, static_cast<std::size_t>(e));
  return out;
}

CrossSpectrum cross_spectrum(const EpochedData& epochs, const SpectralConfig& config) {
  return average_spectra(epoch_spectra(epochs, config));
}

Coherency coherency(const CrossSpectrum& cs, std::size_t first, std::size_t last) {
  Coherency out;
  out.frequencies = cs.frequencies;
  out.matrices.reserve(cs.matrices.size());
  const Index n = cs.n_channels();
  for (std::size_t m = 0; m < cs.matrices.size(); ++m) {
    const auto& s = cs.matrices[m];
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, n);
    if (m >= first && m <= last) {
      for (Index i = 0; i < n; ++i) {
        if (!(s(i, i).real() > 0.0)) {
          std::ostringstream msg;
          msg << "degenerate frequency: channel " << i << " has zero power at " << cs.frequencies[m]
              << " Hz";
          throw DegenerateError(msg.str());
        }
      }
      for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
          if (i == j) {
            c(i, i) = 1.0;
            continue;
          }
          c(i, j) = s(i, j) / std::sqrt(s(i, i).real() * s(j, j).real());
        }
      }
    }
    out.matrices.push_back(std::move(c));
  }
  return out;
}

Coherency coherency(const CrossSpectrum& cs) {
  if (cs.matrices.empty()) throw InputError("empty cross-spectrum");
  return coherency(cs, 0, cs.matrices.size() - 1);
}

namespace reference {

CrossSpectrum cross_spectrum(const EpochedData& epochs, const SpectralConfig& config) {
  const SegmentKernel kernel(epochs, config);
  const auto freqs = frequency_grid(epochs.sampling_rate, config.segment_len);
  const Index n = kernel.n_channels;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(n * n, kernel.n_freq());
  for (const auto& e : epochs.epochs) total += kernel.epoch_sum(e);
  return unpack(total, n, freqs, epochs.n_epochs() * kernel.starts.size());
}

std::vector<CrossSpectrum> leave_one_out_spectra(const EpochSpectra& spectra) {
  std::vector<CrossSpectrum> out;
  out.reserve(spectra.n_epochs());
  for (std::size_t e = 0; e < spectra.n_epochs(); ++e) out.push_back(average_spectra(spectra, e));
  return out;
}

}  // namespace reference

}  // namespace phaseslope
