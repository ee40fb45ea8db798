#include "phaseslope/psi.hpp"

#include "phaseslope/error.hpp"

#include <cmath>
#include <sstream>

namespace phaseslope {

namespace {

constexpr double kGridTolerance = 1e-6;

std::size_t grid_index(const std::vector<double>& freqs, double f, const char* what) {
  const double df = freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0;
  if (!(df > 0.0)) throw InputError("frequency grid has fewer than two bins");
  const double pos = f / df;
  const double rounded = std::round(pos);
  if (std::abs(pos - rounded) > kGridTolerance) {
    std::ostringstream msg;
    msg << "band " << what << " " << f << " Hz is not on the " << df << " Hz grid";
    throw InputError(msg.str());
  }
  if (rounded < 0.0 || rounded > static_cast<double>(freqs.size() - 1)) {
    std::ostringstream msg;
    msg << "band " << what << " " << f << " Hz lies outside [0, " << freqs.back() << "] Hz";
    throw InputError(msg.str());
  }
  return static_cast<std::size_t>(rounded);
}

// Shared by jackknife_psi and band_sweep; the leave-one-out spectra do not
// depend on the band.
PsiEstimate estimate_from(const CrossSpectrum& total, const std::vector<CrossSpectrum>& loo, Band band) {
  const auto bins = band_bins(total.frequencies, band);
  const std::size_t first = bins.front();
  const std::size_t last = bins.back() + 1;

  PsiEstimate out;
  out.band = band;
  out.n_epochs = loo.size();
  out.raw = psi_raw(coherency(total, first, last), band);
  out.leave_one_out.resize(loo.size());
  const auto k = static_cast<std::ptrdiff_t>(loo.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < k; ++e)
    out.leave_one_out[static_cast<std::size_t>(e)] =
        psi_raw(coherency(loo[static_cast<std::size_t>(e)], first, last), band);
  out.stddev = jackknife_std(out.leave_one_out);
  auto norm = normalize(out.raw, out.stddev);
  out.normalized = std::move(norm.values);
  out.degenerate = std::move(norm.degenerate);
  return out;
}

}  // namespace

Band centered_band(double center, double width) {
  if (!(width > 0.0)) throw InputError("band width must be positive");
  return Band{center - 0.5 * width, center + 0.5 * width};
}

Band full_band(const std::vector<double>& frequencies) {
  if (frequencies.size() < 2) throw InputError("frequency grid has fewer than two bins");
  return Band{frequencies.front(), frequencies.back()};
}

std::vector<std::size_t> band_bins(const std::vector<double>& frequencies, Band band) {
  if (!(band.f_min < band.f_max)) throw InputError("band requires f_min < f_max");
  const std::size_t lo = grid_index(frequencies, band.f_min, "lower edge");
  const std::size_t hi = grid_index(frequencies, band.f_max, "upper edge");
  if (hi < lo + 1) throw InputError("band is narrower than two frequency bins");
  std::vector<std::size_t> bins;
  for (std::size_t m = lo; m < hi; ++m) bins.push_back(m);
  return bins;
}

Eigen::MatrixXd psi_raw(const Coherency& coh, Band band) {
  const auto bins = band_bins(coh.frequencies, band);
  const Index n = coh.n_channels();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      std::complex<double> acc = 0.0;
      for (std::size_t m : bins) acc += std::conj(coh.matrices[m](i, j)) * coh.matrices[m + 1](i, j);
      out(i, j) = acc.imag();
      out(j, i) = -acc.imag();
    }
  return out;
}

Eigen::MatrixXd psi_weighted_identity_check(const Coherency& coh, Band band) {
  const auto bins = band_bins(coh.frequencies, band);
  const Index n = coh.n_channels();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      double acc = 0.0;
      for (std::size_t m : bins) {
        const auto a = coh.matrices[m](i, j);
        const auto b = coh.matrices[m + 1](i, j);
        acc += std::abs(a) * std::abs(b) * std::sin(std::arg(b) - std::arg(a));
      }
      out(i, j) = acc;
    }
  return out;
}

PsiEstimate jackknife_psi(const EpochSpectra& spectra, Band band) {
  if (spectra.n_epochs() < 2) throw InputError("jackknife needs at least 2 epochs");
  return estimate_from(average_spectra(spectra), leave_one_out_spectra(spectra), band);
}

PsiEstimate jackknife_psi(const EpochedData& epochs, const SpectralConfig& config, Band band) {
  if (epochs.n_epochs() < 2) throw InputError("jackknife needs at least 2 epochs");
  return jackknife_psi(epoch_spectra(epochs, config), band);
}

BoolMatrix significant(const PsiEstimate& psi, double threshold) {
  BoolMatrix out(psi.normalized.rows(), psi.normalized.cols());
  for (Index j = 0; j < out.cols(); ++j)
    for (Index i = 0; i < out.rows(); ++i)
      out(i, j) = !psi.degenerate(i, j) && std::abs(psi.normalized(i, j)) > threshold;
  return out;
}

NetFlux net_flux(const PsiEstimate& psi) {
  if (psi.leave_one_out.size() < 2) throw InputError("net flux needs leave-one-out estimates");
  const Index n = psi.raw.rows();
  NetFlux out;
  out.raw = psi.raw.rowwise().sum();
  out.stddev.resize(n);
  out.normalized = Eigen::VectorXd::Zero(n);
  out.degenerate.assign(static_cast<std::size_t>(n), false);
  std::vector<double> sums(psi.leave_one_out.size());
  for (Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < sums.size(); ++k) sums[k] = psi.leave_one_out[k].row(i).sum();
    out.stddev(i) = jackknife_std(sums);
    if (out.stddev(i) > 0.0)
      out.normalized(i) = out.raw(i) / out.stddev(i);
    else
      out.degenerate[static_cast<std::size_t>(i)] = true;
  }
  return out;
}

std::vector<PsiEstimate> band_sweep(const EpochSpectra& spectra, double width,
                                    std::span<const double> centers) {
  if (centers.empty()) throw InputError("band sweep needs at least one center");
  if (spectra.n_epochs() < 2) throw InputError("jackknife needs at least 2 epochs");
  const double df = spectra.frequencies.size() > 1 ? spectra.frequencies[1] : 0.0;
  if (width < 2.0 * df - kGridTolerance * df)
    throw InputError("band width must cover at least two frequency steps");
  const double nyquist = spectra.frequencies.back();
  std::vector<Band> bands;
  for (double c : centers) {
    const Band b = centered_band(c, width);
    if (b.f_min < -kGridTolerance * df || b.f_max > nyquist + kGridTolerance * df) {
      std::ostringstream msg;
      msg << "band centered at " << c << " Hz exceeds [0, " << nyquist << "] Hz";
      throw InputError(msg.str());
    }
    band_bins(spectra.frequencies, b);
    bands.push_back(b);
  }
  const CrossSpectrum total = average_spectra(spectra);
  const auto loo = leave_one_out_spectra(spectra);
  std::vector<PsiEstimate> out;
  out.reserve(bands.size());
  for (const auto& b : bands) out.push_back(estimate_from(total, loo, b));
  return out;
}

std::vector<PsiEstimate> band_sweep(const EpochedData& epochs, const SpectralConfig& config,
                                    double width, std::span<const double> centers) {
  return band_sweep(epoch_spectra(epochs, config), width, centers);
}

}  // namespace phaseslope
