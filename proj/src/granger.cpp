#include "phaseslope/granger.hpp"

#include "phaseslope/error.hpp"
#include "phaseslope/jackknife.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

namespace phaseslope {

namespace {

// Closed forms for 1x1 and 2x2 keep the bivariate path exactly equivariant
// under channel relabeling; pivoted factorizations are not.
template <typename Mat>
Mat invert(const Mat& m) {
  using Scalar = typename Mat::Scalar;
  if (m.rows() == 1) {
    Mat out(1, 1);
    out(0, 0) = Scalar(1) / m(0, 0);
    return out;
  }
  if (m.rows() == 2) {
    const Scalar det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Mat out(2, 2);
    out(0, 0) = m(1, 1) / det;
    out(1, 1) = m(0, 0) / det;
    out(0, 1) = -m(0, 1) / det;
    out(1, 0) = -m(1, 0) / det;
    return out;
  }
  return m.partialPivLu().inverse();
}

// Largest singular value of L_f^-1 delta L_b^-T, the normalized reflection matrix.
double reflection_norm(const Eigen::MatrixXd& pf, const Eigen::MatrixXd& pb, const Eigen::MatrixXd& delta) {
  Eigen::LLT<Eigen::MatrixXd> lf(pf), lb(pb);
  if (lf.info() != Eigen::Success || lb.info() != Eigen::Success)
    return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd left = lf.matrixL().solve(delta);
  const Eigen::MatrixXd rho = lb.matrixL().solve(left.transpose()).transpose();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(rho).singularValues()(0);
}

Eigen::MatrixXd antisymmetric_difference(const Eigen::MatrixXd& flux) {
  const Index n = flux.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      out(i, j) = flux(i, j) - flux(j, i);
      out(j, i) = -out(i, j);
    }
  return out;
}

// Spectral influence of channel b on channel a in a bivariate model, after
// rotating out the instantaneous correlation of the innovations.
double spectral_influence(const Eigen::Matrix2cd& h, const Eigen::Matrix2d& sigma, int a, int b) {
  const double saa = sigma(a, a);
  const double sbb_given_a = sigma(b, b) - sigma(a, b) * sigma(a, b) / saa;
  const std::complex<double> intrinsic = h(a, a) + (sigma(a, b) / saa) * h(a, b);
  const double own = std::norm(intrinsic) * saa;
  const double causal = std::norm(h(a, b)) * sbb_given_a;
  if (!(own > 0.0)) throw DegenerateError("vanishing intrinsic power in spectral Granger decomposition");
  return std::log1p(causal / own);
}

std::vector<double> band_frequencies(const EpochedData& epochs, Band band) {
  const auto grid = frequency_grid(epochs.sampling_rate, epochs.plan.segment_len);
  const auto bins = band_bins(grid, band);
  std::vector<double> freqs;
  for (auto m : bins) freqs.push_back(grid[m]);
  freqs.push_back(grid[bins.back() + 1]);
  return freqs;
}

using FluxFn = std::function<Eigen::MatrixXd(const Autocovariance&)>;

GrangerEstimate jackknife_granger(const EpochedData& epochs, Index order, bool demean, const FluxFn& flux) {
  if (epochs.n_epochs() < 2) throw InputError("jackknife needs at least 2 epochs");
  if (order < 1) throw InputError("AR order must be at least 1");
  const auto parts = epoch_autocovariance(epochs, order, demean);
  GrangerEstimate out;
  out.n_epochs = parts.n_epochs();
  const Autocovariance total = combine_autocovariance(parts);
  if (!fit_is_well_determined(total.n_samples, order, epochs.n_channels())) {
    std::ostringstream msg;
    msg << "only " << total.n_samples << " samples for an order-" << order << " fit on "
        << epochs.n_channels() << " channels";
    out.warnings.push_back(msg.str());
  }
  out.raw = antisymmetric_difference(flux(total));
  out.leave_one_out.resize(parts.n_epochs());
  const auto k = static_cast<std::ptrdiff_t>(parts.n_epochs());
  std::vector<std::string> errors(parts.n_epochs());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < k; ++e) {
    try {
      out.leave_one_out[static_cast<std::size_t>(e)] =
          antisymmetric_difference(flux(combine_autocovariance(parts, static_cast<std::size_t>(e))));
    } catch (const Error& err) {
      errors[static_cast<std::size_t>(e)] = err.what();
    }
  }
  for (const auto& msg : errors)
    if (!msg.empty()) throw DegenerateError(msg);
  out.stddev = jackknife_std(out.leave_one_out);
  auto norm = normalize(out.raw, out.stddev);
  out.normalized = std::move(norm.values);
  out.degenerate = std::move(norm.degenerate);
  return out;
}

}  // namespace

EpochAutocovariance epoch_autocovariance(const EpochedData& epochs, Index max_lag, bool demean) {
  if (epochs.epochs.empty()) throw InputError("no epochs");
  if (max_lag < 0) throw InputError("negative lag");
  const Index len = epochs.plan.epoch_len;
  if (max_lag >= len) throw InputError("AR order must be shorter than an epoch");
  const Index n = epochs.n_channels();
  EpochAutocovariance out;
  out.samples_per_epoch = len;
  out.sums.resize(epochs.n_epochs());
  const auto k = static_cast<std::ptrdiff_t>(epochs.n_epochs());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < k; ++e) {
    Eigen::MatrixXd x = epochs.epochs[static_cast<std::size_t>(e)];
    if (demean) {
      for (Index c = 0; c < n; ++c) {
        double mean = 0.0;
        for (Index t = 0; t < len; ++t) mean += x(c, t);
        mean /= static_cast<double>(len);
        for (Index t = 0; t < len; ++t) x(c, t) -= mean;
      }
    }
    auto& lags = out.sums[static_cast<std::size_t>(e)];
    lags.assign(static_cast<std::size_t>(max_lag + 1), Eigen::MatrixXd::Zero(n, n));
    // Explicit loops: each entry sums in time order, independent of channel position.
    for (Index lag = 0; lag <= max_lag; ++lag)
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
          double acc = 0.0;
          for (Index t = lag; t < len; ++t) acc += x(i, t) * x(j, t - lag);
          lags[static_cast<std::size_t>(lag)](i, j) = acc;
        }
  }
  return out;
}

Autocovariance combine_autocovariance(const EpochAutocovariance& parts, std::size_t excluded) {
  if (parts.sums.empty()) throw InputError("no epochs");
  const std::size_t used = parts.n_epochs() - (excluded < parts.n_epochs() ? 1 : 0);
  if (used == 0) throw InputError("no epochs left after exclusion");
  Autocovariance out;
  out.n_samples = static_cast<Index>(used) * parts.samples_per_epoch;
  const auto& first = parts.sums.front();
  out.lags.assign(first.size(), Eigen::MatrixXd::Zero(first.front().rows(), first.front().cols()));
  for (std::size_t e = 0; e < parts.n_epochs(); ++e) {
    if (e == excluded) continue;
    for (std::size_t l = 0; l < first.size(); ++l) out.lags[l] += parts.sums[e][l];
  }
  const double total = static_cast<double>(out.n_samples);
  for (std::size_t l = 0; l < out.lags.size(); ++l) {
    const double products = static_cast<double>(used) * static_cast<double>(parts.samples_per_epoch - static_cast<Index>(l));
    out.lags[l] /= products;
    out.taper.push_back(products / total);
  }
  return out;
}

Autocovariance select_channels(const Autocovariance& acov, const std::vector<Index>& channels) {
  Autocovariance out;
  out.n_samples = acov.n_samples;
  out.taper = acov.taper;
  const auto m = static_cast<Index>(channels.size());
  for (const auto& r : acov.lags) {
    Eigen::MatrixXd sub(m, m);
    for (Index a = 0; a < m; ++a)
      for (Index b = 0; b < m; ++b) sub(a, b) = r(channels[static_cast<std::size_t>(a)], channels[static_cast<std::size_t>(b)]);
    out.lags.push_back(std::move(sub));
  }
  return out;
}

namespace {

struct ReflectionFailure {
  Index order;
};

ARModel lwr_recursion(const std::vector<Eigen::MatrixXd>& r, Index order) {
  {
    Eigen::LLT<Eigen::MatrixXd> chol(r[0]);
    if (chol.info() != Eigen::Success || !(r[0].diagonal().minCoeff() > 0.0))
      throw DegenerateError("singular zero-lag autocovariance (rank-deficient data)");
  }
  Eigen::MatrixXd pf = r[0];
  Eigen::MatrixXd pb = r[0];
  std::vector<Eigen::MatrixXd> fwd, bwd;
  for (Index m = 0; m < order; ++m) {
    Eigen::MatrixXd delta = r[static_cast<std::size_t>(m + 1)];
    for (Index p = 1; p <= m; ++p)
      delta -= fwd[static_cast<std::size_t>(p - 1)] * r[static_cast<std::size_t>(m + 1 - p)];
    if (!(reflection_norm(pf, pb, delta) < 1.0)) throw ReflectionFailure{m + 1};
    const Eigen::MatrixXd kf = delta * invert(pb);
    const Eigen::MatrixXd kb = delta.transpose() * invert(pf);
    std::vector<Eigen::MatrixXd> next_fwd, next_bwd;
    for (Index q = 1; q <= m; ++q) {
      next_fwd.push_back(fwd[static_cast<std::size_t>(q - 1)] - kf * bwd[static_cast<std::size_t>(m - q)]);
      next_bwd.push_back(bwd[static_cast<std::size_t>(q - 1)] - kb * fwd[static_cast<std::size_t>(m - q)]);
    }
    next_fwd.push_back(kf);
    next_bwd.push_back(kb);
    fwd = std::move(next_fwd);
    bwd = std::move(next_bwd);
    Eigen::MatrixXd pf_next = pf - kf * delta.transpose();
    Eigen::MatrixXd pb_next = pb - kb * delta;
    pf = 0.5 * (pf_next + pf_next.transpose());
    pb = 0.5 * (pb_next + pb_next.transpose());
  }
  return ARModel{std::move(fwd), std::move(pf)};
}

}  // namespace

ARModel lwr(const Autocovariance& acov, Index order) {
  if (order < 1) throw InputError("AR order must be at least 1");
  if (acov.max_lag() < order) throw InputError("autocovariance has fewer lags than the AR order");
  Index failed_at = 0;
  try {
    return lwr_recursion(acov.lags, order);
  } catch (const ReflectionFailure& f) {
    failed_at = f.order;
  }
  if (acov.taper.size() == acov.lags.size()) {
    std::vector<Eigen::MatrixXd> biased;
    for (std::size_t l = 0; l < acov.lags.size(); ++l) biased.push_back(acov.lags[l] * acov.taper[l]);
    try {
      ARModel model = lwr_recursion(biased, order);
      model.biased_fallback = true;
      return model;
    } catch (const ReflectionFailure& f) {
      failed_at = f.order;
    }
  }
  std::ostringstream msg;
  msg << "LWR recursion failed at order " << failed_at << ": reflection matrix norm >= 1";
  throw DegenerateError(msg.str());
}

bool fit_is_well_determined(Index n_samples, Index order, Index n_channels) {
  return n_samples > order * n_channels * 10;
}

ARModel fit_lwr(const EpochedData& epochs, Index order, bool demean) {
  return lwr(combine_autocovariance(epoch_autocovariance(epochs, order, demean)), order);
}

Eigen::MatrixXcd transfer_function(const ARModel& model, double f, double sampling_rate) {
  const Index n = model.n_channels();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
  for (Index p = 1; p <= model.order(); ++p) {
    const double phase = -2.0 * std::numbers::pi * f * static_cast<double>(p) / sampling_rate;
    const std::complex<double> z(std::cos(phase), std::sin(phase));
    const auto& ap = model.coefficients[static_cast<std::size_t>(p - 1)];
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) a(i, j) -= ap(i, j) * z;
  }
  const std::complex<double> det = a.rows() == 2 ? a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) : a.determinant();
  if (!(std::abs(det) > 1e-12)) {
    std::ostringstream msg;
    msg << "AR transfer function is singular at " << f << " Hz";
    throw DegenerateError(msg.str());
  }
  return invert(a);
}

Eigen::MatrixXcd model_spectrum(const ARModel& model, double f, double sampling_rate) {
  const Eigen::MatrixXcd h = transfer_function(model, f, sampling_rate);
  return h * model.residual_cov.cast<std::complex<double>>() * h.adjoint();
}

Eigen::MatrixXd wide_band_flux(const Autocovariance& acov, Index order) {
  const Index n = acov.lags.front().rows();
  std::vector<double> reduced(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) reduced[static_cast<std::size_t>(i)] = lwr(select_channels(acov, {i}), order).residual_cov(0, 0);
  Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const ARModel full = lwr(select_channels(acov, {i, j}), order);
      flux(i, j) = std::log(reduced[static_cast<std::size_t>(j)] / full.residual_cov(1, 1));
      flux(j, i) = std::log(reduced[static_cast<std::size_t>(i)] / full.residual_cov(0, 0));
    }
  return flux;
}

Eigen::MatrixXd narrow_band_flux(const Autocovariance& acov, Index order,
                                 const std::vector<double>& frequencies, double sampling_rate) {
  if (frequencies.empty()) throw InputError("empty band");
  const Index n = acov.lags.front().rows();
  Eigen::MatrixXd flux = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const ARModel full = lwr(select_channels(acov, {i, j}), order);
      const Eigen::Matrix2d sigma = full.residual_cov;
      double to_j = 0.0, to_i = 0.0;
      for (double f : frequencies) {
        const Eigen::Matrix2cd h = transfer_function(full, f, sampling_rate);
        to_j += spectral_influence(h, sigma, 1, 0);
        to_i += spectral_influence(h, sigma, 0, 1);
      }
      flux(i, j) = to_j / static_cast<double>(frequencies.size());
      flux(j, i) = to_i / static_cast<double>(frequencies.size());
    }
  return flux;
}

GrangerEstimate granger_wide(const EpochedData& epochs, Index order, bool demean) {
  return jackknife_granger(epochs, order, demean,
                           [order](const Autocovariance& a) { return wide_band_flux(a, order); });
}

GrangerEstimate granger_narrow(const EpochedData& epochs, Index order, Band band, bool demean) {
  const auto freqs = band_frequencies(epochs, band);
  const double rate = epochs.sampling_rate;
  auto out = jackknife_granger(epochs, order, demean, [&](const Autocovariance& a) {
    return narrow_band_flux(a, order, freqs, rate);
  });
  out.band = band;
  return out;
}

BoolMatrix significant(const GrangerEstimate& estimate, double threshold) {
  BoolMatrix out(estimate.normalized.rows(), estimate.normalized.cols());
  for (Index j = 0; j < out.cols(); ++j)
    for (Index i = 0; i < out.rows(); ++i)
      out(i, j) = !estimate.degenerate(i, j) && std::abs(estimate.normalized(i, j)) > threshold;
  return out;
}

}  // namespace phaseslope
