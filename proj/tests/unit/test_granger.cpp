#include "fixtures.hpp"

#include "phaseslope/error.hpp"
#include "phaseslope/granger.hpp"
#include "phaseslope/simulate.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

using namespace phaseslope;

namespace {

EpochedData epochs_of(const Eigen::MatrixXd& data) {
  return epoch(make_record(data, 100.0), EpochPlan::from_seconds(100.0));
}

Eigen::MatrixXd ar_series(const ARModel& model, Index n, std::uint64_t seed) {
  Rng rng(seed);
  return simulate_ar(model, n, 1000, rng);
}

// Block Yule-Walker equations solved directly: [R(1) .. R(P)] = [A(1) .. A(P)] G
// with G(p, k) = R(k - p) and R(-m) = R(m)^T.
ARModel yule_walker_oracle(const Autocovariance& acov, Index order) {
  const Index n = acov.lags.front().rows();
  const auto r = [&](Index k) -> Eigen::MatrixXd {
    return k >= 0 ? acov.lags[static_cast<std::size_t>(k)] : acov.lags[static_cast<std::size_t>(-k)].transpose();
  };
  Eigen::MatrixXd g(n * order, n * order), rhs(n, n * order);
  for (Index p = 0; p < order; ++p) {
    rhs.middleCols(p * n, n) = r(p + 1);
    for (Index k = 0; k < order; ++k) g.block(p * n, k * n, n, n) = r(k - p);
  }
  const Eigen::MatrixXd a = g.transpose().fullPivLu().solve(rhs.transpose()).transpose();
  ARModel m;
  m.residual_cov = r(0);
  for (Index p = 0; p < order; ++p) {
    m.coefficients.push_back(a.middleCols(p * n, n));
    m.residual_cov -= m.coefficients.back() * r(p + 1).transpose();
  }
  return m;
}

ARModel uncoupled_pair() {
  ARModel m;
  Eigen::MatrixXd a1(2, 2), a2(2, 2);
  a1 << 0.6, 0.0, 0.0, -0.4;
  a2 << -0.3, 0.0, 0.0, 0.2;
  m.coefficients = {a1, a2};
  m.residual_cov = Eigen::MatrixXd::Identity(2, 2);
  return m;
}

}  // namespace

TEST_CASE("univariate AR(1) coefficient") {
  ARModel truth;
  truth.coefficients = {Eigen::MatrixXd::Constant(1, 1, 0.5)};
  truth.residual_cov = Eigen::MatrixXd::Identity(1, 1);
  const auto fit = fit_lwr(epochs_of(ar_series(truth, 60000, 5)), 1);
  CHECK(std::abs(fit.coefficients[0](0, 0) - 0.5) <= 0.03);
  CHECK(std::abs(fit.residual_cov(0, 0) - 1.0) <= 0.05);
}

TEST_CASE("white noise fits near-zero coefficients") {
  const auto fit = fit_lwr(epochs_of(fixtures::white(2, 60000, 9)), 4);
  for (const auto& a : fit.coefficients) CHECK(a.cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("recursion solves the block Yule-Walker system") {
  const auto e = epochs_of(fixtures::mixed_independent(4, 3, 8000).data);
  const auto acov = combine_autocovariance(epoch_autocovariance(e, 6));
  const auto fast = lwr(acov, 6);
  const auto slow = yule_walker_oracle(acov, 6);
  for (Index p = 0; p < 6; ++p) {
    const auto& a = fast.coefficients[static_cast<std::size_t>(p)];
    const auto& b = slow.coefficients[static_cast<std::size_t>(p)];
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8 * (1.0 + b.cwiseAbs().maxCoeff()));
  }
  CHECK((fast.residual_cov - slow.residual_cov).cwiseAbs().maxCoeff() <= 1e-8 * slow.residual_cov.norm());
  CHECK((fast.residual_cov - fast.residual_cov.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("autocovariance against a direct lagged sum") {
  const Eigen::MatrixXd x = fixtures::white(2, 800, 2);
  const auto e = epochs_of(x);
  const auto acov = combine_autocovariance(epoch_autocovariance(e, 3));
  CHECK(acov.n_samples == 800);
  Eigen::MatrixXd direct = Eigen::MatrixXd::Zero(2, 2);
  for (const auto& ep : e.epochs) {
    const Eigen::MatrixXd c = ep.colwise() - ep.rowwise().mean();
    for (Index t = 2; t < c.cols(); ++t) direct += c.col(t) * c.col(t - 2).transpose();
  }
  direct /= 2.0 * 398.0;
  CHECK((acov.lags[2] - direct).cwiseAbs().maxCoeff() <= 1e-12);
  const auto loo = combine_autocovariance(epoch_autocovariance(e, 3), 0);
  CHECK(loo.n_samples == 400);
}

// Two five-minute epochs: lag truncation at epoch edges is negligible here.
EpochedData long_epochs(const Eigen::MatrixXd& data) {
  return epoch(make_record(data, 100.0), EpochPlan::from_seconds(100.0, 300.0, 2.0, 0.5));
}

TEST_CASE("recursion falls back to the biased sequence") {
  Autocovariance acov;
  acov.n_samples = 100;
  acov.lags = {Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 1.0)};
  CHECK_THROWS_AS(lwr(acov, 1), DegenerateError);
  acov.taper = {1.0, 0.99};
  const auto fit = lwr(acov, 1);
  CHECK(fit.biased_fallback);
  CHECK(fit.coefficients[0](0, 0) == doctest::Approx(0.99));
  CHECK(fit.residual_cov(0, 0) == doctest::Approx(1.0 - 0.99 * 0.99));
}

TEST_CASE("random stable AR(5) recovers unit innovation covariance") {
  Rng rng(77);
  const auto draw = random_stable_ar(2, 5, ARConstraint::unidirectional_2to1, rng);
  const auto fit = fit_lwr(long_epochs(ar_series(draw.model, 60000, 78)), 5);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  CHECK((fit.residual_cov - eye).norm() / eye.norm() <= 0.10);
}

TEST_CASE("random stable AR(5) coefficients converge at 60000 samples") {
  const int seeds = 300;
  int close = 0;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    const auto draw = random_stable_ar(2, 5, ARConstraint::unidirectional_2to1, rng);
    const auto fit = fit_lwr(long_epochs(simulate_ar(draw.model, 60000, 1000, rng)), 5);
    double err = 0.0;
    for (std::size_t p = 0; p < 5; ++p)
      err = std::max(err, (fit.coefficients[p] - draw.model.coefficients[p]).cwiseAbs().maxCoeff());
    if (err < 0.05) ++close;
  }
  MESSAGE("coefficient error < 0.05 in " << close << " of " << seeds);
  CHECK(close >= 0.95 * seeds);
}

TEST_CASE("known AR(2) coefficients are recovered") {
  const auto truth = uncoupled_pair();
  const auto fit = fit_lwr(epochs_of(ar_series(truth, 60000, 12)), 2);
  for (std::size_t p = 0; p < 2; ++p) CHECK((fit.coefficients[p] - truth.coefficients[p]).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("adding a channel never increases the prediction error") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto e = epochs_of(fixtures::mixed_independent(60 + s, 3, 4000).data);
    const auto flux = wide_band_flux(combine_autocovariance(epoch_autocovariance(e, 10)), 10);
    CHECK(flux.minCoeff() >= -1e-12);
  }
}

TEST_CASE("swapping channels negates the estimate exactly") {
  const auto rec = fixtures::coupled_ar1(3, 4000);
  Eigen::MatrixXd swapped(2, rec.data.cols());
  swapped.row(0) = rec.data.row(1);
  swapped.row(1) = rec.data.row(0);
  const auto a = granger_wide(epochs_of(rec.data), 10);
  const auto b = granger_wide(epochs_of(swapped), 10);
  CHECK(a.raw(0, 1) == -a.raw(1, 0));
  CHECK(b.raw(0, 1) == a.raw(1, 0));
  CHECK(b.normalized(0, 1) == a.normalized(1, 0));
  const auto na = granger_narrow(epochs_of(rec.data), 10, Band{5.0, 15.0});
  const auto nb = granger_narrow(epochs_of(swapped), 10, Band{5.0, 15.0});
  CHECK(nb.raw(0, 1) == na.raw(1, 0));
}

TEST_CASE("coupled AR(1): wide and narrow agree on the direction") {
  const auto e = epochs_of(fixtures::coupled_ar1(8, 20000).data);
  const auto wide = granger_wide(e, 10);
  const auto narrow = granger_narrow(e, 10, Band{5.0, 15.0});
  CHECK(wide.normalized(0, 1) < -2.0);
  CHECK(narrow.normalized(0, 1) < -2.0);
  CHECK(narrow.band.has_value());
  CHECK_FALSE(wide.band.has_value());
}

TEST_CASE("independent sources without mixing are rarely significant") {
  int hits = 0;
  const auto truth = uncoupled_pair();
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto g = granger_wide(epochs_of(ar_series(truth, 4000, 300 + s)), 2);
    if (significant(g)(0, 1)) ++hits;
  }
  CHECK(hits <= 15);
}

TEST_CASE("transfer function and model spectrum") {
  ARModel m;
  m.coefficients = {Eigen::MatrixXd::Constant(1, 1, 0.5)};
  m.residual_cov = Eigen::MatrixXd::Constant(1, 1, 2.0);
  const double f = 12.5;
  const std::complex<double> z = std::polar(1.0, -2.0 * M_PI * f / 100.0);
  const auto h = transfer_function(m, f, 100.0);
  CHECK(std::abs(h(0, 0) - 1.0 / (1.0 - 0.5 * z)) < 1e-14);
  CHECK(model_spectrum(m, f, 100.0)(0, 0).real() == doctest::Approx(2.0 / std::norm(1.0 - 0.5 * z)));
  ARModel unit;
  unit.coefficients = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
  unit.residual_cov = Eigen::MatrixXd::Identity(1, 1);
  CHECK_THROWS_AS(transfer_function(unit, 0.0, 100.0), DegenerateError);
}

TEST_CASE("degenerate inputs") {
  Eigen::MatrixXd x = fixtures::white(2, 2000, 5);
  x.row(1).setZero();
  CHECK_THROWS_AS(granger_wide(epochs_of(x), 3), DegenerateError);
  CHECK(fit_is_well_determined(60000, 10, 2));
  CHECK_FALSE(fit_is_well_determined(150, 10, 2));
}

TEST_CASE("thin data adds a warning") {
  const auto g = granger_wide(epochs_of(fixtures::white(2, 800, 4)), 45);
  CHECK_FALSE(g.warnings.empty());
}

TEST_CASE("independent white channels are rarely significant") {
  int hits = 0;
  for (std::uint64_t s = 0; s < 100; ++s)
    if (significant(granger_wide(epochs_of(fixtures::white(2, 4000, 900 + s)), 10))(0, 1)) ++hits;
  CHECK(hits <= 10);
}

TEST_CASE("full-band narrow estimate agrees in sign with the wide estimate") {
  int agree = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(1200 + s);
    const auto draw = random_stable_ar(2, 5, ARConstraint::unidirectional_2to1, rng);
    const auto e = epochs_of(simulate_ar(draw.model, 8000, 1000, rng));
    const double w = granger_wide(e, 10).raw(0, 1);
    const double n = granger_narrow(e, 10, Band{0.0, 50.0}).raw(0, 1);
    if ((w < 0.0) == (n < 0.0)) ++agree;
  }
  MESSAGE("sign agreement in " << agree << " of 100");
  CHECK(agree >= 90);
}

TEST_CASE("narrow band on a resonant driver") {
  // 10 Hz resonator in channel 1 feeding channel 0 with a one-sample lag.
  const double r = 0.97, w = 2.0 * M_PI * 10.0 / 100.0;
  ARModel m;
  Eigen::MatrixXd a1(2, 2), a2(2, 2);
  a1 << 0.2, 0.6, 0.0, 2.0 * r * std::cos(w);
  a2 << 0.0, 0.0, 0.0, -r * r;
  m.coefficients = {a1, a2};
  m.residual_cov = Eigen::MatrixXd::Identity(2, 2);
  const auto g = granger_narrow(epochs_of(ar_series(m, 20000, 5)), 10, centered_band(10.0, 5.0));
  CHECK(g.normalized(0, 1) < -2.0);
}
