#include "fixtures.hpp"

#include "phaseslope/benchmark.hpp"
#include "phaseslope/serialize.hpp"
#include "phaseslope/simulate.hpp"
#include "phaseslope/spectra.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>

using namespace phaseslope;

namespace {

// Gelfand's formula: |C^k v|^(1/k) with renormalization at every step.
double power_iteration_radius(const Eigen::MatrixXd& c, int steps = 4000) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(c.rows());
  double log_growth = 0.0;
  for (int k = 0; k < steps; ++k) {
    v = c * v;
    const double norm = v.norm();
    log_growth += std::log(norm);
    v /= norm;
  }
  return std::exp(log_growth / steps);
}

using Poly = std::vector<double>;  // ascending powers of z

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly sub(Poly a, const Poly& b) {
  a.resize(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

// Roots of det(I - A1 z - A2 z^2) for a 2 x 2 AR(2); radius is 1 / min |z|.
double polynomial_root_radius(const ARModel& m) {
  const auto entry = [&](int i, int j) {
    const double d = i == j ? 1.0 : 0.0;
    return Poly{d, -m.coefficients[0](i, j), -m.coefficients[1](i, j)};
  };
  Poly det = sub(mul(entry(0, 0), entry(1, 1)), mul(entry(0, 1), entry(1, 0)));
  while (std::abs(det.back()) < 1e-300) det.pop_back();
  const auto deg = static_cast<Index>(det.size()) - 1;
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
  for (Index k = 0; k < deg; ++k) comp(0, k) = -det[static_cast<std::size_t>(deg - 1 - k)] / det.back();
  comp.bottomLeftCorner(deg - 1, deg - 1).setIdentity();
  const auto roots = Eigen::EigenSolver<Eigen::MatrixXd>(comp, false).eigenvalues();
  double min_abs = INFINITY;
  for (Index k = 0; k < roots.size(); ++k) min_abs = std::min(min_abs, std::abs(roots(k)));
  return 1.0 / min_abs;
}

ARModel resonance(double hz, double radius) {
  ARModel m;
  const double w = 2.0 * M_PI * hz / 100.0;
  m.coefficients = {Eigen::MatrixXd::Constant(1, 1, 2.0 * radius * std::cos(w)),
                    Eigen::MatrixXd::Constant(1, 1, -radius * radius)};
  m.residual_cov = Eigen::MatrixXd::Identity(1, 1);
  return m;
}

}  // namespace

TEST_CASE("stability of simple models") {
  ARModel m;
  m.residual_cov = Eigen::MatrixXd::Identity(1, 1);
  m.coefficients = {Eigen::MatrixXd::Constant(1, 1, 0.5)};
  CHECK(is_stable(m));
  m.coefficients = {Eigen::MatrixXd::Constant(1, 1, 1.0)};
  CHECK_FALSE(is_stable(m));
}

TEST_CASE("random draws respect their constraints and are stable") {
  Rng rng(2024);
  for (int k = 0; k < 20; ++k) {
    const auto sig = random_stable_ar(2, 5, ARConstraint::unidirectional_2to1, rng);
    const auto noise = random_stable_ar(3, 5, ARConstraint::diagonal, rng);
    CHECK(sig.model.order() == 5);
    for (const auto& a : sig.model.coefficients) CHECK(a(1, 0) == 0.0);
    for (const auto& a : noise.model.coefficients) CHECK((a - Eigen::MatrixXd(a.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
    CHECK(is_stable(sig.model));
    CHECK(is_stable(noise.model));
    CHECK((sig.model.residual_cov.array() == Eigen::MatrixXd::Identity(2, 2).array()).all());
    const double r = power_iteration_radius(companion_matrix(sig.model));
    CHECK(r < 1.0);
    CHECK(r == doctest::Approx(spectral_radius(sig.model)).epsilon(1e-2));
  }
}

TEST_CASE("fallback shrinks until stable") {
  Rng rng(5);
  // Order 20 Gaussian draws are essentially never stable.
  const auto draw = random_stable_ar(2, 20, ARConstraint::unidirectional_2to1, rng);
  CHECK(draw.used_fallback);
  CHECK(draw.rejections == 1000);
  CHECK(is_stable(draw.model));
}

TEST_CASE("companion radius equals the determinant-root radius") {
  Rng rng(99);
  std::normal_distribution<double> gauss(0.0, 0.5);
  for (int k = 0; k < 20; ++k) {
    ARModel m;
    m.residual_cov = Eigen::MatrixXd::Identity(2, 2);
    for (int p = 0; p < 2; ++p) {
      Eigen::MatrixXd a(2, 2);
      a << gauss(rng), gauss(rng), gauss(rng), gauss(rng);
      m.coefficients.push_back(a);
    }
    CHECK(spectral_radius(m) == doctest::Approx(polynomial_root_radius(m)).epsilon(1e-8));
  }
}

TEST_CASE("generated systems") {
  SystemSpec spec;
  spec.gamma = 0.3;
  spec.seed = 17;
  spec.n_samples = 8000;
  const auto sys = generate(spec);
  CHECK(sys.record.n_channels() == 2);
  CHECK(sys.record.n_samples() == 8000);
  CHECK(sys.mixing.rows() == 2);
  CHECK(sys.mixing.cols() == 2);
  CHECK(sys.signal.norm() == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(sys.noise.norm() == doctest::Approx(0.3).epsilon(1e-12));
  for (const auto& a : sys.signal_model.coefficients) CHECK(a(1, 0) == 0.0);
  for (const auto& a : sys.noise_model.coefficients) {
    CHECK(a(0, 1) == 0.0);
    CHECK(a(1, 0) == 0.0);
  }
  const auto again = generate(spec);
  CHECK((again.record.data.array() == sys.record.data.array()).all());
  spec.gamma = 0.0;
  CHECK((generate(spec).noise.array() == 0.0).all());
  spec.gamma = 1.5;
  CHECK_THROWS(generate(spec));
}

TEST_CASE("narrow band selection") {
  SUBCASE("flat spectrum is rejected") {
    ARModel white;
    white.coefficients = {Eigen::MatrixXd::Zero(2, 2)};
    white.residual_cov = Eigen::MatrixXd::Identity(2, 2);
    const auto c = narrow_band_for(white, 100.0, 0.5);
    CHECK_FALSE(c.accepted);
    CHECK(c.peak == 0.0);
    CHECK(c.power_fraction < 0.2);
  }
  SUBCASE("sharp resonance is accepted and centered") {
    const auto c = narrow_band_for(resonance(10.0, 0.98), 100.0, 0.5);
    CHECK(c.accepted);
    CHECK(c.peak == doctest::Approx(10.0).epsilon(0.02));
    CHECK(c.band.center() == doctest::Approx(c.peak));
    CHECK(c.band.width() == doctest::Approx(5.0));
    CHECK(c.power_fraction >= 0.6);
  }
  SUBCASE("low peak is clipped at the first bin") {
    const auto c = narrow_band_for(resonance(1.0, 0.99), 100.0, 0.5);
    CHECK(c.band.f_min == doctest::Approx(0.5));
    CHECK(c.band.f_max == doctest::Approx(c.peak + 2.5));
  }
  SUBCASE("analytic band power agrees with a long periodogram") {
    const auto model = resonance(12.0, 0.95);
    const auto c = narrow_band_for(model, 100.0, 0.5);
    Rng rng(4);
    const auto x = simulate_ar(model, 120000, 1000, rng);
    const auto e = epoch(make_record(x, 100.0), EpochPlan::from_seconds(100.0));
    const auto cs = cross_spectrum(e, SpectralConfig::from_plan(e.plan));
    double inside = 0.0, total = 0.0;
    for (std::size_t m = 0; m < cs.frequencies.size(); ++m) {
      const double p = cs.matrices[m](0, 0).real();
      total += p;
      if (cs.frequencies[m] >= c.band.f_min - 1e-9 && cs.frequencies[m] <= c.band.f_max + 1e-9) inside += p;
    }
    CHECK(inside / total == doctest::Approx(c.power_fraction).epsilon(0.05));
  }
}

TEST_CASE("Wilson interval") {
  const auto oracle = [](double k, double n) {
    const double z = 1.96, p = k / n;
    const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
    const double half = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
    return std::pair{centre - half, centre + half};
  };
  for (auto [k, n] : {std::pair{0, 10}, std::pair{5, 10}, std::pair{7, 100}, std::pair{100, 100}}) {
    const auto ci = wilson_interval(static_cast<std::size_t>(k), static_cast<std::size_t>(n));
    const auto [lo, hi] = oracle(k, n);
    CHECK(ci.low == doctest::Approx(lo).epsilon(1e-12));
    CHECK(ci.high == doctest::Approx(hi).epsilon(1e-12));
  }
  CHECK(wilson_interval(0, 10).low == 0.0);
}

TEST_CASE("classification of calls") {
  CHECK(classify(-3.0, 0.5, 2.0) == Call::correct);
  CHECK(classify(3.0, 0.5, 2.0) == Call::wrong);
  CHECK(classify(1.5, 0.5, 2.0) == Call::none);
  CHECK(classify(-3.0, 1.0, 2.0) == Call::wrong);
  CHECK(classify(-2.0, 0.0, 2.0) == Call::none);
}

TEST_CASE("benchmark is reproducible and seeds are distinct") {
  std::set<std::uint64_t> seeds;
  for (std::size_t g = 0; g < 11; ++g)
    for (std::size_t s = 0; s < 50; ++s) seeds.insert(system_seed(1, g, s));
  CHECK(seeds.size() == 550);

  BenchmarkConfig c;
  c.gammas = {0.0, 1.0};
  c.n_systems = 4;
  c.methods = {Method::psi, Method::granger};
  c.band_modes = {BandMode::wide, BandMode::narrow};
  c.system.n_samples = 12000;
  const auto a = run_benchmark(c);
  const auto b = run_benchmark(c);
  CHECK(benchmark_csv(a) == benchmark_csv(b));
  CHECK(to_json(a).dump() == to_json(b).dump());
  for (const auto& row : a.rows) {
    CHECK(row.frac_correct + row.frac_false <= 1.0);
    CHECK(row.false_ci.low <= row.frac_false);
    CHECK(row.false_ci.high >= row.frac_false);
    if (row.gamma == 1.0) CHECK(row.n_correct == 0);
  }
}
