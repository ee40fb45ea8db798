#pragma once

#include "phaseslope/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace phaseslope {

enum class Method { psi, granger };
enum class BandMode { wide, narrow };

std::string to_string(Method m);
std::string to_string(BandMode b);

/// Monte-Carlo comparison of PSI and Granger causality on mixed systems.
struct BenchmarkConfig {
  std::vector<double> gammas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::size_t n_systems = 100;
  std::vector<Method> methods{Method::psi, Method::granger};
  std::vector<BandMode> band_modes{BandMode::wide};
  std::uint64_t base_seed = 1;

  SystemSpec system;  // gamma and seed are overwritten per system
  double epoch_sec = 4.0;
  double segment_sec = 2.0;
  double overlap = 0.5;
  bool demean = true;
  Index granger_order = 10;
  double threshold = 2.0;
  double narrow_width = 5.0;

  /// Segment length 1/fres with epochs twice as long.
  void set_resolution(double fres);
  void validate() const;
};

struct Interval {
  double low = 0.0;
  double high = 1.0;
  double half_width() const { return 0.5 * (high - low); }
};

/// Wilson score interval for k successes out of n.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.96);

/// Normalized values of one system from one (method, band) cell; the
/// entry reported is the (0, 1) pair, positive for flow 0 -> 1.
struct SystemOutcome {
  std::size_t gamma_index = 0;
  std::size_t system_index = 0;
  std::uint64_t seed = 0;
  bool signal_fallback = false;
  bool noise_fallback = false;
  bool narrow_accepted = false;
  Band narrow_band;
  double narrow_fraction = 0.0;
  // Indexed [method][band_mode] in config order; NaN when not scored.
  std::vector<std::vector<double>> value;
};

struct BenchmarkRow {
  double gamma = 0.0;
  Method method = Method::psi;
  BandMode band_mode = BandMode::wide;
  std::size_t n = 0;
  std::size_t n_correct = 0;
  std::size_t n_false = 0;
  double frac_correct = 0.0;
  double frac_false = 0.0;
  Interval false_ci;
  Interval correct_ci;
};

struct BenchmarkResult {
  BenchmarkConfig config;
  std::vector<BenchmarkRow> rows;
  std::vector<SystemOutcome> systems;
  std::size_t fallback_draws = 0;

  const BenchmarkRow& row(double gamma, Method m, BandMode b) const;
};

/// Sub-seed of system `system` at grid position `gamma_index`.
std::uint64_t system_seed(std::uint64_t base_seed, std::size_t gamma_index, std::size_t system);

/// Correct: significant with the true sign (flow 1 -> 0). False: significant
/// with the opposite sign, or any significant call when gamma = 1.
enum class Call { none, correct, wrong };
Call classify(double value_01, double gamma, double threshold);

/// Systems run in parallel; results depend only on the config.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

}  // namespace phaseslope
