#include "phaseslope/benchmark.hpp"

#include "phaseslope/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace phaseslope {

std::string to_string(Method m) { return m == Method::psi ? "psi" : "granger"; }
std::string to_string(BandMode b) { return b == BandMode::wide ? "wide" : "narrow"; }

void BenchmarkConfig::set_resolution(double fres) {
  if (!(fres > 0.0)) throw InputError("frequency resolution must be positive");
  segment_sec = 1.0 / fres;
  epoch_sec = 2.0 * segment_sec;
}

void BenchmarkConfig::validate() const {
  if (gammas.empty()) throw InputError("gamma grid is empty");
  for (double g : gammas)
    if (!(g >= 0.0 && g <= 1.0)) throw InputError("gamma values must lie in [0, 1]");
  if (n_systems < 1) throw InputError("need at least one system per gamma");
  if (methods.empty()) throw InputError("no methods selected");
  if (band_modes.empty()) throw InputError("no band modes selected");
  if (granger_order < 1) throw InputError("Granger order must be at least 1");
  EpochPlan::from_seconds(system.sampling_rate, epoch_sec, segment_sec, overlap);
}

Interval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) return {0.0, 1.0};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

const BenchmarkRow& BenchmarkResult::row(double gamma, Method m, BandMode b) const {
  for (const auto& r : rows)
    if (std::abs(r.gamma - gamma) < 1e-12 && r.method == m && r.band_mode == b) return r;
  throw InputError("no benchmark row for the requested cell");
}

std::uint64_t system_seed(std::uint64_t base_seed, std::size_t gamma_index, std::size_t system) {
  std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                    static_cast<std::uint32_t>(gamma_index), static_cast<std::uint32_t>(system)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Call classify(double value, double gamma, double threshold) {
  if (!(std::abs(value) > threshold)) return Call::none;
  if (gamma >= 1.0) return Call::wrong;
  return value < 0.0 ? Call::correct : Call::wrong;
}

namespace {

SystemOutcome analyze_system(const BenchmarkConfig& cfg, std::size_t gi, std::size_t si) {
  SystemSpec spec = cfg.system;
  spec.gamma = cfg.gammas[gi];
  spec.seed = system_seed(cfg.base_seed, gi, si);
  const GeneratedSystem sys = generate(spec);

  SystemOutcome out;
  out.gamma_index = gi;
  out.system_index = si;
  out.seed = spec.seed;
  out.signal_fallback = sys.signal_fallback;
  out.noise_fallback = sys.noise_fallback;
  out.value.assign(cfg.methods.size(),
                   std::vector<double>(cfg.band_modes.size(), std::numeric_limits<double>::quiet_NaN()));

  const auto plan = EpochPlan::from_seconds(spec.sampling_rate, cfg.epoch_sec, cfg.segment_sec, cfg.overlap);
  const EpochedData epochs = epoch(sys.record, plan);
  const double df = spec.sampling_rate / static_cast<double>(plan.segment_len);

  const bool wants_narrow = std::find(cfg.band_modes.begin(), cfg.band_modes.end(), BandMode::narrow) !=
                            cfg.band_modes.end();
  if (wants_narrow) {
    const auto choice = narrow_band_for(sys.signal_model, spec.sampling_rate, df, cfg.narrow_width);
    out.narrow_accepted = choice.accepted;
    out.narrow_band = choice.band;
    out.narrow_fraction = choice.power_fraction;
  }

  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    std::optional<EpochSpectra> spectra;
    for (std::size_t bi = 0; bi < cfg.band_modes.size(); ++bi) {
      const bool narrow = cfg.band_modes[bi] == BandMode::narrow;
      if (narrow && !out.narrow_accepted) continue;
      double v = 0.0;
      if (cfg.methods[mi] == Method::psi) {
        if (!spectra) spectra = epoch_spectra(epochs, SpectralConfig::from_plan(plan, cfg.demean));
        const Band band = narrow ? out.narrow_band : full_band(spectra->frequencies);
        v = jackknife_psi(*spectra, band).normalized(0, 1);
      } else {
        const auto g = narrow ? granger_narrow(epochs, cfg.granger_order, out.narrow_band, cfg.demean)
                              : granger_wide(epochs, cfg.granger_order, cfg.demean);
        v = g.degenerate(0, 1) ? 0.0 : g.normalized(0, 1);
      }
      out.value[mi][bi] = v;
    }
  }
  return out;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  BenchmarkResult result;
  result.config = config;
  const std::size_t total = config.gammas.size() * config.n_systems;
  result.systems.resize(total);
  std::vector<std::string> errors(total);
  const auto count = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t idx = 0; idx < count; ++idx) {
    const auto u = static_cast<std::size_t>(idx);
    try {
      result.systems[u] = analyze_system(config, u / config.n_systems, u % config.n_systems);
    } catch (const std::exception& e) {
      errors[u] = e.what();
    }
  }
  for (std::size_t u = 0; u < total; ++u)
    if (!errors[u].empty())
      throw DegenerateError("system " + std::to_string(u % config.n_systems) + " at gamma " +
                            std::to_string(config.gammas[u / config.n_systems]) + ": " + errors[u]);

  for (const auto& s : result.systems)
    result.fallback_draws += static_cast<std::size_t>(s.signal_fallback) + static_cast<std::size_t>(s.noise_fallback);

  for (std::size_t gi = 0; gi < config.gammas.size(); ++gi)
    for (std::size_t mi = 0; mi < config.methods.size(); ++mi)
      for (std::size_t bi = 0; bi < config.band_modes.size(); ++bi) {
        BenchmarkRow row;
        row.gamma = config.gammas[gi];
        row.method = config.methods[mi];
        row.band_mode = config.band_modes[bi];
        for (std::size_t si = 0; si < config.n_systems; ++si) {
          const double v = result.systems[gi * config.n_systems + si].value[mi][bi];
          if (std::isnan(v)) continue;
          ++row.n;
          const Call c = classify(v, row.gamma, config.threshold);
          row.n_correct += c == Call::correct;
          row.n_false += c == Call::wrong;
        }
        if (row.n > 0) {
          row.frac_correct = static_cast<double>(row.n_correct) / static_cast<double>(row.n);
          row.frac_false = static_cast<double>(row.n_false) / static_cast<double>(row.n);
        }
        row.false_ci = wilson_interval(row.n_false, row.n);
        row.correct_ci = wilson_interval(row.n_correct, row.n);
        result.rows.push_back(row);
      }
  return result;
}

}  // namespace phaseslope
