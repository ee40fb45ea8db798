#pragma once

#include "phaseslope/benchmark.hpp"
#include "phaseslope/granger.hpp"
#include "phaseslope/psi.hpp"
#include "phaseslope/spectra.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace phaseslope {

using Json = nlohmann::ordered_json;

/// {"frequencies": [...], "n_segments": k, "matrices": [[[[re, im], ...] rows] per f]}
Json to_json(const CrossSpectrum& cs);
Json to_json(const Coherency& coh);
Json to_json(const PsiEstimate& psi);
Json to_json(const GrangerEstimate& g, const std::string& method);
Json to_json(const BenchmarkResult& result);
Json to_json(const BenchmarkConfig& config);

/// Parses the "matrices" layout written by to_json(CrossSpectrum).
CrossSpectrum cross_spectrum_from_json(const Json& j);

/// CSV header of benchmark tables; ci_low/ci_high bound frac_false.
inline constexpr const char* kBenchmarkCsvHeader =
    "gamma,method,band_mode,n,frac_correct,frac_false,ci_low,ci_high,correct_ci_low,correct_ci_high";

std::string benchmark_csv(const BenchmarkResult& result);

/// Wide plot table: one row per gamma, correct/false columns per method and band.
std::string benchmark_plot_data(const BenchmarkResult& result);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace phaseslope
