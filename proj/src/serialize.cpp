#include "phaseslope/serialize.hpp"

#include "phaseslope/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace phaseslope {

namespace {

Json complex_matrix(const Eigen::MatrixXcd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Json real_matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json bool_matrix(const BoolMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(static_cast<bool>(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json band_json(const Band& b) { return Json{{"f_min", b.f_min}, {"f_max", b.f_max}}; }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

Json to_json(const CrossSpectrum& cs) {
  Json j;
  j["frequencies"] = cs.frequencies;
  j["n_segments"] = cs.n_segments;
  Json mats = Json::array();
  for (const auto& m : cs.matrices) mats.push_back(complex_matrix(m));
  j["matrices"] = std::move(mats);
  return j;
}

Json to_json(const Coherency& coh) {
  Json j;
  j["frequencies"] = coh.frequencies;
  Json mats = Json::array();
  for (const auto& m : coh.matrices) mats.push_back(complex_matrix(m));
  j["matrices"] = std::move(mats);
  return j;
}

CrossSpectrum cross_spectrum_from_json(const Json& j) {
  CrossSpectrum cs;
  cs.frequencies = j.at("frequencies").get<std::vector<double>>();
  cs.n_segments = j.value("n_segments", std::size_t{0});
  for (const auto& mj : j.at("matrices")) {
    const auto n = static_cast<Index>(mj.size());
    Eigen::MatrixXcd m(n, n);
    for (Index r = 0; r < n; ++r) {
      if (static_cast<Index>(mj[static_cast<std::size_t>(r)].size()) != n) throw InputError("matrix is not square");
      for (Index c = 0; c < n; ++c) {
        const auto& cell = mj[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        m(r, c) = {cell.at(0).get<double>(), cell.at(1).get<double>()};
      }
    }
    cs.matrices.push_back(std::move(m));
  }
  if (cs.matrices.size() != cs.frequencies.size()) throw InputError("frequency and matrix counts differ");
  return cs;
}

Json to_json(const PsiEstimate& psi) {
  Json j;
  j["method"] = "psi";
  j["band"] = band_json(psi.band);
  j["K"] = psi.n_epochs;
  j["raw"] = real_matrix(psi.raw);
  j["std"] = real_matrix(psi.stddev);
  j["normalized"] = real_matrix(psi.normalized);
  j["degenerate"] = bool_matrix(psi.degenerate);
  return j;
}

Json to_json(const GrangerEstimate& g, const std::string& method) {
  Json j;
  j["method"] = method;
  j["band"] = g.band ? band_json(*g.band) : Json(nullptr);
  j["K"] = g.n_epochs;
  j["raw"] = real_matrix(g.raw);
  j["std"] = real_matrix(g.stddev);
  j["normalized"] = real_matrix(g.normalized);
  j["degenerate"] = bool_matrix(g.degenerate);
  j["warnings"] = g.warnings;
  return j;
}

Json to_json(const BenchmarkConfig& c) {
  Json j;
  j["gammas"] = c.gammas;
  j["n_systems"] = c.n_systems;
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  Json modes = Json::array();
  for (auto b : c.band_modes) modes.push_back(to_string(b));
  j["band_modes"] = modes;
  j["base_seed"] = c.base_seed;
  j["signal_order"] = c.system.signal_order;
  j["noise_order"] = c.system.noise_order;
  j["noise_sources"] = c.system.n_noise_sources;
  j["sampling_rate"] = c.system.sampling_rate;
  j["n_samples"] = c.system.n_samples;
  j["burn_in"] = c.system.burn_in;
  j["epoch_sec"] = c.epoch_sec;
  j["segment_sec"] = c.segment_sec;
  j["overlap"] = c.overlap;
  j["demean"] = c.demean;
  j["granger_order"] = c.granger_order;
  j["threshold"] = c.threshold;
  j["narrow_width"] = c.narrow_width;
  return j;
}

Json to_json(const BenchmarkResult& r) {
  Json j;
  j["config"] = to_json(r.config);
  j["definitions"] = {
      {"true_direction", "channel 2 -> channel 1"},
      {"correct", "|normalized| > threshold with the sign of flow 2 -> 1"},
      {"false", "|normalized| > threshold with the opposite sign; at gamma = 1 every significant call"},
      {"ci", "Wilson 95% score interval"}};
  j["fallback_draws"] = r.fallback_draws;
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"gamma", row.gamma},
                    {"method", to_string(row.method)},
                    {"band_mode", to_string(row.band_mode)},
                    {"n", row.n},
                    {"n_correct", row.n_correct},
                    {"n_false", row.n_false},
                    {"frac_correct", row.frac_correct},
                    {"frac_false", row.frac_false},
                    {"false_ci", {row.false_ci.low, row.false_ci.high}},
                    {"correct_ci", {row.correct_ci.low, row.correct_ci.high}}});
  }
  j["rows"] = std::move(rows);
  Json systems = Json::array();
  for (const auto& s : r.systems) {
    Json values = Json::object();
    for (std::size_t mi = 0; mi < r.config.methods.size(); ++mi)
      for (std::size_t bi = 0; bi < r.config.band_modes.size(); ++bi) {
        const double v = s.value[mi][bi];
        values[to_string(r.config.methods[mi]) + "_" + to_string(r.config.band_modes[bi])] =
            std::isnan(v) ? Json(nullptr) : Json(v);
      }
    Json sj{{"gamma", r.config.gammas[s.gamma_index]},
            {"system", s.system_index},
            {"seed", s.seed},
            {"signal_fallback", s.signal_fallback},
            {"noise_fallback", s.noise_fallback},
            {"values", std::move(values)}};
    if (std::find(r.config.band_modes.begin(), r.config.band_modes.end(), BandMode::narrow) !=
        r.config.band_modes.end()) {
      sj["narrow_band"] = {s.narrow_band.f_min, s.narrow_band.f_max};
      sj["narrow_power_fraction"] = s.narrow_fraction;
      sj["narrow_accepted"] = s.narrow_accepted;
    }
    systems.push_back(std::move(sj));
  }
  j["systems"] = std::move(systems);
  return j;
}

std::string benchmark_csv(const BenchmarkResult& r) {
  std::ostringstream out;
  out << kBenchmarkCsvHeader << '\n';
  for (const auto& row : r.rows) {
    out << format_double(row.gamma) << ',' << to_string(row.method) << ',' << to_string(row.band_mode) << ','
        << row.n << ',' << format_double(row.frac_correct) << ',' << format_double(row.frac_false) << ','
        << format_double(row.false_ci.low) << ',' << format_double(row.false_ci.high) << ','
        << format_double(row.correct_ci.low) << ',' << format_double(row.correct_ci.high) << '\n';
  }
  return out.str();
}

std::string benchmark_plot_data(const BenchmarkResult& r) {
  std::ostringstream out;
  out << "gamma";
  for (auto m : r.config.methods)
    for (auto b : r.config.band_modes) {
      const std::string key = to_string(m) + "_" + to_string(b);
      out << ',' << key << "_correct," << key << "_false";
    }
  out << '\n';
  for (double g : r.config.gammas) {
    out << format_double(g);
    for (auto m : r.config.methods)
      for (auto b : r.config.band_modes) {
        const auto& row = r.row(g, m, b);
        out << ',' << format_double(row.frac_correct) << ',' << format_double(row.frac_false);
      }
    out << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw InputError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace phaseslope
