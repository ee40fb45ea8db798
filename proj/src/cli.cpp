#include "phaseslope/cli.hpp"

#include "phaseslope/benchmark.hpp"
#include "phaseslope/error.hpp"
#include "phaseslope/granger.hpp"
#include "phaseslope/layout.hpp"
#include "phaseslope/psi.hpp"
#include "phaseslope/serialize.hpp"
#include "phaseslope/spectra.hpp"
#include "phaseslope/timeseries.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef PHASESLOPE_DEFAULT_LAYOUT
#define PHASESLOPE_DEFAULT_LAYOUT "data/layout_1020.csv"
#endif

namespace phaseslope::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string input;
  std::string format = "csv";
  double rate = 0.0;
  Index channels = 0;
  double epoch_sec = 4.0;
  double segment_sec = 2.0;
  double overlap = 0.5;
  double fres = 0.0;
  bool no_demean = false;
  std::optional<double> band_center;
  double band_width = 5.0;
  std::optional<double> band_min;
  std::optional<double> band_max;
  std::string methods = "psi";
  Index order = 10;
  double threshold = 2.0;
  std::string layout;
  std::vector<std::string> directions;
  bool dump_spectra = false;
  std::string out = ".";
  // sweep
  std::string centers;
  // benchmark
  std::string gammas = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1";
  long long systems = 100;
  std::uint64_t seed = 1;
  std::string band_mode = "wide";
  Index samples = 60000;
  Index noise_sources = 2;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v)) throw InputError("invalid " + what + " '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 3) {
      const double lo = parse_double(parts[0], what), hi = parse_double(parts[1], what),
                   step = parse_double(parts[2], what);
      if (!(step > 0.0) || hi < lo) throw InputError("invalid " + what + " range '" + item + "'");
      const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
      for (long long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
    } else if (parts.size() == 1) {
      out.push_back(parse_double(parts[0], what));
    } else {
      throw InputError("invalid " + what + " '" + item + "'");
    }
  }
  return out;
}

void apply_resolution(Options& o) {
  if (o.fres > 0.0) {
    o.segment_sec = 1.0 / o.fres;
    o.epoch_sec = 2.0 * o.segment_sec;
  } else if (o.fres < 0.0) {
    throw InputError("--fres must be positive");
  }
}

struct MethodSet {
  bool psi = false;
  bool granger = false;
};

MethodSet parse_methods(const std::string& s) {
  MethodSet m;
  for (const auto& name : split(s, ',')) {
    if (name == "psi")
      m.psi = true;
    else if (name == "granger")
      m.granger = true;
    else
      throw InputError("unknown method '" + name + "'");
  }
  if (!m.psi && !m.granger) throw InputError("no methods selected");
  return m;
}

Json common_config(const Options& o, const std::string& command, int argc, const char* const* argv) {
  Json j;
  j["command"] = command;
  std::vector<std::string> args(argv, argv + argc);
  j["argv"] = args;
  j["input"] = o.input;
  j["format"] = o.format;
  j["rate"] = o.rate;
  j["channels"] = o.channels;
  j["epoch_sec"] = o.epoch_sec;
  j["segment_sec"] = o.segment_sec;
  j["overlap"] = o.overlap;
  j["demean"] = !o.no_demean;
  j["methods"] = o.methods;
  j["order"] = o.order;
  j["threshold"] = o.threshold;
  j["layout"] = o.layout;
  j["directions"] = o.directions;
  j["out"] = o.out;
  return j;
}

struct Loaded {
  MultichannelRecord record;
  EpochedData epochs;
  SpectralConfig spectral;
};

Loaded load_input(const Options& o) {
  if (o.input.empty()) throw InputError("--input is required");
  if (!(o.rate > 0.0)) throw InputError("--rate must be positive");
  const auto format = parse_file_format(o.format);
  std::optional<Index> ch;
  if (o.channels > 0) ch = o.channels;
  Loaded l{load_record(o.input, format, o.rate, ch), {}, {}};
  const auto plan = EpochPlan::from_seconds(o.rate, o.epoch_sec, o.segment_sec, o.overlap);
  l.epochs = epoch(l.record, plan);
  l.spectral = SpectralConfig::from_plan(plan, !o.no_demean);
  return l;
}

std::optional<SensorLayout> load_layout_for(const Options& o, const Loaded& l) {
  if (o.layout.empty()) return std::nullopt;
  const fs::path path = o.layout == "default" ? fs::path(PHASESLOPE_DEFAULT_LAYOUT) : fs::path(o.layout);
  return align_layout(load_layout(path), l.record.labels, l.record.n_channels());
}

std::optional<Band> requested_band(const Options& o) {
  if (o.band_center) {
    if (o.band_min || o.band_max) throw InputError("use either --band-center/--band-width or --band-min/--band-max");
    return centered_band(*o.band_center, o.band_width);
  }
  if (o.band_min || o.band_max) {
    if (!o.band_min || !o.band_max) throw InputError("--band-min and --band-max must be given together");
    return Band{*o.band_min, *o.band_max};
  }
  return std::nullopt;
}

std::string pair_rows(const std::string& method, const Eigen::MatrixXd& normalized, const Eigen::MatrixXd& raw,
                      const Eigen::MatrixXd& stddev, const BoolMatrix& degenerate, double f_center,
                      double threshold) {
  std::ostringstream out;
  for (Index i = 0; i < normalized.rows(); ++i)
    for (Index j = 0; j < normalized.cols(); ++j) {
      if (i == j) continue;
      const bool sig = !degenerate(i, j) && std::abs(normalized(i, j)) > threshold;
      out << method << ',' << i << ',' << j << ',' << format_double(f_center) << ','
          << format_double(normalized(i, j)) << ',' << (sig ? 1 : 0) << ',' << format_double(raw(i, j)) << ','
          << format_double(stddev(i, j)) << '\n';
    }
  return out.str();
}

constexpr const char* kPairHeader = "method,i,j,f_center,psi_norm,significant,raw,std\n";

std::string label_of(const MultichannelRecord& r, Index i) {
  return r.labels.empty() ? std::to_string(i) : r.labels[static_cast<std::size_t>(i)];
}

int cmd_analyze(const Options& o, int argc, const char* const* argv) {
  const auto methods = parse_methods(o.methods);
  const Loaded l = load_input(o);
  const auto layout = load_layout_for(o, l);
  if (!o.directions.empty() && !layout) throw InputError("--direction requires --layout");
  const EpochSpectra spectra = epoch_spectra(l.epochs, l.spectral);
  const auto user_band = requested_band(o);
  const Band band = user_band.value_or(full_band(spectra.frequencies));
  fs::create_directories(o.out);
  const fs::path dir(o.out);

  Json config = common_config(o, "analyze", argc, argv);
  config["band"] = {{"f_min", band.f_min}, {"f_max", band.f_max}};
  Json estimates = Json::array();

  if (methods.psi) {
    const PsiEstimate psi = jackknife_psi(spectra, band);
    write_file_atomic(dir / "psi_pairs.csv",
                      kPairHeader + pair_rows("psi", psi.normalized, psi.raw, psi.stddev, psi.degenerate,
                                              band.center(), o.threshold));
    const NetFlux net = net_flux(psi);
    std::ostringstream nf;
    nf << "channel,f_center,psi_net,label\n";
    for (Index i = 0; i < net.normalized.size(); ++i)
      nf << i << ',' << format_double(band.center()) << ',' << format_double(net.normalized(i)) << ','
         << label_of(l.record, i) << '\n';
    write_file_atomic(dir / "net_flux.csv", nf.str());
    estimates.push_back(to_json(psi));

    if (layout && !o.directions.empty()) {
      std::ostringstream pr, totals;
      pr << "direction,f_center,i,j,contribution\n";
      totals << "direction,f_center,total\n";
      for (const auto& d : o.directions) {
        const Eigen::MatrixXd proj = project_direction(psi, *layout, direction_vector(d));
        for (Index i = 0; i < proj.rows(); ++i)
          for (Index j = 0; j < proj.cols(); ++j)
            if (i != j)
              pr << d << ',' << format_double(band.center()) << ',' << i << ',' << j << ','
                 << format_double(proj(i, j)) << '\n';
        totals << d << ',' << format_double(band.center()) << ',' << format_double(proj.sum()) << '\n';
      }
      write_file_atomic(dir / "projections.csv", pr.str());
      write_file_atomic(dir / "projection_totals.csv", totals.str());
    }
  }

  if (methods.granger) {
    std::string rows = kPairHeader;
    const auto wide = granger_wide(l.epochs, o.order, !o.no_demean);
    rows += pair_rows("granger_wide", wide.normalized, wide.raw, wide.stddev, wide.degenerate,
                      band.center(), o.threshold);
    estimates.push_back(to_json(wide, "granger_wide"));
    if (user_band) {
      const auto narrow = granger_narrow(l.epochs, o.order, *user_band, !o.no_demean);
      rows += pair_rows("granger_narrow", narrow.normalized, narrow.raw, narrow.stddev, narrow.degenerate,
                        band.center(), o.threshold);
      estimates.push_back(to_json(narrow, "granger_narrow"));
    }
    write_file_atomic(dir / "granger_pairs.csv", rows);
  }

  write_file_atomic(dir / "estimates.json", estimates.dump(2) + "\n");
  if (o.dump_spectra) {
    const CrossSpectrum cs = average_spectra(spectra);
    Json j{{"cross_spectrum", to_json(cs)}, {"coherency", to_json(coherency(cs))}};
    write_file_atomic(dir / "spectra.json", j.dump() + "\n");
  }
  write_file_atomic(dir / "config.json", config.dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Options& o, int argc, const char* const* argv) {
  const auto centers = parse_list(o.centers, "band center");
  if (centers.empty()) throw InputError("--centers must list at least one frequency");
  const Loaded l = load_input(o);
  const auto layout = load_layout_for(o, l);
  if (!o.directions.empty() && !layout) throw InputError("--direction requires --layout");
  const EpochSpectra spectra = epoch_spectra(l.epochs, l.spectral);
  const auto sweep = band_sweep(spectra, o.band_width, centers);
  fs::create_directories(o.out);
  const fs::path dir(o.out);

  std::ostringstream pairs, net, proj, totals;
  pairs << "center_f,i,j,psi_norm,significant\n";
  net << "center_f,channel,psi_net\n";
  proj << "direction,center_f,i,j,contribution\n";
  totals << "direction,center_f,total\n";
  for (std::size_t c = 0; c < sweep.size(); ++c) {
    const auto& psi = sweep[c];
    const auto sig = significant(psi, o.threshold);
    const std::string cf = format_double(centers[c]);
    for (Index i = 0; i < psi.normalized.rows(); ++i)
      for (Index j = 0; j < psi.normalized.cols(); ++j)
        if (i != j)
          pairs << cf << ',' << i << ',' << j << ',' << format_double(psi.normalized(i, j)) << ','
                << (sig(i, j) ? 1 : 0) << '\n';
    const auto nf = net_flux(psi);
    for (Index i = 0; i < nf.normalized.size(); ++i)
      net << cf << ',' << i << ',' << format_double(nf.normalized(i)) << '\n';
    if (layout)
      for (const auto& d : o.directions) {
        const Eigen::MatrixXd p = project_direction(psi, *layout, direction_vector(d));
        for (Index i = 0; i < p.rows(); ++i)
          for (Index j = 0; j < p.cols(); ++j)
            if (i != j) proj << d << ',' << cf << ',' << i << ',' << j << ',' << format_double(p(i, j)) << '\n';
        totals << d << ',' << cf << ',' << format_double(p.sum()) << '\n';
      }
  }
  write_file_atomic(dir / "sweep.csv", pairs.str());
  write_file_atomic(dir / "sweep_net_flux.csv", net.str());
  if (layout && !o.directions.empty()) {
    write_file_atomic(dir / "sweep_projections.csv", proj.str());
    write_file_atomic(dir / "sweep_projection_totals.csv", totals.str());
  }
  Json config = common_config(o, "sweep", argc, argv);
  config["centers"] = centers;
  config["band_width"] = o.band_width;
  write_file_atomic(dir / "config.json", config.dump(2) + "\n");
  return 0;
}

int cmd_benchmark(const Options& o, int argc, const char* const* argv) {
  BenchmarkConfig cfg;
  cfg.gammas = parse_list(o.gammas, "gamma");
  if (o.systems < 1) throw InputError("--systems must be at least 1");
  cfg.n_systems = static_cast<std::size_t>(o.systems);
  cfg.base_seed = o.seed;
  const auto methods = parse_methods(o.methods);
  cfg.methods.clear();
  if (methods.psi) cfg.methods.push_back(Method::psi);
  if (methods.granger) cfg.methods.push_back(Method::granger);
  if (o.band_mode == "wide")
    cfg.band_modes = {BandMode::wide};
  else if (o.band_mode == "narrow")
    cfg.band_modes = {BandMode::narrow};
  else if (o.band_mode == "both")
    cfg.band_modes = {BandMode::wide, BandMode::narrow};
  else
    throw InputError("--band-mode must be wide, narrow or both");
  cfg.epoch_sec = o.epoch_sec;
  cfg.segment_sec = o.segment_sec;
  cfg.overlap = o.overlap;
  cfg.demean = !o.no_demean;
  cfg.granger_order = o.order;
  cfg.threshold = o.threshold;
  cfg.narrow_width = o.band_width;
  cfg.system.n_samples = o.samples;
  cfg.system.n_noise_sources = o.noise_sources;
  cfg.validate();

  const BenchmarkResult result = run_benchmark(cfg);
  fs::create_directories(o.out);
  const fs::path dir(o.out);
  write_file_atomic(dir / "benchmark.csv", benchmark_csv(result));
  write_file_atomic(dir / "benchmark.json", to_json(result).dump(2) + "\n");
  write_file_atomic(dir / "benchmark_plot.csv", benchmark_plot_data(result));
  Json config = to_json(cfg);
  config["command"] = "benchmark";
  config["argv"] = std::vector<std::string>(argv, argv + argc);
  write_file_atomic(dir / "config.json", config.dump(2) + "\n");
  return 0;
}

void add_signal_options(CLI::App& app, Options& o) {
  app.add_option("--input", o.input, "Recording to analyze")->required();
  app.add_option("--format", o.format, "csv or raw")->capture_default_str();
  app.add_option("--rate", o.rate, "Sampling rate in Hz")->required();
  app.add_option("--channels", o.channels, "Channel count (raw format)");
  app.add_option("--layout", o.layout, "Sensor layout CSV (label,x,y) or 'default'");
  app.add_option("--direction", o.directions, "front-back and/or right-left");
}

void add_spectral_options(CLI::App& app, Options& o) {
  app.add_option("--epoch-sec", o.epoch_sec, "Epoch length in seconds")->capture_default_str();
  app.add_option("--segment-sec", o.segment_sec, "Segment length in seconds")->capture_default_str();
  app.add_option("--overlap", o.overlap, "Segment overlap within an epoch")->capture_default_str();
  app.add_option("--fres", o.fres, "Frequency resolution; sets segment = 1/fres, epoch = 2/fres");
  app.add_flag("--no-demean", o.no_demean, "Keep segment means");
  app.add_option("--methods", o.methods, "Comma list of psi,granger")->capture_default_str();
  app.add_option("--order", o.order, "Granger AR order")->capture_default_str();
  app.add_option("--threshold", o.threshold, "Significance threshold on |normalized|")->capture_default_str();
  app.add_option("--band-width", o.band_width, "Band width in Hz")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Directed connectivity from phase slopes and Granger causality", "phaseslope"};
  app.require_subcommand(1);

  auto* analyze = app.add_subcommand("analyze", "PSI (and Granger) for one recording");
  add_signal_options(*analyze, o);
  add_spectral_options(*analyze, o);
  analyze->add_option("--band-center", o.band_center, "Band center in Hz");
  analyze->add_option("--band-min", o.band_min, "Band lower edge in Hz");
  analyze->add_option("--band-max", o.band_max, "Band upper edge in Hz");
  analyze->add_flag("--dump-spectra", o.dump_spectra, "Write spectra.json");

  auto* sweep = app.add_subcommand("sweep", "PSI over a list of band centers");
  add_signal_options(*sweep, o);
  add_spectral_options(*sweep, o);
  sweep->add_option("--centers", o.centers, "Comma list or lo:hi:step")->required();

  auto* bench = app.add_subcommand("benchmark", "Detection rates on simulated mixed AR systems");
  add_spectral_options(*bench, o);
  bench->add_option("--gammas", o.gammas, "Noise levels, comma list or lo:hi:step")->capture_default_str();
  bench->add_option("--systems", o.systems, "Systems per noise level")->capture_default_str();
  bench->add_option("--seed", o.seed, "Base seed")->capture_default_str();
  bench->add_option("--band-mode", o.band_mode, "wide, narrow or both")->capture_default_str();
  bench->add_option("--samples", o.samples, "Samples per system")->capture_default_str();
  bench->add_option("--noise-sources", o.noise_sources, "Independent noise sources M")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    apply_resolution(o);
    if (*analyze) return cmd_analyze(o, argc, argv);
    if (*sweep) return cmd_sweep(o, argc, argv);
    if (bench->parsed()) {
      if (bench->count("--methods") == 0) o.methods = "psi,granger";
      return cmd_benchmark(o, argc, argv);
    }
  } catch (const DegenerateError& e) {
    err << "error: degenerate: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace phaseslope::cli
