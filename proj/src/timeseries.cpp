#include "phaseslope/timeseries.hpp"

#include "phaseslope/error.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace phaseslope {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  // strtod accepts nan/inf spellings too; those are caught by the finiteness check.
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + cell.size()) return std::nullopt;
  return v;
}

}  // namespace

MultichannelRecord make_record(Eigen::MatrixXd data, double sampling_rate,
                               std::vector<std::string> labels) {
  if (!(sampling_rate > 0.0) || !std::isfinite(sampling_rate))
    throw InputError("sampling rate must be positive");
  if (data.rows() < 1) throw InputError("record has zero channels");
  if (data.cols() < 1) throw InputError("record has zero samples");
  for (Index c = 0; c < data.rows(); ++c)
    for (Index t = 0; t < data.cols(); ++t)
      if (!std::isfinite(data(c, t)))
        throw InputError("non-finite value at channel " + std::to_string(c) + ", sample " +
                         std::to_string(t));
  if (!labels.empty()) {
    if (static_cast<Index>(labels.size()) != data.rows())
      throw InputError("label count does not match channel count");
    std::set<std::string> seen;
    for (const auto& l : labels)
      if (!seen.insert(l).second) throw InputError("duplicate channel label '" + l + "'");
  }
  return MultichannelRecord{sampling_rate, std::move(data), std::move(labels)};
}

Index EpochPlan::hop() const {
  return static_cast<Index>(std::llround(static_cast<double>(segment_len) * (1.0 - overlap_fraction)));
}

void EpochPlan::validate() const {
  if (segment_len < 2) throw InputError("segment length must be at least 2 samples");
  if (segment_len > epoch_len) throw InputError("segment length exceeds epoch length");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
    throw InputError("overlap fraction must lie in [0, 1)");
  const double exact = static_cast<double>(segment_len) * (1.0 - overlap_fraction);
  if (hop() < 1 || std::abs(exact - static_cast<double>(hop())) > 1e-9)
    throw InputError("segment hop must be a positive whole number of samples");
}

EpochPlan EpochPlan::from_seconds(double sampling_rate, double epoch_sec, double segment_sec,
                                  double overlap) {
  auto to_samples = [&](double sec, const char* what) {
    const double n = sec * sampling_rate;
    if (!(n > 0.0) || std::abs(n - std::round(n)) > 1e-6)
      throw InputError(std::string(what) + " must be a whole positive number of samples");
    return static_cast<Index>(std::llround(n));
  };
  EpochPlan plan{to_samples(epoch_sec, "epoch length"), to_samples(segment_sec, "segment length"),
                 overlap};
  plan.validate();
  return plan;
}

FileFormat parse_file_format(const std::string& name) {
  if (name == "csv") return FileFormat::csv;
  if (name == "raw" || name == "raw-binary" || name == "bin") return FileFormat::raw;
  throw InputError("unknown input format '" + name + "'");
}

namespace {

MultichannelRecord load_csv(const std::filesystem::path& path, double rate) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_commas(line);
    if (width == 0) width = cells.size();
    if (cells.size() != width)
      throw InputError("ragged row at line " + std::to_string(line_no) + ": expected " +
                       std::to_string(width) + " columns, found " + std::to_string(cells.size()));
    std::vector<double> values;
    values.reserve(cells.size());
    bool numeric = true;
    for (const auto& c : cells) {
      auto v = parse_number(c);
      if (!v) {
        numeric = false;
        break;
      }
      values.push_back(*v);
    }
    if (!numeric) {
      if (rows.empty() && labels.empty()) {
        labels = std::move(cells);
        continue;
      }
      throw InputError("unparseable cell at line " + std::to_string(line_no));
    }
    rows.push_back(std::move(values));
  }
  if (width == 0) throw InputError("record has zero channels");
  if (rows.empty()) throw InputError("record has zero samples");
  Eigen::MatrixXd data(static_cast<Index>(width), static_cast<Index>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t c = 0; c < width; ++c) data(static_cast<Index>(c), static_cast<Index>(t)) = rows[t][c];
  return make_record(std::move(data), rate, std::move(labels));
}

MultichannelRecord load_raw(const std::filesystem::path& path, double rate,
                            std::optional<Index> channels) {
  if (!channels || *channels < 1) throw InputError("raw format requires --channels N with N >= 1");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::size_t n_values = bytes.size() / sizeof(double);
  if (bytes.size() % sizeof(double) != 0 || n_values == 0 ||
      n_values % static_cast<std::size_t>(*channels) != 0)
    throw InputError("raw file size is not a multiple of channels x 8 bytes");
  const Index n_samples = static_cast<Index>(n_values / static_cast<std::size_t>(*channels));
  Eigen::MatrixXd data(*channels, n_samples);
  for (Index c = 0; c < *channels; ++c) {
    for (Index t = 0; t < n_samples; ++t) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, bytes.data() + (static_cast<std::size_t>(c * n_samples + t)) * 8, 8);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      data(c, t) = std::bit_cast<double>(bits);
    }
  }
  return make_record(std::move(data), rate);
}

}  // namespace

MultichannelRecord load_record(const std::filesystem::path& path, FileFormat format,
                               double sampling_rate, std::optional<Index> channels) {
  if (!std::filesystem::exists(path)) throw InputError("no such file '" + path.string() + "'");
  return format == FileFormat::csv ? load_csv(path, sampling_rate)
                                   : load_raw(path, sampling_rate, channels);
}

void save_record_raw(const std::filesystem::path& path, const MultichannelRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (Index c = 0; c < record.n_channels(); ++c) {
    for (Index t = 0; t < record.n_samples(); ++t) {
      auto bits = std::bit_cast<std::uint64_t>(record.data(c, t));
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
      char buf[8];
      std::memcpy(buf, &bits, 8);
      out.write(buf, 8);
    }
  }
  if (!out) throw InputError("write failed for '" + path.string() + "'");
}

void save_record_csv(const std::filesystem::path& path, const MultichannelRecord& record) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << std::setprecision(17);
  if (!record.labels.empty()) {
    for (std::size_t c = 0; c < record.labels.size(); ++c) out << (c ? "," : "") << record.labels[c];
    out << '\n';
  }
  for (Index t = 0; t < record.n_samples(); ++t) {
    for (Index c = 0; c < record.n_channels(); ++c) out << (c ? "," : "") << record.data(c, t);
    out << '\n';
  }
}

EpochedData epoch(const MultichannelRecord& record, const EpochPlan& plan) {
  plan.validate();
  const Index k = record.n_samples() / plan.epoch_len;
  if (k < 2)
    throw InputError("need at least 2 complete epochs of " + std::to_string(plan.epoch_len) +
                     " samples, record has " + std::to_string(record.n_samples()));
  EpochedData out;
  out.plan = plan;
  out.sampling_rate = record.sampling_rate;
  out.labels = record.labels;
  out.epochs.reserve(static_cast<std::size_t>(k));
  for (Index e = 0; e < k; ++e)
    out.epochs.emplace_back(record.data.middleCols(e * plan.epoch_len, plan.epoch_len));
  return out;
}

std::vector<Index> segment_starts(const EpochPlan& plan) {
  plan.validate();
  std::vector<Index> starts;
  for (Index s = 0; s + plan.segment_len <= plan.epoch_len; s += plan.hop()) starts.push_back(s);
  return starts;
}

std::vector<Eigen::MatrixXd> segments_of(const Eigen::MatrixXd& epoch, const EpochPlan& plan) {
  if (epoch.cols() != plan.epoch_len) throw InputError("epoch width does not match plan");
  std::vector<Eigen::MatrixXd> out;
  for (Index s : segment_starts(plan)) out.emplace_back(epoch.middleCols(s, plan.segment_len));
  return out;
}

EpochedData select_epochs(const EpochedData& data, const std::vector<std::size_t>& keep) {
  EpochedData out;
  out.plan = data.plan;
  out.sampling_rate = data.sampling_rate;
  out.labels = data.labels;
  out.epochs.reserve(keep.size());
  for (auto k : keep) {
    if (k >= data.epochs.size()) throw InputError("epoch index out of range");
    out.epochs.push_back(data.epochs[k]);
  }
  return out;
}

}  // namespace phaseslope
