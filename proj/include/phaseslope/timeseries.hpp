#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace phaseslope {

using Index = Eigen::Index;

/// A real-valued recording: one row per channel, one column per sample.
struct MultichannelRecord {
  double sampling_rate = 0.0;
  Eigen::MatrixXd data;
  std::vector<std::string> labels;  // empty or one per channel

  Index n_channels() const { return data.rows(); }
  Index n_samples() const { return data.cols(); }
};

/// Validates and assembles a record. Throws InputError on a non-positive
/// rate, an empty matrix, non-finite samples or duplicate labels.
MultichannelRecord make_record(Eigen::MatrixXd data, double sampling_rate,
                               std::vector<std::string> labels = {});

/// Epoch and segment geometry in samples.
struct EpochPlan {
  Index epoch_len = 0;
  Index segment_len = 0;
  double overlap_fraction = 0.5;

  /// Distance between consecutive segment starts.
  Index hop() const;
  /// Throws InputError when the geometry is inconsistent.
  void validate() const;

  /// 4 s epochs of 2 s segments with 50% overlap unless overridden.
  static EpochPlan from_seconds(double sampling_rate, double epoch_sec = 4.0,
                                double segment_sec = 2.0, double overlap = 0.5);
};

/// K equally shaped, non-overlapping, consecutive blocks of a record.
struct EpochedData {
  std::vector<Eigen::MatrixXd> epochs;
  EpochPlan plan;
  double sampling_rate = 0.0;
  std::vector<std::string> labels;

  std::size_t n_epochs() const { return epochs.size(); }
  Index n_channels() const { return epochs.empty() ? 0 : epochs.front().rows(); }
};

enum class FileFormat { csv, raw };

FileFormat parse_file_format(const std::string& name);

/// Reads a recording. CSV: one sample per row, one channel per column and an
/// optional header row of labels. Raw: headerless little-endian float64,
/// channel-major; `channels` is required.
MultichannelRecord load_record(const std::filesystem::path& path, FileFormat format,
                               double sampling_rate,
                               std::optional<Index> channels = std::nullopt);

/// Writes the raw format read by load_record (bit-exact round trip).
void save_record_raw(const std::filesystem::path& path, const MultichannelRecord& record);
void save_record_csv(const std::filesystem::path& path, const MultichannelRecord& record);

/// Splits a record into floor(n_samples / epoch_len) epochs, dropping the
/// remainder. Requires at least two complete epochs.
EpochedData epoch(const MultichannelRecord& record, const EpochPlan& plan);

/// Start offsets of every segment that fits inside one epoch.
std::vector<Index> segment_starts(const EpochPlan& plan);

std::vector<Eigen::MatrixXd> segments_of(const Eigen::MatrixXd& epoch, const EpochPlan& plan);

/// Returns a copy holding only the listed epochs, in the given order.
EpochedData select_epochs(const EpochedData& data, const std::vector<std::size_t>& keep);

}  // namespace phaseslope
