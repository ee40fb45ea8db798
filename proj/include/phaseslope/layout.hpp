#pragma once

#include "phaseslope/psi.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace phaseslope {

/// Planar sensor positions; +y points to the front, +x to the right.
struct SensorLayout {
  std::vector<Eigen::Vector2d> positions;
  std::vector<std::string> labels;

  std::size_t size() const { return positions.size(); }
};

/// Reads `label,x,y` rows; a header row is optional.
SensorLayout load_layout(const std::filesystem::path& path);

/// Reorders `layout` to follow `labels`. With no labels the layout is used
/// in file order and must have exactly `n_channels` entries.
SensorLayout align_layout(const SensorLayout& layout, const std::vector<std::string>& labels,
                          Index n_channels);

/// Throws InputError if two sensors share a position.
void validate_layout(const SensorLayout& layout);

/// Unit vectors: right-to-left (-1, 0) and front-to-back (0, -1).
Eigen::Vector2d direction_vector(const std::string& name);

/// out(i, j) = psi(i, j) * u . (r_j - r_i) / |r_j - r_i|, zero diagonal.
Eigen::MatrixXd project_direction(const Eigen::MatrixXd& psi, const SensorLayout& layout,
                                  const Eigen::Vector2d& u);

inline Eigen::MatrixXd project_direction(const PsiEstimate& psi, const SensorLayout& layout,
                                         const Eigen::Vector2d& u) {
  return project_direction(psi.normalized, layout, u);
}

}  // namespace phaseslope
