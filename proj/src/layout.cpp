#include "phaseslope/layout.hpp"

#include "phaseslope/error.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace phaseslope {

SensorLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open layout '" + path.string() + "'");
  SensorLayout layout;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string label, xs, ys;
    if (!std::getline(row, label, ',') || !std::getline(row, xs, ',') || !std::getline(row, ys))
      throw InputError("layout line " + std::to_string(line_no) + " is not label,x,y");
    char* end = nullptr;
    const double x = std::strtod(xs.c_str(), &end);
    const bool x_ok = end != xs.c_str();
    const double y = std::strtod(ys.c_str(), &end);
    const bool y_ok = end != ys.c_str();
    if (!x_ok || !y_ok) {
      if (line_no == 1 && layout.positions.empty()) continue;  // header
      throw InputError("layout line " + std::to_string(line_no) + " has non-numeric coordinates");
    }
    label.erase(0, label.find_first_not_of(" \t"));
    label.erase(label.find_last_not_of(" \t\r") + 1);
    layout.labels.push_back(label);
    layout.positions.emplace_back(x, y);
  }
  if (layout.positions.empty()) throw InputError("layout '" + path.string() + "' is empty");
  validate_layout(layout);
  return layout;
}

SensorLayout align_layout(const SensorLayout& layout, const std::vector<std::string>& labels,
                          Index n_channels) {
  if (labels.empty()) {
    if (static_cast<Index>(layout.size()) != n_channels)
      throw InputError("layout has " + std::to_string(layout.size()) + " sensors but the record has " +
                       std::to_string(n_channels) + " channels");
    return layout;
  }
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < layout.size(); ++i) index[layout.labels[i]] = i;
  SensorLayout out;
  for (const auto& l : labels) {
    auto it = index.find(l);
    if (it == index.end()) throw InputError("channel '" + l + "' is missing from the layout");
    out.labels.push_back(l);
    out.positions.push_back(layout.positions[it->second]);
  }
  return out;
}

void validate_layout(const SensorLayout& layout) {
  for (std::size_t i = 0; i < layout.size(); ++i)
    for (std::size_t j = i + 1; j < layout.size(); ++j)
      if (!((layout.positions[i] - layout.positions[j]).norm() > 0.0))
        throw InputError("sensors '" + layout.labels[i] + "' and '" + layout.labels[j] +
                         "' share a position");
}

Eigen::Vector2d direction_vector(const std::string& name) {
  if (name == "front-back") return {0.0, -1.0};
  if (name == "right-left") return {-1.0, 0.0};
  throw InputError("unknown direction '" + name + "' (expected front-back or right-left)");
}

Eigen::MatrixXd project_direction(const Eigen::MatrixXd& psi, const SensorLayout& layout,
                                  const Eigen::Vector2d& u) {
  const Index n = psi.rows();
  if (static_cast<Index>(layout.size()) != n) throw InputError("layout size does not match channel count");
  if (std::abs(u.norm() - 1.0) > 1e-9) throw InputError("direction must be a unit vector");
  validate_layout(layout);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const Eigen::Vector2d d = layout.positions[static_cast<std::size_t>(j)] -
                                layout.positions[static_cast<std::size_t>(i)];
      out(i, j) = psi(i, j) * u.dot(d / d.norm());
    }
  return out;
}

}  // namespace phaseslope
