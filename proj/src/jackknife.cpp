#include "phaseslope/jackknife.hpp"

#include "phaseslope/error.hpp"

#include <cmath>

namespace phaseslope {

double jackknife_std(std::span<const double> values) {
  const std::size_t k = values.size();
  if (k < 2) throw InputError("jackknife needs at least 2 epochs");
  // Shifted by the first value so that identical inputs give exactly 0.
  const double shift = values.front();
  double mean = 0.0;
  for (double v : values) mean += v - shift;
  mean /= static_cast<double>(k);
  double ss = 0.0;
  for (double v : values) ss += (v - shift - mean) * (v - shift - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(k - 1));
  return std::sqrt(static_cast<double>(k)) * sigma;
}

Eigen::MatrixXd jackknife_std(const std::vector<Eigen::MatrixXd>& loo) {
  if (loo.size() < 2) throw InputError("jackknife needs at least 2 epochs");
  const Eigen::Index rows = loo.front().rows();
  const Eigen::Index cols = loo.front().cols();
  Eigen::MatrixXd out(rows, cols);
  std::vector<double> column(loo.size());
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (std::size_t k = 0; k < loo.size(); ++k) column[k] = loo[k](i, j);
      out(i, j) = jackknife_std(column);
    }
  return out;
}

Normalized normalize(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& spread) {
  Normalized out{Eigen::MatrixXd::Zero(raw.rows(), raw.cols()),
                 Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(raw.rows(), raw.cols(), false)};
  for (Eigen::Index j = 0; j < raw.cols(); ++j)
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
      if (spread(i, j) > 0.0)
        out.values(i, j) = raw(i, j) / spread(i, j);
      else
        out.degenerate(i, j) = (i != j);
    }
  return out;
}

}  // namespace phaseslope
