#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace phaseslope {

/// sqrt(K) times the sample standard deviation (K - 1 divisor) of K
/// leave-one-out values. Requires K >= 2.
double jackknife_std(std::span<const double> leave_one_out);

/// Element-wise jackknife_std over a stack of equally shaped matrices.
Eigen::MatrixXd jackknife_std(const std::vector<Eigen::MatrixXd>& leave_one_out);

/// Result of dividing an estimate by its jackknife spread; entries whose
/// spread is zero are set to 0 and flagged.
struct Normalized {
  Eigen::MatrixXd values;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> degenerate;
};

Normalized normalize(const Eigen::MatrixXd& raw, const Eigen::MatrixXd& spread);

}  // namespace phaseslope
