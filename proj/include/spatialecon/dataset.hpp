#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

namespace spatialecon {

/// Outcome, covariates and unit identifiers for one cross-section.
/// The intercept is not part of `x`; estimators add it.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd x;
  std::string outcome_name = "y";
  std::vector<std::string> covariate_names;
  std::vector<std::string> ids;

  std::size_t n() const { return static_cast<std::size_t>(y.size()); }
  std::size_t k() const { return static_cast<std::size_t>(x.cols()); }

  /// Throws ShapeError on inconsistent sizes and MissingData (listing the
  /// offending rows) when y or x holds NaN or Inf.
  void validate() const;
};

/// z-scores the outcome and every covariate with the sample standard
/// deviation (n - 1 denominator). Throws ZeroVariance for a constant column.
Dataset standardize(const Dataset& data);

}  // namespace spatialecon
