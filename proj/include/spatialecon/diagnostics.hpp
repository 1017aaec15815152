#pragma once

#include "spatialecon/estimators.hpp"
#include "spatialecon/weights.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace spatialecon {

enum class Alternative { two_sided, greater, less };

std::string_view to_string(Alternative a);
Alternative parse_alternative(std::string_view text);

struct MoranResult {
  double statistic = 0.0;
  /// -1 / (n - 1), the expectation under randomization.
  double expectation = 0.0;
  double p_value = 1.0;
  std::size_t n_permutations = 0;
  std::uint64_t seed = 0;
  double s0 = 0.0;
  Alternative alternative = Alternative::two_sided;
};

/// Global Moran's I, I = (N / S0) z'Wz / z'z with z = y - mean(y).
///
/// Inference is by permutation: each of the `n_permutations` relabelings of
/// y uses its own substream, so the p-value does not depend on the thread
/// count. The observed statistic is counted among the draws, giving
/// p = (1 + #{extreme}) / (1 + n_permutations); "extreme" compares |I| for
/// the two-sided alternative.
MoranResult morans_i(const SpatialWeights& w, const Eigen::VectorXd& y,
                     std::size_t n_permutations, std::uint64_t seed,
                     Alternative alternative = Alternative::two_sided);

/// Moran's I of the residuals stored in a fit.
MoranResult morans_i_residuals(const FitResult& fit, const SpatialWeights& w,
                               std::size_t n_permutations, std::uint64_t seed,
                               Alternative alternative = Alternative::two_sided);

struct LmStatistic {
  double statistic = 0.0;
  double p_value = 1.0;
};

struct LmTestResult {
  LmStatistic lm_lag;
  LmStatistic lm_err;
  LmStatistic robust_lm_lag;
  LmStatistic robust_lm_err;
};

/// Lagrange multiplier tests for an omitted spatial lag and spatial error,
/// plain and robust to the other alternative, all against chi-square(1).
/// Throws WrongModel unless `ols_fit` is an OLS fit that still carries its
/// design matrix.
LmTestResult lm_tests(const FitResult& ols_fit, const SpatialWeights& w);

}  // namespace spatialecon
