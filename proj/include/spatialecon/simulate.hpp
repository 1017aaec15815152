#pragma once

#include "spatialecon/dataset.hpp"
#include "spatialecon/estimators.hpp"
#include "spatialecon/weights.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spatialecon {

/// Data-generating process. Unused spatial parameters are ignored (rho for
/// SEM, theta for SAR, ...). The intercept defaults to 0.
struct DgpSpec {
  ModelKind kind = ModelKind::OLS;
  double rho = 0.0;
  double lambda = 0.0;
  Eigen::VectorXd beta = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd theta;
  double alpha = 0.0;
  double sigma = 1.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument for |rho| >= 1, |lambda| >= 1, a theta length
  /// that does not match beta, or negative sigma.
  void validate() const;
};

struct SimulatedData {
  Dataset data;
  /// The innovation vector epsilon actually drawn.
  Eigen::VectorXd noise;
};

/// Draws X ~ N(0, 1) i.i.d. and epsilon ~ N(0, sigma^2), then assembles y:
///   OLS  y = a + X b + e
///   SLX  y = a + X b + WX t + e
///   SAR  y = (I - rho W)^-1 (a + X b + e)
///   SDM  y = (I - rho W)^-1 (a + X b + WX t + e)
///   SEM  y = a + X b + u,        u = (I - lambda W)^-1 e
///   SDEM y = a + X b + WX t + u
/// X and epsilon come from fixed substreams of `seed`, so every kind shares
/// the same draws for a given seed.
SimulatedData generate_detailed(const DgpSpec& spec, const SpatialWeights& w);
Dataset generate(const DgpSpec& spec, const SpatialWeights& w);

/// Spec for replication `rep`, with its own derived seed.
DgpSpec replicate(const DgpSpec& spec, std::size_t rep);

struct BiasReport {
  std::size_t replications = 0;
  Eigen::VectorXd mean_beta;
  Eigen::VectorXd mean_bias;
  /// Monte Carlo standard error of the mean estimate.
  Eigen::VectorXd mc_se;
  /// Mean over replications of the sample covariance of x_k and Wy.
  Eigen::VectorXd mean_cov_x_wy;
  /// sign(mean_bias_k) == sign(rho * mean_cov_x_wy_k)
  std::vector<bool> sign_agreement;
};

/// Fits non-spatial OLS to `n_reps` SAR datasets and reports the bias of
/// beta next to the empirical Cov(x, Wy) that drives it.
BiasReport ols_bias_experiment(const DgpSpec& spec, const SpatialWeights& w,
                               std::size_t n_reps);

}  // namespace spatialecon
