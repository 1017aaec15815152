#pragma once

#include "spatialecon/estimators.hpp"
#include "spatialecon/weights.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spatialecon {

/// Largest n for which N x N effect matrices are materialized.
inline constexpr std::size_t kDenseLimit = 2000;

/// The spatial multiplier S = (I - rho W)^-1.
struct MultiplierMatrix {
  Eigen::MatrixXd matrix;
  double rho = 0.0;
};

/// Dense inverse of I - rho W. Throws SingularMultiplier when I - rho W is
/// singular and TooLargeForDense above kDenseLimit.
MultiplierMatrix multiplier_matrix(double rho, const SpatialWeights& w);

/// I + rho W + rho^2 W^2 + ..., truncated once |rho|^h drops below `tol`.
/// Requires |rho| < 1 and a normalized W.
Eigen::MatrixXd power_series_multiplier(double rho, const SpatialWeights& w,
                                        double tol = 1e-12);

/// N x N matrix of dy / dx_k for covariate k.
///
/// Row i holds the effects on unit i, column j the effects from unit j.
/// Individual cells depend mostly on W and are best read through their
/// averages (impacts_summary) rather than interpreted one by one.
Eigen::MatrixXd partial_effects(const FitResult& fit, const SpatialWeights& w,
                                std::size_t k);

/// Row sums of an effects matrix: total impact on each unit.
Eigen::VectorXd impacts_on_units(const Eigen::MatrixXd& effects);
/// Column sums of an effects matrix: total impact from each unit.
Eigen::VectorXd impacts_from_units(const Eigen::MatrixXd& effects);

enum class ImpactType { none, global, local };
std::string_view to_string(ImpactType type);
ImpactType impact_type(ModelKind kind);

struct ImpactDraws {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
};

struct CovariateImpact {
  std::string covariate;
  double direct = 0.0;
  double indirect = 0.0;
  double total = 0.0;
  std::optional<ImpactDraws> direct_draws;
  std::optional<ImpactDraws> indirect_draws;
  std::optional<ImpactDraws> total_draws;
};

struct ImpactsSummary {
  ModelKind model = ModelKind::OLS;
  ImpactType type = ImpactType::none;
  std::vector<CovariateImpact> covariates;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
  bool has_inference() const { return draws > 0; }
};

/// Direct = mean diagonal of the effects matrix, total = mean row sum,
/// indirect = total - direct. Local models (SLX, SDEM) report beta_k and
/// theta_k; OLS and SEM have no indirect impacts.
ImpactsSummary impacts_summary(const FitResult& fit, const SpatialWeights& w);

/// Adds simulation-based dispersion: parameters are drawn from
/// N(estimates, vcov), draws with rho outside the stationary interval are
/// redrawn, and the summaries are recomputed per draw. Each draw has its own
/// substream so results are identical for any thread count.
/// Throws BadCovariance when vcov is non-finite or clearly indefinite.
ImpactsSummary impacts_inference(const FitResult& fit, const SpatialWeights& w,
                                 std::size_t n_draws = 1000, std::uint64_t seed = 0);

/// Averages of the multiplier and of S W, the building blocks of global
/// impacts: direct = beta * trace_s + theta * trace_sw, total = beta * sum_s
/// + theta * sum_sw, all divided by n.
struct MultiplierMoments {
  double mean_diag_s = 0.0;
  double mean_diag_sw = 0.0;
  double mean_rowsum_s = 0.0;
  double mean_rowsum_sw = 0.0;
};

enum class MomentMethod { automatic, dense, spectral, series };

/// Computes MultiplierMoments at rho for repeated use. `automatic` picks the
/// dense inverse up to kDenseLimit and the truncated power series beyond.
class MultiplierKernel {
 public:
  MultiplierKernel(const SpatialWeights& w, MomentMethod method,
                   double max_abs_rho = 0.999);

  MultiplierMoments operator()(double rho) const;
  MomentMethod method() const { return method_; }

 private:
  const SpatialWeights* w_;  // must outlive the kernel
  MomentMethod method_;
  double max_abs_rho_;
  std::optional<Spectrum> spectrum_;
  // Series moments: tr(W^h) / n and 1'W^h 1 / n for h = 0..H+1.
  std::vector<double> trace_powers_;
  std::vector<double> sum_powers_;
};

}  // namespace spatialecon
