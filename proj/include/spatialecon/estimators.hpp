#pragma once

#include "spatialecon/dataset.hpp"
#include "spatialecon/spectrum.hpp"
#include "spatialecon/weights.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spatialecon {

enum class ModelKind { OLS, SLX, SAR, SEM, SDM, SDEM };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

constexpr bool has_rho(ModelKind k) { return k == ModelKind::SAR || k == ModelKind::SDM; }
constexpr bool has_lambda(ModelKind k) { return k == ModelKind::SEM || k == ModelKind::SDEM; }
constexpr bool has_theta(ModelKind k) {
  return k == ModelKind::SLX || k == ModelKind::SDM || k == ModelKind::SDEM;
}

struct ModelSpec {
  ModelKind kind = ModelKind::OLS;
  /// When false only `lagged_columns` (indices into X) enter WX.
  bool lag_all_covariates = true;
  std::vector<std::size_t> lagged_columns;

  /// Covariate indices that receive a theta coefficient for k covariates.
  std::vector<std::size_t> lagged(std::size_t k) const;
};

/// ln|I - rho W| evaluated from the eigenvalues of W,
/// sum_i ln|1 - rho lambda_i| (complex pairs contribute their moduli).
/// Falls back to a dense LU factorisation per evaluation for n <= 2000 when
/// the eigensolver fails.
class LogDeterminant {
 public:
  explicit LogDeterminant(const SpatialWeights& w);

  /// Throws SingularMultiplier when I - rho W is singular.
  double operator()(double rho) const;

  /// (1/lambda_min, 1/lambda_max) over the real spectrum; infinite when
  /// W has no negative (or positive) real eigenvalue.
  double lower_bound() const { return lower_; }
  double upper_bound() const { return upper_; }
  bool uses_eigenvalues() const { return spectrum_.has_value(); }
  const std::optional<Spectrum>& spectrum() const { return spectrum_; }

 private:
  std::optional<Spectrum> spectrum_;
  Eigen::MatrixXd dense_;
  double lower_ = -1.0;
  double upper_ = 1.0;
};

/// One-shot ln|I - rho W|.
double log_det(double rho, const SpatialWeights& w);

struct FitOptions {
  /// Overrides for the search interval of rho / lambda. Equal bounds fix
  /// the parameter at that value.
  std::optional<double> lower;
  std::optional<double> upper;
  double tol = 1e-8;
  std::size_t grid_points = 100;
  /// Reused across fits on the same W when provided.
  std::shared_ptr<const LogDeterminant> log_det;
};

struct FitResult {
  ModelSpec spec;
  std::vector<std::string> covariate_names;
  /// Covariate index of each theta entry.
  std::vector<std::size_t> lagged_columns;

  double alpha = 0.0;
  Eigen::VectorXd beta;
  Eigen::VectorXd theta;
  std::optional<double> rho;
  std::optional<double> lambda;
  double sigma2 = 0.0;

  /// Covariance over parameter_names: intercept, beta, theta, rho or
  /// lambda, sigma2.
  Eigen::MatrixXd vcov;
  std::vector<std::string> parameter_names;

  double loglik = 0.0;
  double aic = 0.0;
  Eigen::VectorXd residuals;
  std::size_t n = 0;
  std::size_t k = 0;

  bool boundary = false;
  std::vector<std::string> warnings;
  Normalization weights_normalization = Normalization::raw;

  /// Estimation inputs, kept for residual-based specification tests.
  /// Empty for fits restored from JSON.
  Eigen::VectorXd y;
  Eigen::MatrixXd design;

  std::size_t parameter_count() const { return parameter_names.size(); }
  Eigen::VectorXd estimates() const;
  Eigen::VectorXd std_errors() const;
  std::optional<double> spatial_parameter() const { return rho ? rho : lambda; }
  /// Position of a named parameter in estimates()/vcov, if present.
  std::optional<std::size_t> parameter_index(std::string_view name) const;
};

/// Least squares with intercept. Throws SingularDesign for rank-deficient X.
FitResult fit_ols(const Dataset& data);
FitResult fit_slx(const Dataset& data, const SpatialWeights& w,
                  const ModelSpec& spec = {ModelKind::SLX});

/// Concentrated maximum likelihood. Throws RequiresNormalizedW for raw W; an
/// optimum on the edge of the parameter space sets `boundary` and a warning.
FitResult fit_sar(const Dataset& data, const SpatialWeights& w,
                  const FitOptions& options = {});
FitResult fit_sem(const Dataset& data, const SpatialWeights& w,
                  const FitOptions& options = {});
FitResult fit_sdm(const Dataset& data, const SpatialWeights& w,
                  const FitOptions& options = {}, const ModelSpec& spec = {ModelKind::SDM});
FitResult fit_sdem(const Dataset& data, const SpatialWeights& w,
                   const FitOptions& options = {},
                   const ModelSpec& spec = {ModelKind::SDEM});

FitResult fit_model(const Dataset& data, const SpatialWeights& w, const ModelSpec& spec,
                    const FitOptions& options = {});

/// Fixed reporting order used by `fit --model all`.
inline constexpr ModelKind kAllModels[] = {ModelKind::OLS, ModelKind::SAR, ModelKind::SEM,
                                           ModelKind::SLX, ModelKind::SDM, ModelKind::SDEM};

/// Fits every model in kAllModels, concurrently when threads allow. The
/// log-determinant is shared between the ML fits.
std::vector<FitResult> fit_all(const Dataset& data, const SpatialWeights& w,
                               FitOptions options = {});

struct LrTestResult {
  double statistic = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
  ModelKind restricted_model = ModelKind::OLS;
  ModelKind unrestricted_model = ModelKind::OLS;
};

bool is_nested(ModelKind restricted, ModelKind unrestricted);

/// 2 (l_u - l_r) against chi-square(df). Throws NotNested.
LrTestResult lr_test(const FitResult& restricted, const FitResult& unrestricted);

/// Upper tail of chi-square(df).
double chi_square_sf(double statistic, double df);

}  // namespace spatialecon
