#include "spatialecon/estimators.hpp"

#include "spatialecon/error.hpp"
#include "spatialecon/rng.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace spatialecon {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::OLS: return "OLS";
    case ModelKind::SLX: return "SLX";
    case ModelKind::SAR: return "SAR";
    case ModelKind::SEM: return "SEM";
    case ModelKind::SDM: return "SDM";
    case ModelKind::SDEM: return "SDEM";
  }
  return "OLS";
}

ModelKind parse_model_kind(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ols") return ModelKind::OLS;
  if (lower == "slx") return ModelKind::SLX;
  if (lower == "sar") return ModelKind::SAR;
  if (lower == "sem") return ModelKind::SEM;
  if (lower == "sdm") return ModelKind::SDM;
  if (lower == "sdem") return ModelKind::SDEM;
  throw Error(ErrorCode::ConfigError, "unknown model '" + std::string(text) + "'");
}

std::vector<std::size_t> ModelSpec::lagged(std::size_t k) const {
  if (!has_theta(kind)) return {};
  if (lag_all_covariates) {
    std::vector<std::size_t> all(k);
    for (std::size_t j = 0; j < k; ++j) all[j] = j;
    return all;
  }
  for (auto c : lagged_columns) {
    if (c >= k) throw Error(ErrorCode::BadIndex, "lagged column out of range");
  }
  return lagged_columns;
}

// ---------------------------------------------------------------------------
// Log-determinant

LogDeterminant::LogDeterminant(const SpatialWeights& w) {
  spectrum_ = Spectrum::compute(w, false);
  if (spectrum_) {
    const double lo = spectrum_->min_real();
    const double hi = spectrum_->max_real();
    lower_ = lo < 0.0 ? 1.0 / lo : -std::numeric_limits<double>::infinity();
    upper_ = hi > 0.0 ? 1.0 / hi : std::numeric_limits<double>::infinity();
    return;
  }
  if (w.size() > 2000) {
    throw Error(ErrorCode::TooLargeForDense,
                "eigensolver failed and n exceeds the dense LU limit");
  }
  dense_ = w.dense();
  // Without a spectrum only the normalized range is known.
  lower_ = -1.0;
  upper_ = 1.0;
}

double LogDeterminant::operator()(double rho) const {
  if (spectrum_) {
    double sum = 0.0;
    for (const auto& ev : spectrum_->eigenvalues()) {
      const double modulus = std::abs(1.0 - rho * ev);
      if (modulus < 1e-14) {
        throw Error(ErrorCode::SingularMultiplier, "I - rho W is singular");
      }
      sum += std::log(modulus);
    }
    return sum;
  }
  const auto n = dense_.rows();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - rho * dense_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd& packed = lu.matrixLU();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = std::abs(packed(i, i));
    if (u < 1e-14) throw Error(ErrorCode::SingularMultiplier, "I - rho W is singular");
    sum += std::log(u);
  }
  return sum;
}

double log_det(double rho, const SpatialWeights& w) { return LogDeterminant(w)(rho); }

// ---------------------------------------------------------------------------
// FitResult helpers

Eigen::VectorXd FitResult::estimates() const {
  Eigen::VectorXd est(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index p = 0;
  est[p++] = alpha;
  for (Eigen::Index j = 0; j < beta.size(); ++j) est[p++] = beta[j];
  for (Eigen::Index j = 0; j < theta.size(); ++j) est[p++] = theta[j];
  if (rho) est[p++] = *rho;
  if (lambda) est[p++] = *lambda;
  est[p++] = sigma2;
  return est;
}

Eigen::VectorXd FitResult::std_errors() const {
  return vcov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

std::optional<std::size_t> FitResult::parameter_index(std::string_view name) const {
  for (std::size_t i = 0; i < parameter_names.size(); ++i) {
    if (parameter_names[i] == name) return i;
  }
  return std::nullopt;
}

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct Design {
  Eigen::MatrixXd z;  // [1, X, WX_lagged]
  std::vector<std::size_t> lagged;
  std::vector<std::string> names;
};

std::vector<std::string> covariate_names(const Dataset& data) {
  if (!data.covariate_names.empty()) return data.covariate_names;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < data.k(); ++j) names.push_back("x" + std::to_string(j + 1));
  return names;
}

void check_pairing(const Dataset& data, const SpatialWeights& w) {
  if (w.size() != data.n()) {
    throw Error(ErrorCode::ShapeError, "dataset has " + std::to_string(data.n()) +
                                           " units, W has " + std::to_string(w.size()));
  }
}

Design build_design(const Dataset& data, const SpatialWeights* w, const ModelSpec& spec) {
  Design d;
  d.lagged = spec.lagged(data.k());
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto k = static_cast<Eigen::Index>(data.k());
  const auto m = static_cast<Eigen::Index>(d.lagged.size());
  d.z.resize(n, 1 + k + m);
  d.z.col(0).setOnes();
  d.z.middleCols(1, k) = data.x;
  d.names = covariate_names(data);
  if (m > 0) {
    const Eigen::MatrixXd wx = spatial_lag(*w, data.x);
    for (Eigen::Index c = 0; c < m; ++c) {
      d.z.col(1 + k + c) = wx.col(static_cast<Eigen::Index>(d.lagged[static_cast<std::size_t>(c)]));
    }
  }
  if (d.z.cols() >= n) {
    throw Error(ErrorCode::SingularDesign, "need more units than regressors");
  }
  return d;
}

Eigen::ColPivHouseholderQR<Eigen::MatrixXd> factor(const Eigen::MatrixXd& z) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
  qr.setThreshold(1e-10);
  if (qr.rank() < z.cols()) {
    throw Error(ErrorCode::SingularDesign,
                "design matrix is rank deficient (rank " + std::to_string(qr.rank()) +
                    " of " + std::to_string(z.cols()) + ")");
  }
  return qr;
}

void fill_parameter_names(FitResult& fit, const Design& d) {
  fit.parameter_names.clear();
  fit.parameter_names.push_back("(Intercept)");
  for (const auto& name : d.names) fit.parameter_names.push_back(name);
  for (auto c : d.lagged) fit.parameter_names.push_back("W." + d.names[c]);
  if (has_rho(fit.spec.kind)) fit.parameter_names.push_back("rho");
  if (has_lambda(fit.spec.kind)) fit.parameter_names.push_back("lambda");
  fit.parameter_names.push_back("sigma2");
}

void unpack_coefficients(FitResult& fit, const Eigen::VectorXd& b, std::size_t k,
                         std::size_t m) {
  fit.alpha = b[0];
  fit.beta = b.segment(1, static_cast<Eigen::Index>(k));
  fit.theta = b.segment(1 + static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
}

void finish(FitResult& fit) {
  fit.aic = 2.0 * static_cast<double>(fit.parameter_count()) - 2.0 * fit.loglik;
}

void attach_island_warning(FitResult& fit, const SpatialWeights& w) {
  const auto islands = detect_islands(w);
  if (!islands.empty()) {
    fit.warnings.push_back(std::to_string(islands.count()) +
                           " island unit(s) without neighbours; their spatial lags are 0");
  }
}

FitResult least_squares_fit(const Dataset& data, const SpatialWeights* w,
                            const ModelSpec& spec) {
  data.validate();
  const Design d = build_design(data, w, spec);
  const auto qr = factor(d.z);
  const Eigen::VectorXd b = qr.solve(data.y);

  FitResult fit;
  fit.spec = spec;
  fit.covariate_names = d.names;
  fit.lagged_columns = d.lagged;
  fit.n = data.n();
  fit.k = data.k();
  fit.residuals = data.y - d.z * b;
  unpack_coefficients(fit, b, data.k(), d.lagged.size());
  fill_parameter_names(fit, d);

  const auto n = static_cast<double>(data.n());
  const auto p = static_cast<double>(d.z.cols());
  const double ss = fit.residuals.squaredNorm();
  fit.sigma2 = ss / (n - p);

  const auto q = d.z.cols();
  fit.vcov = Eigen::MatrixXd::Zero(q + 1, q + 1);
  const Eigen::MatrixXd xtx_inv =
      (d.z.transpose() * d.z).ldlt().solve(Eigen::MatrixXd::Identity(q, q));
  fit.vcov.topLeftCorner(q, q) = fit.sigma2 * xtx_inv;
  const double sigma2_ml = ss / n;
  fit.vcov(q, q) = 2.0 * sigma2_ml * sigma2_ml / n;

  fit.loglik = ss > 0.0 ? -0.5 * n * (kLog2Pi + std::log(sigma2_ml) + 1.0)
                        : std::numeric_limits<double>::infinity();
  fit.y = data.y;
  fit.design = d.z;
  if (w) {
    fit.weights_normalization = w->normalization();
    attach_island_warning(fit, *w);
  }
  finish(fit);
  return fit;
}

// Maximises f on [lo, hi]: grid evaluation followed by golden-section
// refinement around the best grid point. The returned value is never below
// the best grid value.
struct Maximum {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
  bool at_bound = false;
};

Maximum maximize_1d(const std::function<double(double)>& f, double lo, double hi,
                    std::size_t grid_points, double tol) {
  grid_points = std::max<std::size_t>(grid_points, 3);
  std::vector<double> xs(grid_points);
  std::vector<double> fs(grid_points);
  std::size_t best = 0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    fs[i] = f(xs[i]);
    if (fs[i] > fs[best]) best = i;
  }
  double a = xs[best == 0 ? 0 : best - 1];
  double b = xs[std::min(best + 1, grid_points - 1)];

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Maximum result;
  result.x = 0.5 * (a + b);
  result.value = f(result.x);
  // Endpoints are not visited by the golden-section interior points.
  for (double cand : {xs[best], a, b}) {
    const double v = f(cand);
    if (v > result.value) {
      result.value = v;
      result.x = cand;
    }
  }
  result.at_bound = hi > lo && ((result.x - lo) <= 10.0 * tol || (hi - result.x) <= 10.0 * tol);
  return result;
}

using Objective = std::function<double(const Eigen::VectorXd&)>;

Eigen::MatrixXd numerical_hessian(const Objective& f, const Eigen::VectorXd& x) {
  const auto p = x.size();
  Eigen::VectorXd h(p);
  for (Eigen::Index i = 0; i < p; ++i) h[i] = 1e-5 * std::max(1.0, std::abs(x[i]));
  Eigen::MatrixXd hess(p, p);
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < p; ++i) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[i] += h[i];
    xm[i] -= h[i];
    hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h[i] * h[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      Eigen::VectorXd a = x, b = x, c = x, d = x;
      a[i] += h[i]; a[j] += h[j];
      b[i] += h[i]; b[j] -= h[j];
      c[i] -= h[i]; c[j] += h[j];
      d[i] -= h[i]; d[j] -= h[j];
      const double v = (f(a) - f(b) - f(c) + f(d)) / (4.0 * h[i] * h[j]);
      hess(i, j) = v;
      hess(j, i) = v;
    }
  }
  return hess;
}

Eigen::MatrixXd covariance_from_hessian(const Eigen::MatrixXd& hess, FitResult& fit) {
  const Eigen::MatrixXd info = -0.5 * (hess + hess.transpose());
  Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
  const auto p = info.rows();
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
      ldlt.vectorD().minCoeff() > 0.0) {
    return ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  }
  fit.warnings.push_back("observed information is not positive definite; vcov is unreliable");
  return Eigen::FullPivLU<Eigen::MatrixXd>(info).inverse();
}

std::shared_ptr<const LogDeterminant> resolve_log_det(const SpatialWeights& w,
                                                      const FitOptions& options) {
  if (options.log_det) return options.log_det;
  return std::make_shared<const LogDeterminant>(w);
}

std::pair<double, double> search_bounds(const LogDeterminant& ld, const FitOptions& options) {
  double lo = std::max(-0.999, ld.lower_bound());
  double hi = std::min(0.999, ld.upper_bound());
  if (options.lower) lo = std::max(lo, *options.lower);
  if (options.upper) hi = std::min(hi, *options.upper);
  // Stay strictly inside the singular points.
  if (lo <= ld.lower_bound()) lo = ld.lower_bound() + 1e-9;
  if (hi >= ld.upper_bound()) hi = ld.upper_bound() - 1e-9;
  if (options.lower && options.upper && *options.lower == *options.upper) {
    if (*options.lower < lo || *options.lower > hi) {
      throw Error(ErrorCode::InvalidArgument, "fixed parameter outside the admissible range");
    }
    return {*options.lower, *options.lower};
  }
  if (!(lo <= hi)) throw Error(ErrorCode::InvalidArgument, "empty parameter interval");
  return {lo, hi};
}

void require_normalized(const SpatialWeights& w) {
  if (!w.is_normalized()) {
    throw Error(ErrorCode::RequiresNormalizedW,
                "maximum likelihood fits need a row- or eigen-normalized W");
  }
}

void mark_boundary(FitResult& fit, const Maximum& best, std::string_view param) {
  if (!best.at_bound) return;
  fit.boundary = true;
  fit.warnings.push_back("BoundaryEstimate: " + std::string(param) +
                         " estimate is on the edge of the parameter space");
}

FitResult lag_fit(const Dataset& data, const SpatialWeights& w, const ModelSpec& spec,
                  const FitOptions& options) {
  data.validate();
  check_pairing(data, w);
  require_normalized(w);
  const auto ld = resolve_log_det(w, options);
  const auto [lo, hi] = search_bounds(*ld, options);

  const Design d = build_design(data, &w, spec);
  const auto qr = factor(d.z);
  const Eigen::VectorXd wy = spatial_lag(w, data.y);
  const Eigen::VectorXd b0 = qr.solve(data.y);
  const Eigen::VectorXd bl = qr.solve(wy);
  const Eigen::VectorXd e0 = data.y - d.z * b0;
  const Eigen::VectorXd el = wy - d.z * bl;
  const double s00 = e0.squaredNorm();
  const double s0l = e0.dot(el);
  const double sll = el.squaredNorm();
  const auto n = static_cast<double>(data.n());

  auto concentrated = [&](double rho) {
    const double ss = s00 - 2.0 * rho * s0l + rho * rho * sll;
    return -0.5 * n * std::log(ss / n) + (*ld)(rho);
  };
  const Maximum best = maximize_1d(concentrated, lo, hi, options.grid_points, options.tol);
  const double rho = best.x;

  FitResult fit;
  fit.spec = spec;
  fit.covariate_names = d.names;
  fit.lagged_columns = d.lagged;
  fit.n = data.n();
  fit.k = data.k();
  fit.weights_normalization = w.normalization();
  const Eigen::VectorXd b = b0 - rho * bl;
  unpack_coefficients(fit, b, data.k(), d.lagged.size());
  fit.rho = rho;
  fit.residuals = e0 - rho * el;
  fit.sigma2 = fit.residuals.squaredNorm() / n;
  fit.loglik = -0.5 * n * (kLog2Pi + 1.0 + std::log(fit.sigma2)) + (*ld)(rho);
  fill_parameter_names(fit, d);
  mark_boundary(fit, best, "rho");

  const auto q = d.z.cols();
  Objective full = [&](const Eigen::VectorXd& theta) {
    const double r = theta[q];
    const double s2 = theta[q + 1];
    if (!(s2 > 0.0)) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd e = data.y - r * wy - d.z * theta.head(q);
    return -0.5 * n * (kLog2Pi + std::log(s2)) + (*ld)(r) - 0.5 * e.squaredNorm() / s2;
  };
  Eigen::VectorXd at(q + 2);
  at << b, rho, fit.sigma2;
  fit.vcov = covariance_from_hessian(numerical_hessian(full, at), fit);

  fit.y = data.y;
  fit.design = d.z;
  attach_island_warning(fit, w);
  finish(fit);
  return fit;
}

FitResult error_fit(const Dataset& data, const SpatialWeights& w, const ModelSpec& spec,
                    const FitOptions& options) {
  data.validate();
  check_pairing(data, w);
  require_normalized(w);
  const auto ld = resolve_log_det(w, options);
  const auto [lo, hi] = search_bounds(*ld, options);

  const Design d = build_design(data, &w, spec);
  factor(d.z);
  const Eigen::VectorXd wy = spatial_lag(w, data.y);
  const Eigen::MatrixXd wz = spatial_lag(w, d.z);
  const auto n = static_cast<double>(data.n());

  auto filtered_coefficients = [&](double lambda) -> Eigen::VectorXd {
    const Eigen::MatrixXd zf = d.z - lambda * wz;
    const Eigen::VectorXd yf = data.y - lambda * wy;
    return zf.colPivHouseholderQr().solve(yf);
  };
  auto filtered_residuals = [&](double lambda, const Eigen::VectorXd& b) -> Eigen::VectorXd {
    return (data.y - lambda * wy) - (d.z - lambda * wz) * b;
  };
  auto concentrated = [&](double lambda) {
    const Eigen::VectorXd e = filtered_residuals(lambda, filtered_coefficients(lambda));
    return -0.5 * n * std::log(e.squaredNorm() / n) + (*ld)(lambda);
  };
  const Maximum best = maximize_1d(concentrated, lo, hi, options.grid_points, options.tol);
  const double lambda = best.x;

  FitResult fit;
  fit.spec = spec;
  fit.covariate_names = d.names;
  fit.lagged_columns = d.lagged;
  fit.n = data.n();
  fit.k = data.k();
  fit.weights_normalization = w.normalization();
  const Eigen::VectorXd b = filtered_coefficients(lambda);
  unpack_coefficients(fit, b, data.k(), d.lagged.size());
  fit.lambda = lambda;
  fit.residuals = filtered_residuals(lambda, b);
  fit.sigma2 = fit.residuals.squaredNorm() / n;
  fit.loglik = -0.5 * n * (kLog2Pi + 1.0 + std::log(fit.sigma2)) + (*ld)(lambda);
  fill_parameter_names(fit, d);
  mark_boundary(fit, best, "lambda");

  const auto q = d.z.cols();
  Objective full = [&](const Eigen::VectorXd& theta) {
    const double l = theta[q];
    const double s2 = theta[q + 1];
    if (!(s2 > 0.0)) return -std::numeric_limits<double>::infinity();
    const Eigen::VectorXd e = filtered_residuals(l, theta.head(q));
    return -0.5 * n * (kLog2Pi + std::log(s2)) + (*ld)(l) - 0.5 * e.squaredNorm() / s2;
  };
  Eigen::VectorXd at(q + 2);
  at << b, lambda, fit.sigma2;
  fit.vcov = covariance_from_hessian(numerical_hessian(full, at), fit);

  fit.y = data.y;
  fit.design = d.z;
  attach_island_warning(fit, w);
  finish(fit);
  return fit;
}

ModelSpec with_kind(ModelSpec spec, ModelKind kind) {
  spec.kind = kind;
  return spec;
}

}  // namespace

FitResult fit_ols(const Dataset& data) {
  return least_squares_fit(data, nullptr, ModelSpec{ModelKind::OLS});
}

FitResult fit_slx(const Dataset& data, const SpatialWeights& w, const ModelSpec& spec) {
  data.validate();
  check_pairing(data, w);
  return least_squares_fit(data, &w, with_kind(spec, ModelKind::SLX));
}

FitResult fit_sar(const Dataset& data, const SpatialWeights& w, const FitOptions& options) {
  return lag_fit(data, w, ModelSpec{ModelKind::SAR}, options);
}

FitResult fit_sem(const Dataset& data, const SpatialWeights& w, const FitOptions& options) {
  return error_fit(data, w, ModelSpec{ModelKind::SEM}, options);
}

FitResult fit_sdm(const Dataset& data, const SpatialWeights& w, const FitOptions& options,
                  const ModelSpec& spec) {
  return lag_fit(data, w, with_kind(spec, ModelKind::SDM), options);
}

FitResult fit_sdem(const Dataset& data, const SpatialWeights& w, const FitOptions& options,
                   const ModelSpec& spec) {
  return error_fit(data, w, with_kind(spec, ModelKind::SDEM), options);
}

FitResult fit_model(const Dataset& data, const SpatialWeights& w, const ModelSpec& spec,
                    const FitOptions& options) {
  switch (spec.kind) {
    case ModelKind::OLS: {
      check_pairing(data, w);
      FitResult fit = fit_ols(data);
      fit.weights_normalization = w.normalization();
      return fit;
    }
    case ModelKind::SLX: return fit_slx(data, w, spec);
    case ModelKind::SAR: return fit_sar(data, w, options);
    case ModelKind::SEM: return fit_sem(data, w, options);
    case ModelKind::SDM: return fit_sdm(data, w, options, spec);
    case ModelKind::SDEM: return fit_sdem(data, w, options, spec);
  }
  throw Error(ErrorCode::WrongModel, "unknown model kind");
}

std::vector<FitResult> fit_all(const Dataset& data, const SpatialWeights& w,
                               FitOptions options) {
  if (!options.log_det && w.is_normalized()) {
    options.log_det = std::make_shared<const LogDeterminant>(w);
  }
  constexpr std::size_t count = std::size(kAllModels);
  std::vector<std::optional<FitResult>> slots(count);
  parallel_for(count, [&](std::size_t i) {
    slots[i] = fit_model(data, w, ModelSpec{kAllModels[i]}, options);
  });
  std::vector<FitResult> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// Likelihood-ratio tests

bool is_nested(ModelKind restricted, ModelKind unrestricted) {
  using K = ModelKind;
  if (restricted == unrestricted) return true;
  switch (restricted) {
    case K::OLS: return true;
    case K::SAR: return unrestricted == K::SDM;
    case K::SEM: return unrestricted == K::SDEM;
    case K::SLX: return unrestricted == K::SDM || unrestricted == K::SDEM;
    default: return false;
  }
}

double chi_square_sf(double statistic, double df) {
  if (!(df > 0.0)) return 1.0;
  if (!(statistic > 0.0)) return 1.0;
  if (std::isinf(statistic)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * statistic);
}

LrTestResult lr_test(const FitResult& restricted, const FitResult& unrestricted) {
  if (!is_nested(restricted.spec.kind, unrestricted.spec.kind) ||
      restricted.n != unrestricted.n || restricted.k != unrestricted.k ||
      restricted.parameter_count() > unrestricted.parameter_count()) {
    throw Error(ErrorCode::NotNested, std::string(to_string(restricted.spec.kind)) +
                                          " is not nested in " +
                                          std::string(to_string(unrestricted.spec.kind)));
  }
  // Theta restrictions only nest when the restricted lags are a subset.
  for (auto c : restricted.lagged_columns) {
    if (std::find(unrestricted.lagged_columns.begin(), unrestricted.lagged_columns.end(), c) ==
        unrestricted.lagged_columns.end()) {
      throw Error(ErrorCode::NotNested, "lagged covariates are not a subset");
    }
  }
  LrTestResult r;
  r.restricted_model = restricted.spec.kind;
  r.unrestricted_model = unrestricted.spec.kind;
  r.df = unrestricted.parameter_count() - restricted.parameter_count();
  r.statistic = 2.0 * (unrestricted.loglik - restricted.loglik);
  r.p_value = chi_square_sf(r.statistic, static_cast<double>(r.df));
  return r;
}

}  // namespace spatialecon
