#include "spatialecon/impacts.hpp"

#include "spatialecon/error.hpp"
#include "spatialecon/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace spatialecon {

std::string_view to_string(ImpactType type) {
  switch (type) {
    case ImpactType::none: return "none";
    case ImpactType::global: return "global";
    case ImpactType::local: return "local";
  }
  return "none";
}

ImpactType impact_type(ModelKind kind) {
  switch (kind) {
    case ModelKind::SAR:
    case ModelKind::SDM: return ImpactType::global;
    case ModelKind::SLX:
    case ModelKind::SDEM: return ImpactType::local;
    default: return ImpactType::none;
  }
}

MultiplierMatrix multiplier_matrix(double rho, const SpatialWeights& w) {
  const std::size_t n = w.size();
  if (n > kDenseLimit) {
    throw Error(ErrorCode::TooLargeForDense,
                "n = " + std::to_string(n) + " exceeds the dense limit");
  }
  const auto nn = static_cast<Eigen::Index>(n);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(nn, nn) - rho * w.dense();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < nn; ++i) {
    if (std::abs(packed(i, i)) < 1e-14) {
      throw Error(ErrorCode::SingularMultiplier, "I - rho W is singular");
    }
  }
  return {lu.inverse(), rho};
}

namespace {

std::size_t series_terms(double abs_rho, double tol) {
  if (abs_rho == 0.0) return 1;
  return static_cast<std::size_t>(std::ceil(std::log(tol) / std::log(abs_rho))) + 1;
}

void require_stationary(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw Error(ErrorCode::SingularMultiplier, "power series needs |rho| < 1");
  }
}

}  // namespace

Eigen::MatrixXd power_series_multiplier(double rho, const SpatialWeights& w, double tol) {
  require_stationary(rho);
  if (!w.is_normalized()) {
    throw Error(ErrorCode::RequiresNormalizedW, "power series needs a normalized W");
  }
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  const std::size_t h = series_terms(std::abs(rho), tol);
  for (std::size_t i = 1; i <= h; ++i) {
    term = rho * (w.matrix() * term);
    sum += term;
  }
  return sum;
}

namespace {

double coefficient(const Eigen::VectorXd& v, std::optional<Eigen::Index> at) {
  return at ? v[*at] : 0.0;
}

std::optional<Eigen::Index> theta_index(const FitResult& fit, std::size_t k) {
  for (std::size_t t = 0; t < fit.lagged_columns.size(); ++t) {
    if (fit.lagged_columns[t] == k) return static_cast<Eigen::Index>(t);
  }
  return std::nullopt;
}

void check_covariate(const FitResult& fit, std::size_t k) {
  if (k >= static_cast<std::size_t>(fit.beta.size())) {
    throw Error(ErrorCode::BadIndex, "covariate index " + std::to_string(k) +
                                         " out of range (k = " +
                                         std::to_string(fit.beta.size()) + ")");
  }
}

void check_weights(const FitResult& fit, const SpatialWeights& w) {
  if (w.size() != fit.n) {
    throw Error(ErrorCode::IdMismatch, "fit has " + std::to_string(fit.n) +
                                           " units, W has " + std::to_string(w.size()));
  }
}

}  // namespace

Eigen::MatrixXd partial_effects(const FitResult& fit, const SpatialWeights& w,
                                std::size_t k) {
  check_covariate(fit, k);
  check_weights(fit, w);
  const auto n = static_cast<Eigen::Index>(w.size());
  const double beta = fit.beta[static_cast<Eigen::Index>(k)];
  const double theta = coefficient(fit.theta, theta_index(fit, k));
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

  switch (fit.spec.kind) {
    case ModelKind::OLS:
    case ModelKind::SEM: return beta * identity;
    case ModelKind::SLX:
    case ModelKind::SDEM: return beta * identity + theta * w.dense();
    case ModelKind::SAR: return multiplier_matrix(*fit.rho, w).matrix * beta;
    case ModelKind::SDM: {
      const Eigen::MatrixXd s = multiplier_matrix(*fit.rho, w).matrix;
      return beta * s + theta * (s * w.matrix());
    }
  }
  throw Error(ErrorCode::WrongModel, "unknown model kind");
}

Eigen::VectorXd impacts_on_units(const Eigen::MatrixXd& effects) {
  return effects.rowwise().sum();
}

Eigen::VectorXd impacts_from_units(const Eigen::MatrixXd& effects) {
  return effects.colwise().sum().transpose();
}

// ---------------------------------------------------------------------------
// Multiplier moments

MultiplierKernel::MultiplierKernel(const SpatialWeights& w, MomentMethod method,
                                   double max_abs_rho)
    : w_(&w), method_(method), max_abs_rho_(max_abs_rho) {
  if (method_ == MomentMethod::automatic) {
    method_ = w.size() <= kDenseLimit ? MomentMethod::dense : MomentMethod::series;
  }
  if (method_ == MomentMethod::spectral) {
    spectrum_ = Spectrum::compute(w, true);
    if (!spectrum_) method_ = w.size() <= kDenseLimit ? MomentMethod::dense : MomentMethod::series;
  }
  if (method_ == MomentMethod::series) {
    if (!w.is_normalized()) {
      throw Error(ErrorCode::RequiresNormalizedW, "power series needs a normalized W");
    }
    require_stationary(max_abs_rho);
    const std::size_t h = std::min<std::size_t>(series_terms(max_abs_rho, 1e-12), 20000);
    const auto n = static_cast<Eigen::Index>(w.size());
    const auto& m = w.matrix();
    trace_powers_.assign(h + 2, 0.0);
    sum_powers_.assign(h + 2, 0.0);

    // 1'W^h 1 from repeated products with the ones vector.
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    for (std::size_t p = 0; p < h + 2; ++p) {
      sum_powers_[p] = v.sum() / static_cast<double>(n);
      v = m * v;
    }
    // tr(W^h) exactly, propagating blocks of unit vectors.
    constexpr Eigen::Index block = 64;
    for (Eigen::Index start = 0; start < n; start += block) {
      const Eigen::Index width = std::min(block, n - start);
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, width);
      for (Eigen::Index c = 0; c < width; ++c) b(start + c, c) = 1.0;
      for (std::size_t p = 0; p < h + 2; ++p) {
        double diag = 0.0;
        for (Eigen::Index c = 0; c < width; ++c) diag += b(start + c, c);
        trace_powers_[p] += diag / static_cast<double>(n);
        b = m * b;
      }
    }
  }
}

MultiplierMoments MultiplierKernel::operator()(double rho) const {
  const auto n = static_cast<double>(w_->size());
  MultiplierMoments out;
  switch (method_) {
    case MomentMethod::dense:
    case MomentMethod::automatic: {
      const Eigen::MatrixXd s = multiplier_matrix(rho, *w_).matrix;
      const auto& m = w_->matrix();
      const Eigen::VectorXd w1 = m * Eigen::VectorXd::Ones(m.rows());
      double trace_sw = 0.0;
      for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
        for (SpatialWeights::SparseMatrix::InnerIterator it(m, r); it; ++it) {
          trace_sw += s(it.col(), r) * it.value();  // (SW)_jj = sum_r S_jr W_rj
        }
      }
      out.mean_diag_s = s.trace() / n;
      out.mean_diag_sw = trace_sw / n;
      out.mean_rowsum_s = s.sum() / n;
      out.mean_rowsum_sw = (s * w1).sum() / n;
      return out;
    }
    case MomentMethod::spectral: {
      std::complex<double> ts = 0.0, tsw = 0.0, ss = 0.0, ssw = 0.0;
      const auto& ev = spectrum_->eigenvalues();
      const auto& c = spectrum_->unit_weights();
      for (Eigen::Index i = 0; i < ev.size(); ++i) {
        const std::complex<double> denom = 1.0 - rho * ev[i];
        if (std::abs(denom) < 1e-14) {
          throw Error(ErrorCode::SingularMultiplier, "I - rho W is singular");
        }
        const std::complex<double> f = 1.0 / denom;
        ts += f;
        tsw += ev[i] * f;
        ss += c[i] * f;
        ssw += c[i] * ev[i] * f;
      }
      out.mean_diag_s = ts.real() / n;
      out.mean_diag_sw = tsw.real() / n;
      out.mean_rowsum_s = ss.real() / n;
      out.mean_rowsum_sw = ssw.real() / n;
      return out;
    }
    case MomentMethod::series: {
      require_stationary(rho);
      const std::size_t h = trace_powers_.size() - 2;
      if (std::abs(rho) > max_abs_rho_) {
        throw Error(ErrorCode::InvalidArgument,
                    "rho exceeds the range prepared for the power series");
      }
      double power = 1.0;
      for (std::size_t p = 0; p <= h; ++p) {
        out.mean_diag_s += power * trace_powers_[p];
        out.mean_diag_sw += power * trace_powers_[p + 1];
        out.mean_rowsum_s += power * sum_powers_[p];
        out.mean_rowsum_sw += power * sum_powers_[p + 1];
        power *= rho;
      }
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summaries

namespace {

struct Triple {
  double direct = 0.0;
  double indirect = 0.0;
  double total = 0.0;
};

Triple global_triple(const MultiplierMoments& m, double beta, double theta) {
  Triple t;
  t.direct = beta * m.mean_diag_s + theta * m.mean_diag_sw;
  t.total = beta * m.mean_rowsum_s + theta * m.mean_rowsum_sw;
  t.indirect = t.total - t.direct;
  return t;
}

Triple local_triple(double beta, double theta) { return {beta, theta, beta + theta}; }

ImpactsSummary empty_summary(const FitResult& fit) {
  ImpactsSummary s;
  s.model = fit.spec.kind;
  s.type = impact_type(fit.spec.kind);
  for (std::size_t k = 0; k < static_cast<std::size_t>(fit.beta.size()); ++k) {
    CovariateImpact c;
    c.covariate = k < fit.covariate_names.size() ? fit.covariate_names[k]
                                                 : "x" + std::to_string(k + 1);
    s.covariates.push_back(c);
  }
  return s;
}

ImpactDraws describe(std::vector<double> values) {
  ImpactDraws d;
  const auto n = static_cast<double>(values.size());
  // Shifted by the first value so constant draws give exactly zero spread.
  const double shift = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double centre = sum / n;
  d.mean = shift + centre;
  double ss = 0.0;
  for (double v : values) ss += (v - shift - centre) * (v - shift - centre);
  d.sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double pos = p * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  d.q025 = quantile(0.025);
  d.q975 = quantile(0.975);
  return d;
}

}  // namespace

ImpactsSummary impacts_summary(const FitResult& fit, const SpatialWeights& w) {
  check_weights(fit, w);
  ImpactsSummary s = empty_summary(fit);
  std::optional<MultiplierMoments> moments;
  if (s.type == ImpactType::global) {
    MultiplierKernel kernel(w, MomentMethod::automatic, std::abs(*fit.rho));
    moments = kernel(*fit.rho);
  }
  for (std::size_t k = 0; k < s.covariates.size(); ++k) {
    const double beta = fit.beta[static_cast<Eigen::Index>(k)];
    const double theta = coefficient(fit.theta, theta_index(fit, k));
    Triple t;
    switch (s.type) {
      case ImpactType::none: t = {beta, 0.0, beta}; break;
      case ImpactType::local: t = local_triple(beta, theta); break;
      case ImpactType::global: t = global_triple(*moments, beta, theta); break;
    }
    s.covariates[k].direct = t.direct;
    s.covariates[k].indirect = t.indirect;
    s.covariates[k].total = t.total;
  }
  return s;
}

ImpactsSummary impacts_inference(const FitResult& fit, const SpatialWeights& w,
                                 std::size_t n_draws, std::uint64_t seed) {
  ImpactsSummary s = impacts_summary(fit, w);
  if (n_draws == 0) return s;

  const Eigen::VectorXd mean = fit.estimates();
  const auto p = mean.size();
  if (fit.vcov.rows() != p || fit.vcov.cols() != p) {
    throw Error(ErrorCode::BadCovariance, "vcov does not match the parameter vector");
  }
  if (!fit.vcov.allFinite()) throw Error(ErrorCode::BadCovariance, "vcov is not finite");
  const Eigen::MatrixXd sym = 0.5 * (fit.vcov + fit.vcov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::BadCovariance, "vcov eigendecomposition failed");
  }
  const Eigen::VectorXd values = eig.eigenvalues();
  const double largest = std::max(0.0, values.cwiseAbs().maxCoeff());
  if (values.minCoeff() < -1e-6 * std::max(1.0, largest)) {
    throw Error(ErrorCode::BadCovariance, "vcov is not positive semi-definite");
  }
  const Eigen::MatrixXd root =
      eig.eigenvectors() * values.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  const std::size_t k = s.covariates.size();
  std::optional<Eigen::Index> rho_at;
  if (fit.rho) rho_at = static_cast<Eigen::Index>(*fit.parameter_index("rho"));
  std::optional<MultiplierKernel> kernel;
  if (s.type == ImpactType::global) {
    const MomentMethod method =
        w.size() <= kDenseLimit ? MomentMethod::spectral : MomentMethod::series;
    kernel.emplace(w, method, 0.999);
  }
  const auto theta_offset = static_cast<Eigen::Index>(1 + k);

  // draws x covariates x {direct, indirect, total}
  std::vector<double> results(n_draws * k * 3, 0.0);
  parallel_for(n_draws, [&](std::size_t d) {
    Rng rng = make_stream(seed, "impacts.draw", d);
    Eigen::VectorXd draw(p);
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 10000) {
        throw Error(ErrorCode::BadCovariance, "could not draw a stationary rho");
      }
      Eigen::VectorXd z(p);
      for (Eigen::Index i = 0; i < p; ++i) z[i] = standard_normal(rng);
      draw = mean + root * z;
      if (!rho_at || std::abs(draw[*rho_at]) < 0.999) break;
    }
    std::optional<MultiplierMoments> moments;
    if (kernel) moments = (*kernel)(draw[*rho_at]);
    for (std::size_t c = 0; c < k; ++c) {
      const double beta = draw[1 + static_cast<Eigen::Index>(c)];
      const auto t_at = theta_index(fit, c);
      const double theta = t_at ? draw[theta_offset + *t_at] : 0.0;
      Triple t;
      switch (s.type) {
        case ImpactType::none: t = {beta, 0.0, beta}; break;
        case ImpactType::local: t = local_triple(beta, theta); break;
        case ImpactType::global: t = global_triple(*moments, beta, theta); break;
      }
      double* slot = &results[(d * k + c) * 3];
      slot[0] = t.direct;
      slot[1] = t.indirect;
      slot[2] = t.total;
    }
  });

  for (std::size_t c = 0; c < k; ++c) {
    std::vector<double> direct(n_draws), indirect(n_draws), total(n_draws);
    for (std::size_t d = 0; d < n_draws; ++d) {
      const double* slot = &results[(d * k + c) * 3];
      direct[d] = slot[0];
      indirect[d] = slot[1];
      total[d] = slot[2];
    }
    s.covariates[c].direct_draws = describe(std::move(direct));
    s.covariates[c].indirect_draws = describe(std::move(indirect));
    s.covariates[c].total_draws = describe(std::move(total));
  }
  s.draws = n_draws;
  s.seed = seed;
  return s;
}

}  // namespace spatialecon
