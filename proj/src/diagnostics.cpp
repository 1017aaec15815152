#include "spatialecon/diagnostics.hpp"

#include "spatialecon/error.hpp"
#include "spatialecon/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace spatialecon {

std::string_view to_string(Alternative a) {
  switch (a) {
    case Alternative::two_sided: return "two-sided";
    case Alternative::greater: return "greater";
    case Alternative::less: return "less";
  }
  return "two-sided";
}

Alternative parse_alternative(std::string_view text) {
  if (text == "two-sided") return Alternative::two_sided;
  if (text == "greater") return Alternative::greater;
  if (text == "less") return Alternative::less;
  throw Error(ErrorCode::ConfigError, "unknown alternative '" + std::string(text) + "'");
}

namespace {

double quadratic_form(const SpatialWeights::SparseMatrix& m, const Eigen::VectorXd& z) {
  double s = 0.0;
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    double row = 0.0;
    for (SpatialWeights::SparseMatrix::InnerIterator it(m, r); it; ++it) {
      row += it.value() * z[it.col()];
    }
    s += z[r] * row;
  }
  return s;
}

bool is_extreme(double draw, double observed, Alternative alternative) {
  // Relative slack so exact ties (e.g. a permutation that reproduces y)
  // count as extreme despite rounding.
  const double slack = 1e-12 * std::max(1.0, std::abs(observed));
  switch (alternative) {
    case Alternative::two_sided: return std::abs(draw) >= std::abs(observed) - slack;
    case Alternative::greater: return draw >= observed - slack;
    case Alternative::less: return draw <= observed + slack;
  }
  return false;
}

}  // namespace

MoranResult morans_i(const SpatialWeights& w, const Eigen::VectorXd& y,
                     std::size_t n_permutations, std::uint64_t seed,
                     Alternative alternative) {
  const auto n = static_cast<std::size_t>(y.size());
  if (n != w.size()) throw Error(ErrorCode::ShapeError, "y length does not match W");
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "Moran's I needs at least 3 units");
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) throw Error(ErrorCode::MissingData, "y has non-finite values");
  }
  const double s0 = w.total_weight();
  if (w.nonzeros() == 0 || !(s0 > 0.0)) {
    throw Error(ErrorCode::NoConnectivity, "weights matrix has no nonzero entry");
  }

  const Eigen::VectorXd z = y.array() - y.mean();
  const double zz = z.squaredNorm();
  const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
  if (zz <= static_cast<double>(n) * std::pow(1e-12 * scale, 2)) {
    throw Error(ErrorCode::ZeroVariance, "variable is constant");
  }
  const double factor = static_cast<double>(n) / s0;
  const auto& m = w.matrix();

  MoranResult result;
  result.statistic = factor * quadratic_form(m, z) / zz;
  result.expectation = -1.0 / (static_cast<double>(n) - 1.0);
  result.n_permutations = n_permutations;
  result.seed = seed;
  result.s0 = s0;
  result.alternative = alternative;

  std::vector<char> extreme(n_permutations, 0);
  parallel_for(n_permutations, [&](std::size_t p) {
    Rng rng = make_stream(seed, "moran.permutation", p);
    Eigen::VectorXd zp = z;
    portable_shuffle(zp.data(), zp.data() + zp.size(), rng);
    const double draw = factor * quadratic_form(m, zp) / zz;
    extreme[p] = is_extreme(draw, result.statistic, alternative) ? 1 : 0;
  });
  const auto count = static_cast<double>(std::count(extreme.begin(), extreme.end(), 1));
  result.p_value = (1.0 + count) / (1.0 + static_cast<double>(n_permutations));
  return result;
}

MoranResult morans_i_residuals(const FitResult& fit, const SpatialWeights& w,
                               std::size_t n_permutations, std::uint64_t seed,
                               Alternative alternative) {
  if (static_cast<std::size_t>(fit.residuals.size()) != fit.n || fit.n == 0) {
    throw Error(ErrorCode::ShapeError, "fit carries no residuals");
  }
  return morans_i(w, fit.residuals, n_permutations, seed, alternative);
}

LmTestResult lm_tests(const FitResult& ols_fit, const SpatialWeights& w) {
  if (ols_fit.spec.kind != ModelKind::OLS) {
    throw Error(ErrorCode::WrongModel, "LM tests need an OLS fit, got " +
                                           std::string(to_string(ols_fit.spec.kind)));
  }
  if (ols_fit.design.rows() == 0 || ols_fit.y.size() == 0) {
    throw Error(ErrorCode::WrongModel, "fit does not carry its design matrix");
  }
  if (w.size() != ols_fit.n) throw Error(ErrorCode::ShapeError, "fit and W sizes differ");
  if (w.nonzeros() == 0) {
    throw Error(ErrorCode::NoConnectivity, "weights matrix has no nonzero entry");
  }

  const auto& x = ols_fit.design;
  const Eigen::VectorXd& e = ols_fit.residuals;
  const auto n = static_cast<double>(ols_fit.n);
  const double sigma2 = e.squaredNorm() / n;
  if (!(sigma2 > 0.0)) throw Error(ErrorCode::ZeroVariance, "OLS residuals are all zero");

  const auto& m = w.matrix();
  const SpatialWeights::SparseMatrix mt = m.transpose();
  // tr(W'W + WW) = sum_ij w_ij^2 + sum_ij w_ij w_ji
  const double trace = m.cwiseProduct(m).sum() + m.cwiseProduct(mt).sum();

  const Eigen::VectorXd wy = m * ols_fit.y;
  const Eigen::VectorXd we = m * e;
  const Eigen::VectorXd fitted = ols_fit.y - e;
  const Eigen::VectorXd wxb = m * fitted;
  // M wxb = residual of wxb regressed on X
  const Eigen::VectorXd coef = x.colPivHouseholderQr().solve(wxb);
  const Eigen::VectorXd mwxb = wxb - x * coef;

  const double d_lag = e.dot(wy) / sigma2;
  const double d_err = e.dot(we) / sigma2;
  const double j = (wxb.dot(mwxb) + trace * sigma2) / sigma2;

  auto stat = [](double value) {
    LmStatistic s;
    s.statistic = std::max(0.0, value);
    s.p_value = chi_square_sf(s.statistic, 1.0);
    return s;
  };
  auto safe_div = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };

  LmTestResult r;
  r.lm_err = stat(safe_div(d_err * d_err, trace));
  r.lm_lag = stat(safe_div(d_lag * d_lag, j));
  r.robust_lm_lag = stat(safe_div(std::pow(d_lag - d_err, 2), j - trace));
  r.robust_lm_err =
      stat(safe_div(std::pow(d_err - (trace / j) * d_lag, 2), trace - trace * trace / j));
  return r;
}

}  // namespace spatialecon
