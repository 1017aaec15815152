#include "fixtures.hpp"

#include "spatialecon/diagnostics.hpp"
#include "spatialecon/estimators.hpp"
#include "spatialecon/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace spatialecon;

namespace {

double dense_moran(const Eigen::MatrixXd& w, const Eigen::VectorXd& y) {
  const double n = static_cast<double>(y.size());
  const Eigen::VectorXd z = y.array() - y.mean();
  return n / w.sum() * z.dot(w * z) / z.dot(z);
}

struct DenseLm {
  double lm_lag, lm_err, rlm_lag, rlm_err;
};

DenseLm dense_lm(const Eigen::MatrixXd& w, const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd z(n, x.cols() + 1);
  z << Eigen::VectorXd::Ones(n), x;
  const Eigen::MatrixXd zz_inv = (z.transpose() * z).inverse();
  const Eigen::VectorXd b = zz_inv * z.transpose() * y;
  const Eigen::VectorXd e = y - z * b;
  const double s2 = e.squaredNorm() / static_cast<double>(n);
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - z * zz_inv * z.transpose();
  const double t = (w.transpose() * w + w * w).trace();
  const double d_lag = e.dot(w * y) / s2;
  const double d_err = e.dot(w * e) / s2;
  const Eigen::VectorXd wxb = w * z * b;
  const double j = (wxb.dot(m * wxb) + t * s2) / s2;
  return {d_lag * d_lag / j, d_err * d_err / t, std::pow(d_lag - d_err, 2) / (j - t),
          std::pow(d_err - t / j * d_lag, 2) / (t - t * t / j)};
}

Eigen::VectorXd normal_vector(std::size_t n, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = nd(gen);
  return v;
}

Dataset simulated(ModelKind kind, double rho, double lambda, const SpatialWeights& w,
                  std::uint64_t seed) {
  DgpSpec spec;
  spec.kind = kind;
  spec.rho = rho;
  spec.lambda = lambda;
  spec.beta = Eigen::Vector2d(1.0, -1.0);
  spec.seed = seed;
  return generate(spec, w);
}

}  // namespace

TEST_CASE("checkerboard on the bipartite worked example gives -1") {
  Eigen::VectorXd y(5);
  y << 0, 1, 0, 1, 0;
  const MoranResult r = morans_i(fixture::worked_w(), y, 99, 1);
  CHECK(std::abs(r.statistic + 1.0) <= 1e-12);
  CHECK(r.expectation == doctest::Approx(-0.25));
  CHECK(r.s0 == doctest::Approx(5.0));
  CHECK(r.n_permutations == 99);
  CHECK(r.p_value > 0.0);
  CHECK(r.p_value <= 1.0);
  CHECK(std::abs(morans_i(fixture::worked_raw(), y, 0, 1).statistic + 1.0) <= 1e-12);
}

TEST_CASE("constant pattern per component on a two-component W gives +1") {
  const std::vector<Edge> edges = {{"a", "b", {}}, {"b", "c", {}}, {"d", "e", {}}, {"e", "f", {}}};
  const SpatialWeights w = row_normalize(from_edge_list(edges, true));
  Eigen::VectorXd y(6);
  y << 2, 2, 2, -1, -1, -1;
  CHECK(std::abs(morans_i(w, y, 9, 0).statistic - 1.0) <= 1e-12);
}

TEST_CASE("Moran matches a dense evaluation") {
  std::mt19937_64 gen(5);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SpatialWeights w = fixture::random_weights(90, 0.07, 300 + s);
    const Eigen::VectorXd y = normal_vector(90, gen);
    CHECK(std::abs(morans_i(w, y, 0, 0).statistic - dense_moran(w.dense(), y)) <= 1e-12);
  }
}

TEST_CASE("Moran is affine invariant and respects S0 = n under row standardization") {
  std::mt19937_64 gen(6);
  const SpatialWeights w = row_normalize(fixture::random_weights(70, 0.1, 17));
  const Eigen::VectorXd y = normal_vector(70, gen);
  const double base = morans_i(w, y, 0, 0).statistic;
  const Eigen::VectorXd t = (-3.5 * y).array() + 11.0;
  CHECK(std::abs(morans_i(w, t, 0, 0).statistic - base) <= 1e-10);

  const Eigen::VectorXd z = y.array() - y.mean();
  const double with_n = z.dot(spatial_lag(w, z)) / z.dot(z);
  CHECK(std::abs(with_n - base) <= 1e-12);
}

TEST_CASE("Moran errors") {
  const SpatialWeights w = fixture::worked_w();
  CHECK_ERROR_CODE(morans_i(w, Eigen::VectorXd::Constant(5, 3.0), 9, 0), ErrorCode::ZeroVariance);
  const SpatialWeights empty = from_edge_list(std::vector<Edge>{}, false, {"a", "b", "c"});
  CHECK_ERROR_CODE(morans_i(empty, Eigen::Vector3d(1, 2, 4), 9, 0), ErrorCode::NoConnectivity);
  CHECK_ERROR_CODE(morans_i(w, Eigen::Vector3d(1, 2, 4), 9, 0), ErrorCode::ShapeError);
}

TEST_CASE("permutation p-values are reproducible and thread independent") {
  std::mt19937_64 gen(8);
  const SpatialWeights w = row_normalize(rook_lattice(10, 10));
  const Eigen::VectorXd y = normal_vector(100, gen);
  const MoranResult a = morans_i(w, y, 499, 42);
  const MoranResult b = morans_i(w, y, 499, 42);
  CHECK(a.p_value == b.p_value);
  setenv("SPATIALECON_THREADS", "4", 1);
  const MoranResult c = morans_i(w, y, 499, 42);
  unsetenv("SPATIALECON_THREADS");
  CHECK(a.p_value == c.p_value);
  const MoranResult d = morans_i(w, y, 499, 43);
  CHECK(d.seed == 43);
  // p-values live on the grid k / (1 + B).
  const double k = a.p_value * 500.0;
  CHECK(std::abs(k - std::round(k)) <= 1e-9);
}

TEST_CASE("one-sided alternatives") {
  Eigen::VectorXd y(100);
  for (int r = 0; r < 10; ++r)
    for (int c = 0; c < 10; ++c) y[r * 10 + c] = r + c;
  const SpatialWeights w = row_normalize(rook_lattice(10, 10));
  const MoranResult g = morans_i(w, y, 199, 1, Alternative::greater);
  const MoranResult l = morans_i(w, y, 199, 1, Alternative::less);
  CHECK(g.p_value == doctest::Approx(1.0 / 200.0));
  CHECK(l.p_value == doctest::Approx(1.0));
  CHECK(parse_alternative("two-sided") == Alternative::two_sided);
}

TEST_CASE("Moran under independence averages near -1/(n-1)") {
  const SpatialWeights w = row_normalize(rook_lattice(10, 10));
  std::mt19937_64 gen(2024);
  double sum = 0.0;
  for (int r = 0; r < 500; ++r) sum += morans_i(w, normal_vector(100, gen), 0, 0).statistic;
  CHECK(std::abs(sum / 500.0 + 1.0 / 99.0) <= 0.02);
}

TEST_CASE("residual Moran detects SEM dependence") {
  const SpatialWeights w = row_normalize(rook_lattice(20, 20));
  int rejections = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const Dataset d = simulated(ModelKind::SEM, 0.0, 0.8, w, 1000 + r);
    if (morans_i_residuals(fit_ols(d), w, 199, r).p_value < 0.05) ++rejections;
  }
  CHECK(rejections >= 90);
}

TEST_CASE("residual Moran null calibration") {
  const SpatialWeights w = row_normalize(rook_lattice(10, 10));
  int rejections = 0;
  for (std::uint64_t r = 0; r < 500; ++r) {
    const Dataset d = simulated(ModelKind::OLS, 0.0, 0.0, w, 5000 + r);
    if (morans_i_residuals(fit_ols(d), w, 199, r).p_value < 0.05) ++rejections;
  }
  const double rate = rejections / 500.0;
  MESSAGE("residual Moran rejection rate " << rate);
  CHECK(std::abs(rate - 0.05) <= 0.02);
}

TEST_CASE("constant residuals raise ZeroVariance") {
  Dataset d;
  d.x = Eigen::MatrixXd(5, 1);
  d.x << 1, 2, 3, 4, 5;
  d.y = 2.0 + 3.0 * d.x.col(0).array();
  d.covariate_names = {"x"};
  d.ids = fixture::worked_ids();
  const FitResult fit = fit_ols(d);
  CHECK_ERROR_CODE(morans_i_residuals(fit, fixture::worked_w(), 9, 0), ErrorCode::ZeroVariance);
}

TEST_CASE("LM statistics match a dense evaluation of the standard forms") {
  const SpatialWeights w = row_normalize(rook_lattice(8, 8));
  for (std::uint64_t s = 0; s < 4; ++s) {
    const Dataset d = simulated(ModelKind::SAR, 0.3 * static_cast<double>(s) - 0.3, 0.0, w, 70 + s);
    const LmTestResult lm = lm_tests(fit_ols(d), w);
    const DenseLm ref = dense_lm(w.dense(), d.y, d.x);
    CHECK(lm.lm_lag.statistic == doctest::Approx(ref.lm_lag).epsilon(1e-9));
    CHECK(lm.lm_err.statistic == doctest::Approx(ref.lm_err).epsilon(1e-9));
    CHECK(lm.robust_lm_lag.statistic == doctest::Approx(std::max(0.0, ref.rlm_lag)).epsilon(1e-9));
    CHECK(lm.robust_lm_err.statistic == doctest::Approx(std::max(0.0, ref.rlm_err)).epsilon(1e-9));
    CHECK(lm.lm_lag.p_value == doctest::Approx(std::erfc(std::sqrt(ref.lm_lag / 2.0))).epsilon(1e-9));
  }
}

TEST_CASE("robust LM separates lag from error dependence") {
  const SpatialWeights w = row_normalize(rook_lattice(20, 20));
  int lag = 0, err = 0;
  for (std::uint64_t r = 0; r < 100; ++r) {
    const LmTestResult lm = lm_tests(fit_ols(simulated(ModelKind::SAR, 0.5, 0.0, w, 2000 + r)), w);
    if (lm.robust_lm_lag.p_value < 0.05) ++lag;
    if (lm.robust_lm_err.p_value < 0.05) ++err;
  }
  MESSAGE("robust LM-lag " << lag << "/100, robust LM-error " << err << "/100");
  CHECK(lag >= 90);
  CHECK(err <= 20);
}

TEST_CASE("LM null calibration") {
  const SpatialWeights w = row_normalize(rook_lattice(10, 10));
  int counts[4] = {0, 0, 0, 0};
  for (std::uint64_t r = 0; r < 500; ++r) {
    const LmTestResult lm = lm_tests(fit_ols(simulated(ModelKind::OLS, 0.0, 0.0, w, 9000 + r)), w);
    const LmStatistic* all[4] = {&lm.lm_lag, &lm.lm_err, &lm.robust_lm_lag, &lm.robust_lm_err};
    for (int i = 0; i < 4; ++i) {
      CHECK(all[i]->statistic >= 0.0);
      if (all[i]->p_value < 0.05) ++counts[i];
    }
  }
  for (int i = 0; i < 4; ++i) {
    MESSAGE("LM test " << i << " rejection rate " << counts[i] / 500.0);
    CHECK(std::abs(counts[i] / 500.0 - 0.05) <= 0.03);
  }
}

TEST_CASE("LM errors") {
  const SpatialWeights w = row_normalize(rook_lattice(6, 6));
  const Dataset d = simulated(ModelKind::SAR, 0.3, 0.0, w, 1);
  CHECK_ERROR_CODE(lm_tests(fit_sar(d, w), w), ErrorCode::WrongModel);
  std::vector<std::string> ids = w.ids();
  const SpatialWeights empty = from_edge_list(std::vector<Edge>{}, false, ids);
  CHECK_ERROR_CODE(lm_tests(fit_ols(d), empty), ErrorCode::NoConnectivity);
}
