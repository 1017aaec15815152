// Acceptance suite: one PASS/FAIL line per criterion.

#include "fixtures.hpp"

#include "spatialecon/diagnostics.hpp"
#include "spatialecon/estimators.hpp"
#include "spatialecon/impacts.hpp"
#include "spatialecon/io.hpp"
#include "spatialecon/rng.hpp"
#include "spatialecon/simulate.hpp"
#include "spatialecon/weights.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

using namespace spatialecon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

const SpatialWeights& lattice20() {
  static const SpatialWeights w = row_normalize(rook_lattice(20, 20));
  return w;
}

// 1. Worked example: row normalization, multiplier, partial effects.
Outcome worked_example() {
  Outcome o;
  const SpatialWeights w = row_normalize(fixture::worked_raw());
  Eigen::MatrixXd expected_w(5, 5);
  const double h = 0.5, t = 1.0 / 3.0;
  expected_w << 0, h, 0, h, 0,
                t, 0, t, 0, t,
                0, h, 0, h, 0,
                t, 0, t, 0, t,
                0, h, 0, h, 0;
  o.require((w.dense() - expected_w).cwiseAbs().maxCoeff() <= 1e-15, "row-normalized W differs");

  // The printed (I - rho W) intermediate shows "+0.3" in row 3, a sign typo;
  // the printed inverse is the reference.
  const Eigen::MatrixXd s = multiplier_matrix(0.6, w).matrix;
  const double err = (s - fixture::worked_multiplier()).cwiseAbs().maxCoeff();
  o.require(err <= 1e-6, "multiplier max error " + num(err));

  FitResult fit;
  fit.spec.kind = ModelKind::SAR;
  fit.n = 5;
  fit.k = 1;
  fit.beta = Eigen::VectorXd::Constant(1, 0.1);
  fit.rho = 0.6;
  const Eigen::MatrixXd omega = partial_effects(fit, w, 0);
  const double oerr = (omega - 0.1 * fixture::worked_multiplier()).cwiseAbs().maxCoeff();
  o.require(oerr <= 1e-7, "Omega max error " + num(oerr));
  o.require(std::abs(omega(2, 0) - 0.01875) <= 1e-9, "m31 = " + num(omega(2, 0)));
  if (o.pass) o.detail = "multiplier max error " + num(err);
  return o;
}

// 2. Local spillovers: WX.
Outcome local_spillovers() {
  Outcome o;
  Eigen::MatrixXd x(5, 2);
  x << 3, 120, 4, 140, 1, 200, 8, 70, 5, 250;
  Eigen::MatrixXd expected(5, 2);
  expected << 6, 105, 3, 190, 6, 105, 3, 190, 6, 105;
  const Eigen::MatrixXd wx = spatial_lag(fixture::worked_w(), x);
  const double err = (wx - expected).cwiseAbs().maxCoeff();
  o.require(err <= 1e-12, "WX max error " + num(err));
  if (o.pass) o.detail = "WX max error " + num(err);
  return o;
}

// 3. Moran extremes and null calibration.
Outcome moran() {
  Outcome o;
  Eigen::VectorXd y(5);
  y << 0, 1, 0, 1, 0;
  const double i = morans_i(fixture::worked_w(), y, 99, 1).statistic;
  o.require(std::abs(i + 1.0) <= 1e-12, "checkerboard I = " + num(i));

  const SpatialWeights w = row_normalize(rook_lattice(10, 10));
  int rejections = 0;
  for (std::uint64_t r = 0; r < 500; ++r) {
    Rng rng = make_stream(2024, "acceptance.moran_null", r);
    Eigen::VectorXd z(100);
    for (Eigen::Index k = 0; k < 100; ++k) z[k] = standard_normal(rng);
    if (morans_i(w, z, 199, r).p_value < 0.05) ++rejections;
  }
  const double rate = rejections / 500.0;
  o.require(std::abs(rate - 0.05) <= 0.02, "null rejection rate " + num(rate));
  if (o.pass) o.detail = "checkerboard I = " + num(i) + ", null rejection rate " + num(rate);
  return o;
}

// 4. Log-determinant oracle.
Outcome log_det_oracle() {
  Outcome o;
  const double worked = log_det(0.6, fixture::worked_w());
  o.require(std::abs(worked - (std::log(0.4) + std::log(1.6))) <= 1e-8,
            "worked log-det " + num(worked));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SpatialWeights raw = fixture::random_weights(100, 0.03 + 0.005 * static_cast<double>(s), 900 + s);
    const SpatialWeights w = s % 2 == 0 ? row_normalize(raw) : eigen_normalize(raw);
    const LogDeterminant ld(w);
    o.require(ld.uses_eigenvalues(), "eigenvalue path not used for pair " + std::to_string(s));
    const double rho = u(gen);
    worst = std::max(worst, std::abs(ld(rho) - fixture::dense_log_det(rho, w.dense())));
  }
  o.require(worst <= 1e-8, "max deviation " + num(worst));
  if (o.pass) o.detail = "max deviation " + num(worst);
  return o;
}

// 5. Parameter recovery.
struct RecoveryCase {
  ModelKind kind;
  double rho = 0.0;
  double lambda = 0.0;
  double theta = 0.0;
};

Outcome recovery() {
  Outcome o;
  const SpatialWeights& w = lattice20();
  FitOptions opts;
  opts.log_det = std::make_shared<const LogDeterminant>(w);
  const RecoveryCase cases[] = {{ModelKind::SAR, 0.5, 0.0, 0.0},
                                {ModelKind::SEM, 0.0, 0.8, 0.0},
                                {ModelKind::SLX, 0.0, 0.0, 0.3},
                                {ModelKind::SDM, 0.4, 0.0, 0.5},
                                {ModelKind::SDEM, 0.0, 0.5, 0.5}};
  std::ostringstream summary;
  for (const auto& c : cases) {
    DgpSpec spec;
    spec.kind = c.kind;
    spec.rho = c.rho;
    spec.lambda = c.lambda;
    spec.beta = Eigen::Vector2d(1.0, -1.0);
    if (has_theta(c.kind)) spec.theta = Eigen::Vector2d::Constant(c.theta);
    spec.seed = 5000 + static_cast<std::uint64_t>(c.kind);

    std::vector<std::string> names;
    Eigen::VectorXd truth;
    Eigen::VectorXd sum;
    Eigen::VectorXi covered;
    for (std::size_t r = 0; r < 100; ++r) {
      const Dataset d = generate(replicate(spec, r), w);
      const FitResult f = fit_model(d, w, ModelSpec{c.kind}, opts);
      const Eigen::VectorXd est = f.estimates();
      const Eigen::VectorXd se = f.std_errors();
      if (r == 0) {
        // Truth for every parameter except the intercept and sigma2.
        for (std::size_t p = 1; p + 1 < f.parameter_names.size(); ++p) {
          names.push_back(f.parameter_names[p]);
        }
        truth.resize(static_cast<Eigen::Index>(names.size()));
        Eigen::Index at = 0;
        for (Eigen::Index j = 0; j < 2; ++j) truth[at++] = spec.beta[j];
        for (Eigen::Index j = 0; j < spec.theta.size(); ++j) truth[at++] = spec.theta[j];
        if (has_rho(c.kind)) truth[at++] = c.rho;
        if (has_lambda(c.kind)) truth[at++] = c.lambda;
        sum = Eigen::VectorXd::Zero(truth.size());
        covered = Eigen::VectorXi::Zero(truth.size());
      }
      for (Eigen::Index p = 0; p < truth.size(); ++p) {
        const double e = est[p + 1], s = se[p + 1];
        sum[p] += e;
        if (std::abs(e - truth[p]) <= 1.959963984540054 * s) ++covered[p];
      }
    }
    summary << to_string(c.kind) << "[";
    for (Eigen::Index p = 0; p < truth.size(); ++p) {
      const double mean = sum[p] / 100.0;
      const std::string label = std::string(to_string(c.kind)) + " " + names[static_cast<std::size_t>(p)];
      o.require(std::abs(mean - truth[p]) <= 0.07,
                label + " mean " + num(mean) + " vs " + num(truth[p]));
      o.require(covered[p] >= 88, label + " coverage " + std::to_string(covered[p]) + "/100");
      summary << (p ? " " : "") << names[static_cast<std::size_t>(p)] << "=" << num(mean) << "/"
              << covered[p];
    }
    summary << "] ";
  }
  if (o.pass) o.detail = summary.str();
  return o;
}

// 6. Common-ratio restriction in SAR.
Outcome common_ratio() {
  Outcome o;
  const SpatialWeights w = row_normalize(fixture::random_weights(150, 0.04, 17));
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    DgpSpec spec;
    spec.kind = ModelKind::SAR;
    spec.rho = 0.1 * static_cast<double>(s) - 0.3;
    spec.beta = Eigen::Vector3d(1.0, -2.0, 0.5);
    spec.seed = 70 + s;
    const FitResult f = fit_sar(generate(spec, w), w);
    const ImpactsSummary sum = impacts_summary(f, w);
    const double ratio = sum.covariates[0].indirect / sum.covariates[0].direct;
    for (const auto& c : sum.covariates) worst = std::max(worst, std::abs(c.indirect / c.direct - ratio));
  }
  o.require(worst <= 1e-10, "ratio spread " + num(worst));
  if (o.pass) o.detail = "max ratio spread " + num(worst);
  return o;
}

// 7. OLS bias demonstration.
Outcome ols_bias() {
  Outcome o;
  const SpatialWeights& w = lattice20();
  DgpSpec spec;
  spec.kind = ModelKind::SAR;
  spec.rho = 0.5;
  spec.beta = Eigen::VectorXd::Ones(1);
  spec.seed = 7000;
  const BiasReport ols = ols_bias_experiment(spec, w, 500);
  o.require(ols.sign_agreement[0], "OLS bias sign disagrees with rho * Cov(x, Wy)");
  o.require(std::abs(ols.mean_bias[0]) > 2.0 * ols.mc_se[0],
            "OLS |bias| " + num(ols.mean_bias[0]) + " within 2 MC SE " + num(ols.mc_se[0]));

  FitOptions opts;
  opts.log_det = std::make_shared<const LogDeterminant>(w);
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t r = 0; r < 500; ++r) {
    const double b = fit_sar(generate(replicate(spec, r), w), w, opts).beta[0];
    sum += b;
    sumsq += b * b;
  }
  const double mean = sum / 500.0;
  const double sd = std::sqrt((sumsq - 500.0 * mean * mean) / 499.0);
  const double mcse = sd / std::sqrt(500.0);
  const double bias = mean - 1.0;
  o.require(std::abs(bias) <= 2.0 * mcse, "SAR bias " + num(bias) + " exceeds 2 MC SE " + num(mcse));
  if (o.pass) {
    o.detail = "OLS bias " + num(ols.mean_bias[0]) + " (MC SE " + num(ols.mc_se[0]) +
               "), SAR bias " + num(bias) + " (MC SE " + num(mcse) + ")";
  }
  return o;
}

// 8. Nesting and degeneracy.
Outcome nesting() {
  Outcome o;
  const SpatialWeights& w = lattice20();
  DgpSpec spec;
  spec.kind = ModelKind::SAR;
  spec.rho = 0.4;
  spec.beta = Eigen::Vector2d(1.0, -1.0);
  spec.seed = 8;
  const Dataset d = generate(spec, w);
  FitOptions fixed;
  fixed.lower = 0.0;
  fixed.upper = 0.0;
  const FitResult ols = fit_ols(d);
  for (const FitResult& f : {fit_sar(d, w, fixed), fit_sem(d, w, fixed)}) {
    const double dev = std::max(std::abs(f.alpha - ols.alpha), (f.beta - ols.beta).cwiseAbs().maxCoeff());
    o.require(dev <= 1e-8, std::string(to_string(f.spec.kind)) + " at 0 deviates " + num(dev));
  }

  const FitResult sem = fit_sem(d, w);
  for (const auto& c : impacts_summary(sem, w).covariates) {
    o.require(c.indirect == 0.0, "SEM indirect " + num(c.indirect));
  }
  for (const auto& c : impacts_inference(sem, w, 200, 1).covariates) {
    o.require(c.indirect_draws->mean == 0.0 && c.indirect_draws->sd == 0.0, "SEM indirect draws nonzero");
  }

  const FitResult sar = fit_sar(d, w);
  const ImpactsSummary s = impacts_summary(sar, w);
  double worst = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const double b = sar.beta[static_cast<Eigen::Index>(k)];
    worst = std::max(worst, std::abs(s.covariates[k].total - b / (1.0 - *sar.rho)));
  }
  o.require(worst <= 1e-9, "SAR total deviates " + num(worst));
  if (o.pass) o.detail = "SAR total identity deviation " + num(worst);
  return o;
}

// 9. CLI determinism.
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const std::string bin = SPATIALECON_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "spatialecon_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string() + "/";

  {
    std::ofstream(d + "edges.csv") << "src,dst\n1,2\n1,4\n2,3\n2,5\n3,4\n4,5\n";
  }
  // One run writes to its own directory; each command's stdout is captured.
  const std::vector<std::string> commands = {
      "simulate --model sar --rho 0.5 --beta 1,-1 --lattice 12x12 --seed 9 --out {d}data.csv "
      "--weights-out {d}w.csv --manifest {d}manifest.json",
      "weights --edges " + d + "edges.csv --symmetrize --normalize row",
      "fit --model all --data {d}data.csv --outcome y --covariates x1,x2 --weights {d}w.csv "
      "--out {d}fit.json",
      "diagnose --data {d}data.csv --outcome y --covariates x1,x2 --weights {d}w.csv --lm "
      "--permutations 499 --seed 3",
      "diagnose --data {d}data.csv --variable y --weights {d}w.csv --permutations 999 --seed 4 "
      "--format text",
      "impacts --fit {d}fit.json --weights {d}w.csv --draws 1000 --seed 7",
      "impacts --fit {d}fit.json --weights {d}w.csv --draws 500 --seed 7 --format text",
  };
  const std::vector<std::string> files = {"data.csv", "w.csv", "manifest.json", "fit.json"};

  auto run_all = [&](const std::string& tag, const std::string& threads) {
    const fs::path sub = dir / tag;
    fs::create_directories(sub);
    std::vector<std::string> outputs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
      std::string cmd = commands[i];
      for (std::size_t at; (at = cmd.find("{d}")) != std::string::npos;) {
        cmd.replace(at, 3, sub.string() + "/");
      }
      const fs::path out = sub / ("stdout_" + std::to_string(i));
      const std::string line = "SPATIALECON_THREADS=" + threads + " " + bin + " " + cmd + " > " +
                               out.string() + " 2>&1";
      const int status = std::system(line.c_str());
      o.require(status == 0, "command failed: " + cmd);
      outputs.push_back(slurp(out));
    }
    for (const auto& f : files) outputs.push_back(slurp(sub / f));
    return outputs;
  };

  const auto a = run_all("run1_t1", "1");
  const auto b = run_all("run2_t1", "1");
  const auto c = run_all("run3_t8", "8");
  std::size_t compared = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    // Paths inside outputs differ by run directory; normalize them.
    auto strip = [&](std::string s, const std::string& tag) {
      const std::string p = (dir / tag).string() + "/";
      for (std::size_t at; (at = s.find(p)) != std::string::npos;) s.replace(at, p.size(), "");
      return s;
    };
    const std::string x = strip(a[i], "run1_t1");
    const std::string y = strip(b[i], "run2_t1");
    const std::string z = strip(c[i], "run3_t8");
    if (i >= commands.size()) o.require(!x.empty(), "empty file " + files[i - commands.size()]);
    o.require(x == y, "output " + std::to_string(i) + " differs between runs");
    o.require(x == z, "output " + std::to_string(i) + " differs between 1 and 8 threads");
    ++compared;
  }
  if (o.pass) o.detail = std::to_string(compared) + " outputs byte-identical across 3 runs";
  return o;
}

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;  // 0 when no runtime bound applies
  std::function<Outcome()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked-example exactness", 1.0, worked_example},
      {2, "local-spillover exactness", 1.0, local_spillovers},
      {3, "Moran extremes and null calibration", 30.0, moran},
      {4, "log-determinant oracle", 10.0, log_det_oracle},
      {5, "parameter recovery", 300.0, recovery},
      {6, "common-ratio restriction", 0.0, common_ratio},
      {7, "OLS bias demonstration", 0.0, ols_bias},
      {8, "nesting and degeneracy", 0.0, nesting},
      {9, "CLI determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0.0 && secs >= c.limit_seconds) {
      o.require(false, "runtime " + num(secs) + " s exceeds " + num(c.limit_seconds) + " s");
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", "
              << num(secs) << " s): " << o.detail << std::endl;
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
