#include "spatialecon/simulate.hpp"

#include "spatialecon/error.hpp"
#include "spatialecon/rng.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace spatialecon {

void DgpSpec::validate() const {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorCode::InvalidArgument, "|rho| must be < 1");
  if (!(std::abs(lambda) < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "|lambda| must be < 1");
  }
  if (!(sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be >= 0");
  if (beta.size() == 0) throw Error(ErrorCode::InvalidArgument, "beta is empty");
  if (has_theta(kind) && theta.size() != beta.size()) {
    throw Error(ErrorCode::InvalidArgument, "theta must have one entry per covariate");
  }
}

namespace {

Eigen::VectorXd solve_multiplier(double rho, const SpatialWeights& w,
                                 const Eigen::VectorXd& rhs) {
  if (rho == 0.0) return rhs;
  const auto n = static_cast<Eigen::Index>(w.size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setIdentity();
  a -= rho * Eigen::SparseMatrix<double>(w.matrix());
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularMultiplier, "I - rho W could not be factorised");
  }
  Eigen::VectorXd out = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !out.allFinite()) {
    throw Error(ErrorCode::SingularMultiplier, "I - rho W is singular");
  }
  return out;
}

}  // namespace

SimulatedData generate_detailed(const DgpSpec& spec, const SpatialWeights& w) {
  spec.validate();
  const bool spatial = spec.kind != ModelKind::OLS;
  if (spatial && !w.is_normalized()) {
    throw Error(ErrorCode::RequiresNormalizedW, "DGPs need a normalized W");
  }
  const auto n = static_cast<Eigen::Index>(w.size());
  const auto k = spec.beta.size();

  SimulatedData out;
  Dataset& d = out.data;
  d.x.resize(n, k);
  Rng xr = make_stream(spec.seed, "simulate.x");
  // Row-major fill keeps a unit's covariates together in the stream.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) d.x(i, j) = standard_normal(xr);
  }
  Rng er = make_stream(spec.seed, "simulate.noise");
  out.noise.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.noise[i] = spec.sigma * standard_normal(er);

  Eigen::VectorXd mean = Eigen::VectorXd::Constant(n, spec.alpha) + d.x * spec.beta;
  if (has_theta(spec.kind)) mean += spatial_lag(w, d.x) * spec.theta;

  switch (spec.kind) {
    case ModelKind::OLS:
    case ModelKind::SLX: d.y = mean + out.noise; break;
    case ModelKind::SAR:
    case ModelKind::SDM: d.y = solve_multiplier(spec.rho, w, mean + out.noise); break;
    case ModelKind::SEM:
    case ModelKind::SDEM: d.y = mean + solve_multiplier(spec.lambda, w, out.noise); break;
  }

  d.outcome_name = "y";
  for (Eigen::Index j = 0; j < k; ++j) d.covariate_names.push_back("x" + std::to_string(j + 1));
  d.ids = w.ids();
  return out;
}

Dataset generate(const DgpSpec& spec, const SpatialWeights& w) {
  return generate_detailed(spec, w).data;
}

DgpSpec replicate(const DgpSpec& spec, std::size_t rep) {
  DgpSpec r = spec;
  r.seed = derive_seed(spec.seed, "simulate.replication", rep);
  return r;
}

BiasReport ols_bias_experiment(const DgpSpec& spec, const SpatialWeights& w,
                               std::size_t n_reps) {
  if (spec.kind != ModelKind::SAR) {
    throw Error(ErrorCode::WrongModel, "the OLS bias experiment uses a SAR DGP");
  }
  if (n_reps < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 replications");
  spec.validate();
  const auto k = spec.beta.size();
  Eigen::MatrixXd betas(static_cast<Eigen::Index>(n_reps), k);
  Eigen::MatrixXd covs(static_cast<Eigen::Index>(n_reps), k);

  parallel_for(n_reps, [&](std::size_t r) {
    const Dataset d = generate(replicate(spec, r), w);
    const FitResult fit = fit_ols(d);
    const Eigen::VectorXd wy = spatial_lag(w, d.y);
    const double n = static_cast<double>(d.n());
    const Eigen::VectorXd wyc = wy.array() - wy.mean();
    const auto row = static_cast<Eigen::Index>(r);
    for (Eigen::Index j = 0; j < k; ++j) {
      const Eigen::VectorXd xc = d.x.col(j).array() - d.x.col(j).mean();
      covs(row, j) = xc.dot(wyc) / (n - 1.0);
      betas(row, j) = fit.beta[j];
    }
  });

  BiasReport report;
  report.replications = n_reps;
  const double reps = static_cast<double>(n_reps);
  report.mean_beta = betas.colwise().mean().transpose();
  report.mean_bias = report.mean_beta - spec.beta;
  report.mc_se.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double var = (betas.col(j).array() - report.mean_beta[j]).square().sum() / (reps - 1.0);
    report.mc_se[j] = std::sqrt(var / reps);
  }
  report.mean_cov_x_wy = covs.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double driver = spec.rho * report.mean_cov_x_wy[j];
    report.sign_agreement.push_back((report.mean_bias[j] > 0.0) == (driver > 0.0) &&
                                    report.mean_bias[j] != 0.0 && driver != 0.0);
  }
  return report;
}

}  // namespace spatialecon
