#include "spatialecon/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <queue>
#include <vector>

namespace spatialecon {

std::optional<Eigen::VectorXd> symmetrizing_scale(const SpatialWeights& w, double tol) {
  const auto n = static_cast<Eigen::Index>(w.size());
  const auto& m = w.matrix();
  const SpatialWeights::SparseMatrix t = m.transpose();

  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  std::queue<Eigen::Index> pending;
  for (Eigen::Index root = 0; root < n; ++root) {
    if (r[root] != 0.0) continue;
    r[root] = 1.0;
    pending.push(root);
    while (!pending.empty()) {
      const Eigen::Index i = pending.front();
      pending.pop();
      for (SpatialWeights::SparseMatrix::InnerIterator it(m, i); it; ++it) {
        const Eigen::Index j = it.col();
        const double back = t.coeff(i, j);  // w_ji
        if (back <= 0.0) return std::nullopt;
        if (r[j] == 0.0) {
          r[j] = r[i] * it.value() / back;
          pending.push(j);
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SpatialWeights::SparseMatrix::InnerIterator it(m, i); it; ++it) {
      const double lhs = r[i] * it.value();
      const double rhs = r[it.col()] * t.coeff(i, it.col());
      if (std::abs(lhs - rhs) > tol * std::max(std::abs(lhs), std::abs(rhs))) {
        return std::nullopt;
      }
    }
  }
  return r;
}

std::optional<Spectrum> Spectrum::compute(const SpatialWeights& w, bool with_vectors) {
  Spectrum s;
  const auto n = static_cast<Eigen::Index>(w.size());
  if (n == 0) return s;

  if (auto scale = symmetrizing_scale(w)) {
    const Eigen::VectorXd root = scale->cwiseSqrt();
    const Eigen::VectorXd inv_root = root.cwiseInverse();
    Eigen::MatrixXd sym = root.asDiagonal() * w.dense() * inv_root.asDiagonal();
    sym = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        sym, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) return std::nullopt;
    s.eigenvalues_ = solver.eigenvalues().cast<std::complex<double>>();
    if (with_vectors) {
      const Eigen::MatrixXd& q = solver.eigenvectors();
      const Eigen::VectorXd left = q.transpose() * inv_root;
      const Eigen::VectorXd right = q.transpose() * root;
      s.unit_weights_ = left.cwiseProduct(right).cast<std::complex<double>>();
    }
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(w.dense(), with_vectors);
    if (solver.info() != Eigen::Success) return std::nullopt;
    s.eigenvalues_ = solver.eigenvalues();
    if (with_vectors) {
      const Eigen::MatrixXcd v = solver.eigenvectors();
      const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
      const Eigen::VectorXcd left = v.transpose() * ones;
      const Eigen::VectorXcd right = v.partialPivLu().solve(ones);
      s.unit_weights_ = left.cwiseProduct(right);
    }
  }

  bool first = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ev = s.eigenvalues_[i];
    if (std::abs(ev.imag()) > 1e-10 * std::max(1.0, std::abs(ev))) {
      s.real_ = false;
      continue;
    }
    if (first) {
      s.min_real_ = s.max_real_ = ev.real();
      first = false;
    } else {
      s.min_real_ = std::min(s.min_real_, ev.real());
      s.max_real_ = std::max(s.max_real_, ev.real());
    }
  }
  return s;
}

}  // namespace spatialecon
