#pragma once

#include "spatialecon/weights.hpp"

#include <Eigen/Dense>

#include <complex>
#include <optional>

namespace spatialecon {

/// Eigen-decomposition of a weights matrix, computed once and reused for
/// log-determinants and impact traces.
///
/// Matrices that are diagonally similar to a symmetric one (symmetric W,
/// and row-normalized symmetric W) are solved with the symmetric solver via
/// D^{1/2} W D^{-1/2}; everything else goes through the general solver and
/// may have complex conjugate pairs.
class Spectrum {
 public:
  /// Returns std::nullopt when the eigensolver fails. `with_vectors` also
  /// prepares the weights c with 1' f(W) 1 = sum_i c_i f(lambda_i).
  static std::optional<Spectrum> compute(const SpatialWeights& w, bool with_vectors);

  const Eigen::VectorXcd& eigenvalues() const { return eigenvalues_; }
  bool is_real() const { return real_; }
  bool has_vectors() const { return unit_weights_.size() > 0; }
  const Eigen::VectorXcd& unit_weights() const { return unit_weights_; }

  /// Smallest and largest real eigenvalue.
  double min_real() const { return min_real_; }
  double max_real() const { return max_real_; }

 private:
  Eigen::VectorXcd eigenvalues_;
  Eigen::VectorXcd unit_weights_;
  bool real_ = true;
  double min_real_ = 0.0;
  double max_real_ = 0.0;
};

/// If r_i w_ij = r_j w_ji holds for a positive vector r, returns r.
std::optional<Eigen::VectorXd> symmetrizing_scale(const SpatialWeights& w,
                                                  double tol = 1e-11);

}  // namespace spatialecon
