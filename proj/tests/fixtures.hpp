#pragma once

#include "spatialecon/weights.hpp"

#include <Eigen/Dense>

#include <random>
#include <string>
#include <vector>

namespace fixture {

using spatialecon::Edge;
using spatialecon::SpatialWeights;

inline std::vector<std::string> worked_ids() { return {"1", "2", "3", "4", "5"}; }

/// Binary contiguity of the five-unit worked example.
inline SpatialWeights worked_raw() {
  const std::vector<Edge> edges = {{"1", "2", {}}, {"1", "4", {}}, {"2", "3", {}},
                                   {"2", "5", {}}, {"3", "4", {}}, {"4", "5", {}}};
  return spatialecon::from_edge_list(edges, true, worked_ids());
}

inline SpatialWeights worked_w() { return spatialecon::row_normalize(worked_raw()); }

inline Eigen::MatrixXd worked_dense_raw() {
  Eigen::MatrixXd m(5, 5);
  m << 0, 1, 0, 1, 0,
       1, 0, 1, 0, 1,
       0, 1, 0, 1, 0,
       1, 0, 1, 0, 1,
       0, 1, 0, 1, 0;
  return m;
}

/// Printed multiplier (I - 0.6 W)^-1 of the worked example.
inline Eigen::MatrixXd worked_multiplier() {
  Eigen::MatrixXd s(5, 5);
  s << 1.1875, 0.46875, 0.1875, 0.46875, 0.1875,
       0.3125, 1.28125, 0.3125, 0.28125, 0.3125,
       0.1875, 0.46875, 1.1875, 0.46875, 0.1875,
       0.3125, 0.28125, 0.3125, 1.28125, 0.3125,
       0.1875, 0.46875, 0.1875, 0.46875, 1.1875;
  return s;
}

/// Random sparse nonnegative weights with optional islands, as raw W.
inline SpatialWeights random_weights(std::size_t n, double density, std::uint64_t seed,
                                     bool allow_islands = false) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<spatialecon::WeightEntry> entries;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("u" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) {
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && u(gen) < density) {
        entries.push_back({i, j, 0.5 + u(gen)});
        any = true;
      }
    }
    if (!any && !allow_islands) entries.push_back({i, (i + 1) % n, 1.0});
  }
  return SpatialWeights(ids, entries);
}

/// Dense oracle for ln|det(I - rho W)|.
inline double dense_log_det(double rho, const Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - rho * w;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd& m = lu.matrixLU();
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) s += std::log(std::abs(m(i, i)));
  return s;
}

}  // namespace fixture

#include "spatialecon/error.hpp"

/// Checks that `expr` throws spatialecon::Error with the given code.
#define CHECK_ERROR_CODE(expr, expected_code)                                  \
  do {                                                                         \
    bool thrown_ = false;                                                      \
    try {                                                                      \
      (void)(expr);                                                            \
    } catch (const spatialecon::Error& e_) {                                   \
      thrown_ = true;                                                          \
      CHECK_MESSAGE(e_.code() == (expected_code), e_.what());                  \
    }                                                                          \
    CHECK_MESSAGE(thrown_, "expected " #expected_code " from " #expr);          \
  } while (0)
