#include "spatialecon/weights.hpp"

#include "spatialecon/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

namespace spatialecon {

std::string_view to_string(Normalization n) {
  switch (n) {
    case Normalization::raw: return "raw";
    case Normalization::row: return "row";
    case Normalization::eigen: return "eigen";
  }
  return "raw";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "raw" || text == "none") return Normalization::raw;
  if (text == "row") return Normalization::row;
  if (text == "eigen") return Normalization::eigen;
  throw Error(ErrorCode::ConfigError,
              "unknown normalization '" + std::string(text) + "'");
}

SpatialWeights::SpatialWeights(std::vector<std::string> ids,
                               std::vector<WeightEntry> entries,
                               Normalization normalization)
    : ids_(std::move(ids)), normalization_(normalization) {
  const std::size_t n = ids_.size();
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(ids_[i], i).second) {
      throw Error(ErrorCode::InvalidArgument, "repeated unit id '" + ids_[i] + "'");
    }
  }

  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(entries.size());
  for (std::size_t e = 0; e < entries.size(); ++e) {
    const auto& entry = entries[e];
    if (entry.row >= n || entry.col >= n) {
      throw Error(ErrorCode::InvalidArgument, "weight index out of range");
    }
    if (!std::isfinite(entry.weight) || entry.weight <= 0.0) {
      throw Error(ErrorCode::InvalidWeight,
                  "weights must be finite and strictly positive (unit " +
                      ids_[entry.row] + " -> " + ids_[entry.col] + ")");
    }
    if (entry.row == entry.col) {
      throw Error(ErrorCode::InvalidWeight,
                  "unit '" + ids_[entry.row] + "' cannot neighbour itself");
    }
    if (e > 0 && entries[e - 1].row == entry.row && entries[e - 1].col == entry.col) {
      throw Error(ErrorCode::DuplicateEdge,
                  "duplicate pair " + ids_[entry.row] + " -> " + ids_[entry.col]);
    }
    triplets.emplace_back(static_cast<int>(entry.row), static_cast<int>(entry.col),
                          entry.weight);
  }
  matrix_.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
}

std::optional<std::size_t> SpatialWeights::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<WeightEntry> SpatialWeights::entries() const {
  std::vector<WeightEntry> out;
  out.reserve(nonzeros());
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) {
      out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(it.col()),
                     it.value()});
    }
  }
  return out;
}

double SpatialWeights::total_weight() const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < matrix_.nonZeros(); ++k) s += matrix_.valuePtr()[k];
  return s;
}

Eigen::VectorXd SpatialWeights::row_sums() const {
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it) sums[r] += it.value();
  }
  return sums;
}

bool SpatialWeights::is_symmetric(double tol) const {
  const SparseMatrix t = matrix_.transpose();
  return (matrix_ - t).norm() <= tol * std::max(1.0, matrix_.norm());
}

SpatialWeights SpatialWeights::relabeled(Normalization normalization) const {
  SpatialWeights copy = *this;
  copy.normalization_ = normalization;
  return copy;
}

namespace {

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
  return ids;
}

std::vector<std::string> resolve_ids(std::vector<std::string> ids, std::size_t n) {
  if (ids.empty()) return default_ids(n);
  if (ids.size() != n) {
    throw Error(ErrorCode::ShapeError, "id list length does not match coordinates");
  }
  return ids;
}

void check_coords(std::span<const Point> coords) {
  for (const auto& p : coords) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::InvalidArgument, "coordinates must be finite");
    }
  }
}

std::vector<WeightEntry> symmetrized(std::vector<WeightEntry> entries) {
  std::set<std::pair<std::size_t, std::size_t>> present;
  for (const auto& e : entries) present.emplace(e.row, e.col);
  const std::size_t original = entries.size();
  for (std::size_t k = 0; k < original; ++k) {
    const auto e = entries[k];
    if (present.emplace(e.col, e.row).second) {
      entries.push_back({e.col, e.row, e.weight});
    }
  }
  return entries;
}

SpatialWeights scaled(const SpatialWeights& w, const Eigen::VectorXd& row_scale,
                      Normalization label) {
  auto entries = w.entries();
  for (auto& e : entries) e.weight *= row_scale[static_cast<Eigen::Index>(e.row)];
  return SpatialWeights(w.ids(), std::move(entries), label);
}

}  // namespace

SpatialWeights from_index_edges(std::size_t n, std::span<const IndexEdge> edges,
                                bool symmetrize) {
  std::vector<WeightEntry> entries;
  entries.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.from >= n || e.to >= n) {
      throw Error(ErrorCode::UnknownId, "edge index out of range");
    }
    if (e.from == e.to) {
      if (e.weight != 0.0) {
        throw Error(ErrorCode::InvalidWeight, "self-loop with nonzero weight");
      }
      continue;
    }
    if (e.weight < 0.0 || !std::isfinite(e.weight)) {
      throw Error(ErrorCode::InvalidWeight, "edge weights must be finite and >= 0");
    }
    if (e.weight == 0.0) continue;
    entries.push_back({e.from, e.to, e.weight});
  }
  if (symmetrize) {
    // Duplicates must be detected before the mirror pass hides them.
    SpatialWeights check(default_ids(n), entries);
    entries = symmetrized(std::move(entries));
  }
  return SpatialWeights(default_ids(n), std::move(entries));
}

SpatialWeights from_edge_list(std::span<const Edge> edges, bool symmetrize,
                              std::vector<std::string> ids) {
  const bool fixed_ids = !ids.empty();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!index.emplace(ids[i], i).second) {
      throw Error(ErrorCode::InvalidArgument, "repeated unit id '" + ids[i] + "'");
    }
  }
  auto resolve = [&](const std::string& id) -> std::size_t {
    auto it = index.find(id);
    if (it != index.end()) return it->second;
    if (fixed_ids) throw Error(ErrorCode::UnknownId, "unknown unit id '" + id + "'");
    index.emplace(id, ids.size());
    ids.push_back(id);
    return ids.size() - 1;
  };

  std::vector<IndexEdge> indexed;
  indexed.reserve(edges.size());
  for (const auto& e : edges) {
    const std::size_t i = resolve(e.from);
    const std::size_t j = resolve(e.to);
    indexed.push_back({i, j, e.weight.value_or(1.0)});
  }
  SpatialWeights w = from_index_edges(ids.size(), indexed, symmetrize);
  return SpatialWeights(std::move(ids), w.entries());
}

SpatialWeights knn_weights(std::span<const Point> coords, std::size_t k,
                           std::vector<std::string> ids) {
  const std::size_t n = coords.size();
  if (k == 0 || k >= n) {
    throw Error(ErrorCode::InvalidK, "k must satisfy 0 < k < n (k=" +
                                         std::to_string(k) + ", n=" +
                                         std::to_string(n) + ")");
  }
  check_coords(coords);
  ids = resolve_ids(std::move(ids), n);

  std::vector<WeightEntry> entries;
  entries.reserve(n * k);
  std::vector<std::pair<double, std::size_t>> candidates;
  candidates.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = coords[i].x - coords[j].x;
      const double dy = coords[i].y - coords[j].y;
      candidates.emplace_back(dx * dx + dy * dy, j);
    }
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<long>(k),
                      candidates.end());
    for (std::size_t m = 0; m < k; ++m) entries.push_back({i, candidates[m].second, 1.0});
  }
  return SpatialWeights(std::move(ids), std::move(entries));
}

SpatialWeights inverse_distance_weights(std::span<const Point> coords, double alpha,
                                        double cutoff, std::vector<std::string> ids) {
  if (!(alpha > 0.0) || !(cutoff > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "alpha and cutoff must be positive");
  }
  check_coords(coords);
  const std::size_t n = coords.size();
  ids = resolve_ids(std::move(ids), n);

  std::vector<WeightEntry> entries;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = std::hypot(coords[i].x - coords[j].x, coords[i].y - coords[j].y);
      if (d == 0.0) {
        throw Error(ErrorCode::ZeroDistance,
                    "units '" + ids[i] + "' and '" + ids[j] + "' coincide");
      }
      if (d <= cutoff) entries.push_back({i, j, std::pow(d, -alpha)});
    }
  }
  return SpatialWeights(std::move(ids), std::move(entries));
}

SpatialWeights rook_lattice(std::size_t rows, std::size_t cols) {
  std::vector<IndexEdge> edges;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t u = r * cols + c;
      if (c + 1 < cols) edges.push_back({u, u + 1, 1.0});
      if (r + 1 < rows) edges.push_back({u, u + cols, 1.0});
    }
  }
  return from_index_edges(rows * cols, edges, true);
}

SpatialWeights row_normalize(const SpatialWeights& w) {
  Eigen::VectorXd scale = w.row_sums();
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    scale[i] = scale[i] > 0.0 ? 1.0 / scale[i] : 0.0;
  }
  return scaled(w, scale, Normalization::row);
}

SpatialWeights eigen_normalize(const SpatialWeights& w) {
  if (w.nonzeros() == 0) {
    throw Error(ErrorCode::NoConnectivity, "weights matrix has no nonzero entry");
  }
  const double radius = spectral_radius(w);
  if (!(radius > 0.0)) {
    // Nilpotent patterns (e.g. a directed acyclic graph) have no scale.
    throw Error(ErrorCode::NoConnectivity, "weights matrix has zero spectral radius");
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(w.size()),
                                                    1.0 / radius);
  return scaled(w, scale, Normalization::eigen);
}

SpatialWeights normalize(const SpatialWeights& w, Normalization target) {
  switch (target) {
    case Normalization::raw: return w;
    case Normalization::row: return row_normalize(w);
    case Normalization::eigen: return eigen_normalize(w);
  }
  return w;
}

namespace {

double dense_spectral_radius(const SpatialWeights& w) {
  const Eigen::MatrixXd a = w.dense();
  if (w.is_symmetric()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::InvalidArgument, "dense eigensolver failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

struct PowerResult {
  double estimate = 0.0;
  bool converged = false;
};

PowerResult power_spectral_radius(const SpatialWeights& w, double tol,
                                  std::size_t max_iter) {
  const auto n = static_cast<Eigen::Index>(w.size());
  const auto& a = w.matrix();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  PowerResult result;
  for (std::size_t it = 0; it < max_iter; ++it) {
    Eigen::VectorXd y = a * x + x;  // shift by I, keeps every entry positive
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double ratio = y[i] / x[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    lo -= 1.0;
    hi -= 1.0;
    result.estimate = 0.5 * (lo + hi);
    if (hi - lo <= tol * std::max(hi, 1e-300)) {
      result.converged = true;
      return result;
    }
    const double norm = y.maxCoeff();
    if (!(norm > 0.0) || !std::isfinite(norm)) break;
    x = y / norm;
    // Underflowing components would stop the bracket from closing.
    if (x.minCoeff() < 1e-250) break;
  }
  return result;
}

}  // namespace

double spectral_radius(const SpatialWeights& w, SpectralMethod method, double tol) {
  if (w.size() == 0 || w.nonzeros() == 0) return 0.0;
  if (method == SpectralMethod::dense) return dense_spectral_radius(w);

  // An empty row i contributes the eigenvalue 0 and the rest of the spectrum
  // is that of the matrix with row and column i deleted.
  SpatialWeights reduced = w;
  while (!detect_islands(reduced).empty()) {
    reduced = drop_islands(reduced);
    if (reduced.nonzeros() == 0) return 0.0;
  }
  const PowerResult power = power_spectral_radius(reduced, tol, 20000);
  if (power.converged || method == SpectralMethod::power) return power.estimate;
  if (reduced.size() <= 500) return dense_spectral_radius(reduced);
  return power.estimate;
}

Eigen::MatrixXd spatial_lag(const SpatialWeights& w, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.rows()) != w.size()) {
    throw Error(ErrorCode::ShapeError, "spatial_lag: X has " + std::to_string(x.rows()) +
                                           " rows, W has " + std::to_string(w.size()));
  }
  return w.matrix() * x;
}

Eigen::VectorXd spatial_lag(const SpatialWeights& w, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != w.size()) {
    throw Error(ErrorCode::ShapeError, "spatial_lag: vector length does not match W");
  }
  return w.matrix() * x;
}

IslandReport detect_islands(const SpatialWeights& w) {
  IslandReport report;
  const auto& m = w.matrix();
  for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
    bool any = false;
    for (SpatialWeights::SparseMatrix::InnerIterator it(m, r); it; ++it) {
      if (it.value() != 0.0) {
        any = true;
        break;
      }
    }
    if (!any) report.island_indices.push_back(static_cast<std::size_t>(r));
  }
  return report;
}

SpatialWeights drop_islands(const SpatialWeights& w, std::vector<std::size_t>* kept) {
  const auto report = detect_islands(w);
  std::vector<long> remap(w.size(), -1);
  std::vector<std::string> ids;
  std::vector<std::size_t> keep;
  std::size_t next = 0;
  std::size_t island = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (island < report.island_indices.size() && report.island_indices[island] == i) {
      ++island;
      continue;
    }
    remap[i] = static_cast<long>(next++);
    ids.push_back(w.ids()[i]);
    keep.push_back(i);
  }
  std::vector<WeightEntry> entries;
  for (const auto& e : w.entries()) {
    if (remap[e.row] < 0 || remap[e.col] < 0) continue;
    entries.push_back({static_cast<std::size_t>(remap[e.row]),
                       static_cast<std::size_t>(remap[e.col]), e.weight});
  }
  if (kept) *kept = keep;
  // Removing columns breaks row sums, so the result is labelled raw.
  return SpatialWeights(std::move(ids), std::move(entries), Normalization::raw);
}

Normalization detect_normalization(const SpatialWeights& w) {
  if (w.nonzeros() == 0) return Normalization::raw;
  const Eigen::VectorXd sums = w.row_sums();
  bool row = true;
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (sums[i] != 0.0 && std::abs(sums[i] - 1.0) > 1e-12) {
      row = false;
      break;
    }
  }
  if (row) return Normalization::row;
  if (std::abs(spectral_radius(w) - 1.0) <= 1e-9) return Normalization::eigen;
  return Normalization::raw;
}

}  // namespace spatialecon
