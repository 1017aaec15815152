#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace spatialecon {

enum class Normalization { raw, row, eigen };

std::string_view to_string(Normalization n);
Normalization parse_normalization(std::string_view text);

struct WeightEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double weight = 0.0;
};

/// Edge between two units named by opaque identifiers. A missing weight
/// means binary contiguity (1).
struct Edge {
  std::string from;
  std::string to;
  std::optional<double> weight;
};

struct IndexEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  double weight = 1.0;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Sparse N x N spatial weights matrix.
///
/// Entries are kept as sorted (row, col) triplets and compiled once into a
/// row-compressed matrix used for products. Off-diagonal weights are
/// strictly positive and the diagonal is empty. Instances are immutable
/// and can be shared across threads.
class SpatialWeights {
 public:
  using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SpatialWeights() = default;

  /// Validates and compiles the entries. Throws InvalidWeight for
  /// self-loops or non-positive weights, DuplicateEdge for repeated pairs,
  /// and InvalidArgument for out-of-range indices or repeated ids.
  SpatialWeights(std::vector<std::string> ids, std::vector<WeightEntry> entries,
                 Normalization normalization = Normalization::raw);

  std::size_t size() const { return ids_.size(); }
  std::size_t nonzeros() const { return static_cast<std::size_t>(matrix_.nonZeros()); }
  Normalization normalization() const { return normalization_; }
  bool is_normalized() const { return normalization_ != Normalization::raw; }

  const std::vector<std::string>& ids() const { return ids_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  const SparseMatrix& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }
  std::vector<WeightEntry> entries() const;

  /// S0, the sum of all weights.
  double total_weight() const;
  Eigen::VectorXd row_sums() const;
  bool is_symmetric(double tol = 1e-12) const;

  /// Same matrix with a different normalization label. Used when a weights
  /// file is read back and its state is recovered by inspection.
  SpatialWeights relabeled(Normalization normalization) const;

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  SparseMatrix matrix_;
  Normalization normalization_ = Normalization::raw;
};

struct IslandReport {
  std::vector<std::size_t> island_indices;
  std::size_t count() const { return island_indices.size(); }
  bool empty() const { return island_indices.empty(); }
};

/// Raw weights from edges between named units. `ids` fixes the unit set and
/// order; when empty, units are taken from the edges in first-seen order.
/// With `symmetrize`, (j, i) is added for every (i, j) whose reverse is not
/// listed explicitly.
SpatialWeights from_edge_list(std::span<const Edge> edges, bool symmetrize,
                              std::vector<std::string> ids = {});

SpatialWeights from_index_edges(std::size_t n, std::span<const IndexEdge> edges,
                                bool symmetrize);

/// k nearest neighbours by Euclidean distance, unit weights. Ties are
/// broken by the lower unit index.
SpatialWeights knn_weights(std::span<const Point> coords, std::size_t k,
                           std::vector<std::string> ids = {});

/// w_ij = d_ij^-alpha for 0 < d_ij <= cutoff.
SpatialWeights inverse_distance_weights(std::span<const Point> coords,
                                        double alpha, double cutoff,
                                        std::vector<std::string> ids = {});

/// Binary rook contiguity on a rows x cols grid; unit r * cols + c.
SpatialWeights rook_lattice(std::size_t rows, std::size_t cols);

/// Divides each row by its sum. Island rows stay empty. Idempotent.
SpatialWeights row_normalize(const SpatialWeights& w);

/// Divides every weight by the largest-magnitude eigenvalue of w.
SpatialWeights eigen_normalize(const SpatialWeights& w);

SpatialWeights normalize(const SpatialWeights& w, Normalization target);

enum class SpectralMethod { automatic, power, dense };

/// Largest-magnitude eigenvalue of a nonnegative weights matrix.
///
/// `power` runs power iteration on W + I and stops once the Collatz-Wielandt
/// bracket min_i (Ax)_i / x_i <= r <= max_i (Ax)_i / x_i is narrower than
/// `tol` relative to r. `automatic` falls back to a dense eigensolver for
/// n <= 500 when the bracket does not close (reducible matrices).
double spectral_radius(const SpatialWeights& w,
                       SpectralMethod method = SpectralMethod::automatic,
                       double tol = 1e-10);

/// Returns W * X. Throws ShapeError when X does not have n rows.
Eigen::MatrixXd spatial_lag(const SpatialWeights& w, const Eigen::MatrixXd& x);
Eigen::VectorXd spatial_lag(const SpatialWeights& w, const Eigen::VectorXd& x);

IslandReport detect_islands(const SpatialWeights& w);

/// Removes island units (rows with no neighbours). The kept original
/// indices are written to `kept` when non-null. Dropping a unit can create
/// new islands among its former neighbours; this is a single pass.
SpatialWeights drop_islands(const SpatialWeights& w,
                            std::vector<std::size_t>* kept = nullptr);

/// Infers the normalization state of a matrix read from storage.
Normalization detect_normalization(const SpatialWeights& w);

}  // namespace spatialecon
