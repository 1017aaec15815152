#pragma once

#include "spatialecon/dataset.hpp"
#include "spatialecon/diagnostics.hpp"
#include "spatialecon/estimators.hpp"
#include "spatialecon/impacts.hpp"
#include "spatialecon/simulate.hpp"
#include "spatialecon/weights.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace spatialecon::io {

using nlohmann::json;

/// Header-first CSV. Fields may be double-quoted; quotes inside quoted
/// fields are doubled.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, or npos when absent.
  std::size_t find(std::string_view name) const;
  /// Throws ConfigError when the column is absent.
  std::size_t column(std::string_view name) const;
};

CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);  // IoError when unreadable

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// `src,dst,weight` with optional weight column.
std::vector<Edge> read_edge_list(const std::string& path);

struct Coordinates {
  std::vector<std::string> ids;
  std::vector<Point> points;
};
/// `id,x,y`.
Coordinates read_coordinates(const std::string& path);

/// Unit identifiers from an `id` column.
std::vector<std::string> read_ids(const std::string& path, std::string_view column = "id");

/// Canonical edge list, one row per stored weight in (row, col) order.
void write_weights_csv(const SpatialWeights& w, std::ostream& out);

/// Reads a weights edge list onto a fixed set of units (units without
/// edges become islands) and recovers its normalization state. Edges that
/// name unknown units raise IdMismatch.
SpatialWeights read_weights(const std::string& path, const std::vector<std::string>& ids);
/// Same, taking the units from the file itself.
SpatialWeights read_weights(const std::string& path);

/// Loads outcome and covariates by column name, joining on `id_column`.
/// Empty, "NA" and "nan" cells become NaN and are reported by
/// Dataset::validate as MissingData.
Dataset read_dataset(const std::string& path, const std::string& outcome,
                     const std::vector<std::string>& covariates,
                     const std::string& id_column = "id");

void write_dataset_csv(const Dataset& data, std::ostream& out);

json to_json(const FitResult& fit);
/// Restores the estimates, covariance and residuals; y and the design
/// matrix are not stored.
FitResult fit_from_json(const json& j);

json to_json(const LrTestResult& lr);
json to_json(const MoranResult& moran);
json to_json(const LmTestResult& lm);
json to_json(const ImpactsSummary& summary);
json to_json(const DgpSpec& spec);
json island_report_json(const SpatialWeights& w, const IslandReport& report);

}  // namespace spatialecon::io
