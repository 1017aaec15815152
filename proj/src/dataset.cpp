#include "spatialecon/dataset.hpp"

#include "spatialecon/error.hpp"

#include <cmath>
#include <set>

namespace spatialecon {

void Dataset::validate() const {
  if (x.rows() != y.size()) {
    throw Error(ErrorCode::ShapeError, "covariate rows do not match outcome length");
  }
  if (!covariate_names.empty() && covariate_names.size() != k()) {
    throw Error(ErrorCode::ShapeError, "covariate names do not match columns");
  }
  if (!ids.empty() && ids.size() != n()) {
    throw Error(ErrorCode::ShapeError, "id list does not match outcome length");
  }
  std::set<Eigen::Index> bad;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) bad.insert(i);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (!std::isfinite(x(i, j))) bad.insert(i);
    }
  }
  if (!bad.empty()) {
    std::string rows;
    for (auto i : bad) {
      if (!rows.empty()) rows += ",";
      rows += std::to_string(i);
    }
    throw Error(ErrorCode::MissingData,
                "missing or non-finite values in rows [" + rows +
                    "]; drop or impute these units before building weights");
  }
}

namespace {

Eigen::VectorXd zscore(const Eigen::VectorXd& v, const std::string& name) {
  const auto n = static_cast<double>(v.size());
  const double mean = v.mean();
  const double ss = (v.array() - mean).square().sum();
  const double sd = std::sqrt(ss / (n - 1.0));
  if (!(sd > 0.0)) throw Error(ErrorCode::ZeroVariance, "column '" + name + "' is constant");
  return (v.array() - mean) / sd;
}

}  // namespace

Dataset standardize(const Dataset& data) {
  data.validate();
  if (data.n() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two units");
  Dataset out = data;
  out.y = zscore(data.y, data.outcome_name);
  for (Eigen::Index j = 0; j < data.x.cols(); ++j) {
    const std::string name = j < static_cast<Eigen::Index>(data.covariate_names.size())
                                 ? data.covariate_names[static_cast<std::size_t>(j)]
                                 : "x" + std::to_string(j + 1);
    out.x.col(j) = zscore(data.x.col(j), name);
  }
  return out;
}

}  // namespace spatialecon
