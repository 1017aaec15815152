#include "spatialecon/io.hpp"

#include "spatialecon/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace spatialecon::io {

std::size_t CsvTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  return std::string::npos;
}

std::size_t CsvTable::column(std::string_view name) const {
  const auto at = find(name);
  if (at == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "column '" + std::string(name) + "' not found");
  }
  return at;
}

namespace {

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  return in;
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "nan" || cell == "NaN" ||
         cell == ".";
}

double parse_number(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::ConfigError, "not a number: '" + cell + "' (" + where + ")");
  }
  return v;
}

double json_number(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = json_number(j[i]);
  return v;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    for (auto& f : fields) f = trim(std::move(f));
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw Error(ErrorCode::ConfigError, "CSV row " + std::to_string(table.rows.size() + 1) +
                                              " has " + std::to_string(fields.size()) +
                                              " fields, header has " +
                                              std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

CsvTable read_csv(const std::string& path) {
  auto in = open(path);
  return parse_csv(in);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<Edge> read_edge_list(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.header.empty()) return {};
  const auto src = t.column("src");
  const auto dst = t.column("dst");
  const auto wcol = t.find("weight");
  std::vector<Edge> edges;
  edges.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Edge e{t.rows[r][src], t.rows[r][dst], std::nullopt};
    if (wcol != std::string::npos && !t.rows[r][wcol].empty()) {
      e.weight = parse_number(t.rows[r][wcol], path + " row " + std::to_string(r + 1));
    }
    edges.push_back(std::move(e));
  }
  return edges;
}

Coordinates read_coordinates(const std::string& path) {
  const CsvTable t = read_csv(path);
  const auto id = t.column("id");
  const auto x = t.column("x");
  const auto y = t.column("y");
  Coordinates c;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path + " row " + std::to_string(r + 1);
    c.ids.push_back(t.rows[r][id]);
    c.points.push_back({parse_number(t.rows[r][x], where), parse_number(t.rows[r][y], where)});
  }
  return c;
}

std::vector<std::string> read_ids(const std::string& path, std::string_view column) {
  const CsvTable t = read_csv(path);
  const auto id = t.column(column);
  std::vector<std::string> ids;
  for (const auto& row : t.rows) ids.push_back(row[id]);
  return ids;
}

void write_weights_csv(const SpatialWeights& w, std::ostream& out) {
  out << "src,dst,weight\n";
  for (const auto& e : w.entries()) {
    out << w.ids()[e.row] << ',' << w.ids()[e.col] << ',' << format_double(e.weight) << '\n';
  }
}

SpatialWeights read_weights(const std::string& path, const std::vector<std::string>& ids) {
  const auto edges = read_edge_list(path);
  SpatialWeights w;
  try {
    w = from_edge_list(edges, false, ids);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::UnknownId) {
      throw Error(ErrorCode::IdMismatch, std::string(e.what()) + " in '" + path + "'");
    }
    throw;
  }
  return w.relabeled(detect_normalization(w));
}

SpatialWeights read_weights(const std::string& path) {
  const auto w = from_edge_list(read_edge_list(path), false);
  return w.relabeled(detect_normalization(w));
}

Dataset read_dataset(const std::string& path, const std::string& outcome,
                     const std::vector<std::string>& covariates,
                     const std::string& id_column) {
  const CsvTable t = read_csv(path);
  const auto id = t.column(id_column);
  const auto yc = t.column(outcome);
  std::vector<std::size_t> xc;
  for (const auto& c : covariates) xc.push_back(t.column(c));

  Dataset d;
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  d.y.resize(n);
  d.x.resize(n, static_cast<Eigen::Index>(covariates.size()));
  d.outcome_name = outcome;
  d.covariate_names = covariates;
  auto cell = [&](std::size_t r, std::size_t c) {
    const std::string& s = t.rows[r][c];
    if (is_missing(s)) return std::numeric_limits<double>::quiet_NaN();
    return parse_number(s, path + " row " + std::to_string(r + 1) + ", column " + t.header[c]);
  };
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    d.ids.push_back(t.rows[r][id]);
    d.y[static_cast<Eigen::Index>(r)] = cell(r, yc);
    for (std::size_t j = 0; j < xc.size(); ++j) {
      d.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = cell(r, xc[j]);
    }
  }
  return d;
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  out << "id," << data.outcome_name;
  for (const auto& name : data.covariate_names) out << ',' << name;
  out << '\n';
  for (Eigen::Index i = 0; i < data.y.size(); ++i) {
    out << (static_cast<std::size_t>(i) < data.ids.size() ? data.ids[static_cast<std::size_t>(i)]
                                                          : std::to_string(i))
        << ',' << format_double(data.y[i]);
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) out << ',' << format_double(data.x(i, j));
    out << '\n';
  }
}

json to_json(const FitResult& fit) {
  json j;
  j["model"] = std::string(to_string(fit.spec.kind));
  j["n"] = fit.n;
  j["k"] = fit.k;
  j["covariates"] = fit.covariate_names;
  j["lagged_columns"] = fit.lagged_columns;
  j["lag_all_covariates"] = fit.spec.lag_all_covariates;
  j["alpha"] = fit.alpha;
  j["beta"] = vector_json(fit.beta);
  j["theta"] = vector_json(fit.theta);
  j["rho"] = fit.rho ? json(*fit.rho) : json(nullptr);
  j["lambda"] = fit.lambda ? json(*fit.lambda) : json(nullptr);
  j["sigma2"] = fit.sigma2;
  j["loglik"] = fit.loglik;
  j["aic"] = fit.aic;
  j["boundary"] = fit.boundary;
  j["warnings"] = fit.warnings;
  j["weights_normalization"] = std::string(to_string(fit.weights_normalization));
  j["parameter_names"] = fit.parameter_names;

  const Eigen::VectorXd est = fit.estimates();
  const Eigen::VectorXd se = fit.std_errors();
  json coefs = json::array();
  for (std::size_t i = 0; i < fit.parameter_names.size(); ++i) {
    const auto at = static_cast<Eigen::Index>(i);
    json c;
    c["name"] = fit.parameter_names[i];
    c["estimate"] = est[at];
    c["std_error"] = se[at];
    const double z = se[at] > 0.0 ? est[at] / se[at] : std::numeric_limits<double>::quiet_NaN();
    c["z"] = z;
    c["p_value"] = std::isfinite(z) ? std::erfc(std::abs(z) / std::sqrt(2.0))
                                    : std::numeric_limits<double>::quiet_NaN();
    coefs.push_back(c);
  }
  j["coefficients"] = coefs;

  json vcov = json::array();
  for (Eigen::Index r = 0; r < fit.vcov.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < fit.vcov.cols(); ++c) row.push_back(fit.vcov(r, c));
    vcov.push_back(row);
  }
  j["vcov"] = vcov;
  j["residuals"] = vector_json(fit.residuals);
  return j;
}

FitResult fit_from_json(const json& j) {
  try {
    FitResult fit;
    fit.spec.kind = parse_model_kind(j.at("model").get<std::string>());
    fit.spec.lag_all_covariates = j.value("lag_all_covariates", true);
    fit.n = j.at("n").get<std::size_t>();
    fit.k = j.at("k").get<std::size_t>();
    fit.covariate_names = j.at("covariates").get<std::vector<std::string>>();
    fit.lagged_columns = j.at("lagged_columns").get<std::vector<std::size_t>>();
    if (!fit.spec.lag_all_covariates) fit.spec.lagged_columns = fit.lagged_columns;
    fit.alpha = json_number(j.at("alpha"));
    fit.beta = vector_from(j.at("beta"));
    fit.theta = vector_from(j.at("theta"));
    if (!j.at("rho").is_null()) fit.rho = json_number(j.at("rho"));
    if (!j.at("lambda").is_null()) fit.lambda = json_number(j.at("lambda"));
    fit.sigma2 = json_number(j.at("sigma2"));
    fit.loglik = json_number(j.at("loglik"));
    fit.aic = json_number(j.at("aic"));
    fit.boundary = j.value("boundary", false);
    fit.warnings = j.value("warnings", std::vector<std::string>{});
    fit.weights_normalization =
        parse_normalization(j.value("weights_normalization", std::string("raw")));
    fit.parameter_names = j.at("parameter_names").get<std::vector<std::string>>();
    const auto& vcov = j.at("vcov");
    const auto p = static_cast<Eigen::Index>(vcov.size());
    fit.vcov.resize(p, p);
    for (Eigen::Index r = 0; r < p; ++r) {
      const auto& row = vcov[static_cast<std::size_t>(r)];
      if (static_cast<Eigen::Index>(row.size()) != p) {
        throw Error(ErrorCode::ConfigError, "vcov is not square");
      }
      for (Eigen::Index c = 0; c < p; ++c) fit.vcov(r, c) = json_number(row[static_cast<std::size_t>(c)]);
    }
    if (j.contains("residuals")) fit.residuals = vector_from(j.at("residuals"));
    if (static_cast<std::size_t>(fit.beta.size()) != fit.k ||
        fit.theta.size() != static_cast<Eigen::Index>(fit.lagged_columns.size()) ||
        static_cast<std::size_t>(p) != fit.parameter_names.size()) {
      throw Error(ErrorCode::ConfigError, "inconsistent fit record");
    }
    return fit;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed fit JSON: ") + e.what());
  }
}

json to_json(const LrTestResult& lr) {
  return json{{"statistic", lr.statistic},
              {"df", lr.df},
              {"p_value", lr.p_value},
              {"restricted_model", std::string(to_string(lr.restricted_model))},
              {"unrestricted_model", std::string(to_string(lr.unrestricted_model))}};
}

json to_json(const MoranResult& m) {
  return json{{"statistic", m.statistic},
              {"expectation", m.expectation},
              {"p_value", m.p_value},
              {"n_permutations", m.n_permutations},
              {"seed", m.seed},
              {"s0", m.s0},
              {"alternative", std::string(to_string(m.alternative))}};
}

json to_json(const LmTestResult& lm) {
  auto one = [](const LmStatistic& s) {
    return json{{"statistic", s.statistic}, {"p_value", s.p_value}};
  };
  return json{{"lm_lag", one(lm.lm_lag)},
              {"lm_err", one(lm.lm_err)},
              {"robust_lm_lag", one(lm.robust_lm_lag)},
              {"robust_lm_err", one(lm.robust_lm_err)}};
}

json to_json(const ImpactsSummary& s) {
  json rows = json::array();
  for (const auto& c : s.covariates) {
    json r{{"covariate", c.covariate},
           {"direct", c.direct},
           {"indirect", c.indirect},
           {"total", c.total}};
    auto add = [&](const char* suffix, const std::optional<ImpactDraws>& d) {
      if (!d) return;
      r[std::string("mean_") + suffix] = d->mean;
      r[std::string("sd_") + suffix] = d->sd;
      r[std::string("q025_") + suffix] = d->q025;
      r[std::string("q975_") + suffix] = d->q975;
    };
    add("direct", c.direct_draws);
    add("indirect", c.indirect_draws);
    add("total", c.total_draws);
    rows.push_back(r);
  }
  json j{{"model", std::string(to_string(s.model))},
         {"type", std::string(to_string(s.type))},
         {"impacts", rows}};
  if (s.has_inference()) {
    j["draws"] = s.draws;
    j["seed"] = s.seed;
  }
  return j;
}

json to_json(const DgpSpec& spec) {
  return json{{"kind", std::string(to_string(spec.kind))},
              {"rho", spec.rho},
              {"lambda", spec.lambda},
              {"beta", vector_json(spec.beta)},
              {"theta", vector_json(spec.theta)},
              {"alpha", spec.alpha},
              {"sigma", spec.sigma},
              {"seed", spec.seed}};
}

json island_report_json(const SpatialWeights& w, const IslandReport& report) {
  json ids = json::array();
  for (auto i : report.island_indices) ids.push_back(w.ids()[i]);
  return json{{"n", w.size()},
              {"nonzeros", w.nonzeros()},
              {"normalization", std::string(to_string(w.normalization()))},
              {"island_count", report.count()},
              {"island_indices", report.island_indices},
              {"islands", ids}};
}

}  // namespace spatialecon::io
