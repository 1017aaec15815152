#include "cli.hpp"

#include "spatialecon/diagnostics.hpp"
#include "spatialecon/error.hpp"
#include "spatialecon/estimators.hpp"
#include "spatialecon/impacts.hpp"
#include "spatialecon/io.hpp"
#include "spatialecon/simulate.hpp"
#include "spatialecon/weights.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace spatialecon::cli {
namespace {

using io::json;

struct Shared {
  std::string weights;
  std::string normalize;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--weights", s.weights, "Weights edge list (src,dst,weight)");
  cmd->add_option("--normalize", s.normalize, "Normalization to apply: row, eigen or none")
      ->check(CLI::IsMember({"row", "eigen", "none"}));
  cmd->add_option("--seed", s.seed, "Seed for all randomness");
  cmd->add_option("--out", s.out, "Output file (default stdout)");
  cmd->add_option("--format", s.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}));
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Eigen::VectorXd parse_vector(const std::string& text, const char* flag) {
  const auto items = split_list(text);
  Eigen::VectorXd v(static_cast<Eigen::Index>(items.size()));
  for (std::size_t i = 0; i < items.size(); ++i) {
    try {
      std::size_t used = 0;
      v[static_cast<Eigen::Index>(i)] = std::stod(items[i], &used);
      if (used != items[i].size()) throw std::invalid_argument(items[i]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, std::string(flag) + ": bad number '" + items[i] + "'");
    }
  }
  return v;
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw Error(ErrorCode::ConfigError, std::string(flag) + " is required");
  std::ifstream probe(path);
  if (!probe) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
}

/// Applies --normalize when given; otherwise keeps the detected state.
SpatialWeights apply_normalization(const SpatialWeights& w, const std::string& flag) {
  if (flag.empty()) return w;
  const Normalization target = parse_normalization(flag);
  if (target == Normalization::raw) return w;
  if (w.normalization() == target) return w;
  return normalize(w.relabeled(Normalization::raw), target);
}

void emit(const std::string& text, const Shared& s, std::ostream& out) {
  if (s.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(s.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot write '" + s.out + "'");
  file << text;
}

std::string fixed(double v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// weights

struct WeightsArgs {
  Shared shared;
  std::string edges;
  std::string coords;
  std::string units;
  std::string report;
  bool symmetrize = false;
  bool drop = false;
  std::optional<std::size_t> knn;
  std::optional<double> idw_alpha;
  double cutoff = std::numeric_limits<double>::infinity();
};

std::string cmd_weights(const WeightsArgs& a, std::ostream& out) {
  if (!a.edges.empty() && !a.coords.empty()) {
    throw Error(ErrorCode::ConfigError, "--edges and --coords are mutually exclusive");
  }
  if (a.edges.empty() && a.coords.empty()) {
    throw Error(ErrorCode::ConfigError, "one of --edges or --coords is required");
  }
  SpatialWeights w;
  if (!a.edges.empty()) {
    if (a.knn || a.idw_alpha) {
      throw Error(ErrorCode::ConfigError, "--knn/--idw-alpha need --coords");
    }
    require_file(a.edges, "--edges");
    std::vector<std::string> ids;
    if (!a.units.empty()) {
      require_file(a.units, "--units");
      ids = io::read_ids(a.units);
    }
    w = from_edge_list(io::read_edge_list(a.edges), a.symmetrize, ids);
  } else {
    require_file(a.coords, "--coords");
    if (a.knn.has_value() == a.idw_alpha.has_value()) {
      throw Error(ErrorCode::ConfigError, "--coords needs exactly one of --knn or --idw-alpha");
    }
    const auto c = io::read_coordinates(a.coords);
    w = a.knn ? knn_weights(c.points, *a.knn, c.ids)
              : inverse_distance_weights(c.points, *a.idw_alpha, a.cutoff, c.ids);
  }

  json dropped = json::array();
  if (a.drop) {
    const auto before = detect_islands(w);
    for (auto i : before.island_indices) dropped.push_back(w.ids()[i]);
    w = drop_islands(w);
  }
  w = apply_normalization(w, a.shared.normalize);
  const auto report = detect_islands(w);
  json rep = io::island_report_json(w, report);
  rep["dropped"] = dropped;

  std::ostringstream csv;
  io::write_weights_csv(w, csv);
  std::string report_text;
  if (a.shared.format == "json") {
    report_text = rep.dump(2) + "\n";
  } else {
    std::ostringstream t;
    t << "units: " << w.size() << "\nnonzeros: " << w.nonzeros()
      << "\nnormalization: " << to_string(w.normalization())
      << "\nislands: " << report.count() << "\n";
    for (auto i : report.island_indices) t << "  " << w.ids()[i] << "\n";
    report_text = t.str();
  }

  if (!a.report.empty()) {
    std::ofstream file(a.report, std::ios::binary);
    if (!file) throw Error(ErrorCode::IoError, "cannot write '" + a.report + "'");
    file << report_text;
  }
  if (a.shared.out.empty()) {
    out << csv.str();
    return {};
  }
  Shared to_file = a.shared;
  emit(csv.str(), to_file, out);
  return a.report.empty() ? report_text : std::string{};
}

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  Shared shared;
  std::string model;
  std::string data;
  std::string outcome;
  std::string covariates;
  std::string lag;
  std::string id_column = "id";
  bool standardize = false;
};

struct LoadedProblem {
  Dataset data;
  std::optional<SpatialWeights> w;
};

LoadedProblem load_problem(const std::string& data_path, const std::string& outcome,
                           const std::string& covariates, const std::string& id_column,
                           const Shared& shared, bool need_weights, bool standardize) {
  require_file(data_path, "--data");
  if (outcome.empty()) throw Error(ErrorCode::ConfigError, "--outcome is required");
  LoadedProblem p;
  p.data = io::read_dataset(data_path, outcome, split_list(covariates), id_column);
  p.data.validate();
  if (standardize) p.data = spatialecon::standardize(p.data);
  if (need_weights || !shared.weights.empty()) {
    require_file(shared.weights, "--weights");
    p.w = apply_normalization(io::read_weights(shared.weights, p.data.ids), shared.normalize);
  }
  return p;
}

json fit_record(const FitResult& fit, const FitResult* ols) {
  json j = io::to_json(fit);
  if (ols && fit.spec.kind != ModelKind::OLS) {
    j["lr_vs_ols"] = io::to_json(lr_test(*ols, fit));
  } else {
    j["lr_vs_ols"] = nullptr;
  }
  return j;
}

std::string fit_text(const std::vector<FitResult>& fits) {
  std::ostringstream t;
  for (const auto& fit : fits) {
    t << "== " << to_string(fit.spec.kind) << " (n=" << fit.n << ")\n";
    const Eigen::VectorXd est = fit.estimates();
    const Eigen::VectorXd se = fit.std_errors();
    for (std::size_t i = 0; i < fit.parameter_names.size(); ++i) {
      const auto at = static_cast<Eigen::Index>(i);
      t << "  " << std::left << std::setw(20) << fit.parameter_names[i] << std::right
        << std::setw(14) << fixed(est[at]) << std::setw(14) << fixed(se[at]) << "\n";
    }
    t << "  loglik " << fixed(fit.loglik, 4) << "  AIC " << fixed(fit.aic, 4) << "\n";
    for (const auto& wmsg : fit.warnings) t << "  warning: " << wmsg << "\n";
  }
  return t.str();
}

std::string cmd_fit(const FitArgs& a) {
  if (a.model.empty()) throw Error(ErrorCode::ConfigError, "--model is required");
  if (a.covariates.empty()) throw Error(ErrorCode::ConfigError, "--covariates is required");
  const bool all = a.model == "all";
  const ModelKind kind = all ? ModelKind::OLS : parse_model_kind(a.model);
  const bool need_w = all || kind != ModelKind::OLS;
  LoadedProblem p = load_problem(a.data, a.outcome, a.covariates, a.id_column, a.shared,
                                 need_w, a.standardize);

  ModelSpec spec{kind};
  if (!a.lag.empty()) {
    spec.lag_all_covariates = false;
    for (const auto& name : split_list(a.lag)) {
      const auto& names = p.data.covariate_names;
      const auto it = std::find(names.begin(), names.end(), name);
      if (it == names.end()) {
        throw Error(ErrorCode::ConfigError, "--lag names unknown covariate '" + name + "'");
      }
      spec.lagged_columns.push_back(static_cast<std::size_t>(it - names.begin()));
    }
  }

  std::vector<FitResult> fits;
  if (all) {
    if (!a.lag.empty()) throw Error(ErrorCode::ConfigError, "--lag is not supported with all");
    fits = fit_all(p.data, *p.w);
  } else {
    fits.push_back(p.w ? fit_model(p.data, *p.w, spec) : fit_ols(p.data));
    // The LR reference is always the OLS fit on the same data.
    if (kind != ModelKind::OLS) fits.insert(fits.begin(), fit_ols(p.data));
  }
  const FitResult& ols = fits.front();

  if (a.shared.format == "text") return fit_text(all ? fits : std::vector{fits.back()});

  json models = json::array();
  for (std::size_t i = 0; i < fits.size(); ++i) {
    if (!all && kind != ModelKind::OLS && i == 0) continue;
    models.push_back(fit_record(fits[i], &ols));
  }
  json j{{"outcome", p.data.outcome_name},
         {"covariates", p.data.covariate_names},
         {"n", p.data.n()},
         {"standardized", a.standardize},
         {"models", models}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// diagnose

struct DiagnoseArgs {
  Shared shared;
  std::string data;
  std::string variable;
  std::string outcome;
  std::string covariates;
  std::string fit;
  std::string model;
  std::string id_column = "id";
  std::string alternative = "two-sided";
  std::size_t permutations = 999;
  bool lm = false;
};

std::vector<FitResult> read_fits(const std::string& path) {
  require_file(path, "--fit");
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, "cannot parse '" + path + "': " + e.what());
  }
  std::vector<FitResult> fits;
  if (j.contains("models")) {
    for (const auto& m : j.at("models")) fits.push_back(io::fit_from_json(m));
  } else {
    fits.push_back(io::fit_from_json(j));
  }
  if (fits.empty()) throw Error(ErrorCode::ConfigError, "'" + path + "' holds no fits");
  return fits;
}

std::string cmd_diagnose(const DiagnoseArgs& a) {
  const Alternative alt = parse_alternative(a.alternative);
  const int targets = int(!a.variable.empty()) + int(!a.outcome.empty()) + int(!a.fit.empty());
  if (targets != 1) {
    throw Error(ErrorCode::ConfigError,
                "choose exactly one of --variable, --outcome (OLS residuals) or --fit");
  }
  if (a.lm && a.outcome.empty()) {
    throw Error(ErrorCode::ConfigError, "--lm needs --outcome and --covariates");
  }
  json j;
  std::string target;
  if (!a.fit.empty()) {
    require_file(a.shared.weights, "--weights");
    auto fits = read_fits(a.fit);
    if (!a.model.empty()) {
      const ModelKind kind = parse_model_kind(a.model);
      std::erase_if(fits, [&](const FitResult& f) { return f.spec.kind != kind; });
      if (fits.empty()) throw Error(ErrorCode::ConfigError, "no " + a.model + " fit in file");
    }
    if (fits.size() != 1) {
      throw Error(ErrorCode::ConfigError, "--fit holds several models; choose one with --model");
    }
    const FitResult& fit = fits.front();
    SpatialWeights w = io::read_weights(a.shared.weights);
    w = apply_normalization(w, a.shared.normalize);
    if (w.size() != fit.n) throw Error(ErrorCode::IdMismatch, "fit and weights sizes differ");
    j = io::to_json(morans_i_residuals(fit, w, a.permutations, a.shared.seed, alt));
    target = "residuals:" + std::string(to_string(fit.spec.kind));
  } else if (!a.variable.empty()) {
    LoadedProblem p = load_problem(a.data, a.variable, "", a.id_column, a.shared, true, false);
    j = io::to_json(morans_i(*p.w, p.data.y, a.permutations, a.shared.seed, alt));
    target = a.variable;
  } else {
    LoadedProblem p =
        load_problem(a.data, a.outcome, a.covariates, a.id_column, a.shared, true, false);
    const FitResult ols = fit_ols(p.data);
    j = io::to_json(morans_i_residuals(ols, *p.w, a.permutations, a.shared.seed, alt));
    target = "residuals:OLS";
    if (a.lm) j["lm"] = io::to_json(lm_tests(ols, *p.w));
  }
  j["target"] = target;
  if (a.shared.format == "json") return j.dump(2) + "\n";

  std::ostringstream t;
  t << "Moran's I (" << target << "): " << fixed(j["statistic"].get<double>())
    << "  E[I] = " << fixed(j["expectation"].get<double>())
    << "  p = " << fixed(j["p_value"].get<double>(), 4) << " (" << a.permutations
    << " permutations, " << a.alternative << ")\n";
  if (j.contains("lm")) {
    for (const char* name : {"lm_lag", "lm_err", "robust_lm_lag", "robust_lm_err"}) {
      t << "  " << std::left << std::setw(14) << name << std::right << std::setw(12)
        << fixed(j["lm"][name]["statistic"].get<double>(), 4) << "  p = "
        << fixed(j["lm"][name]["p_value"].get<double>(), 4) << "\n";
    }
  }
  return t.str();
}

// ---------------------------------------------------------------------------
// impacts

struct ImpactsArgs {
  Shared shared;
  std::string fit;
  std::string model;
  std::size_t draws = 0;
};

std::string impacts_text(const ImpactsSummary& s) {
  std::ostringstream t;
  t << "== " << to_string(s.model) << " impacts (" << to_string(s.type) << ")\n";
  t << "  " << std::left << std::setw(16) << "covariate" << std::right << std::setw(14)
    << "direct" << std::setw(14) << "indirect" << std::setw(14) << "total" << "\n";
  for (const auto& c : s.covariates) {
    t << "  " << std::left << std::setw(16) << c.covariate << std::right << std::setw(14)
      << fixed(c.direct) << std::setw(14) << fixed(c.indirect) << std::setw(14)
      << fixed(c.total) << "\n";
    if (c.direct_draws) {
      t << "  " << std::left << std::setw(16) << "  (sd)" << std::right << std::setw(14)
        << fixed(c.direct_draws->sd) << std::setw(14) << fixed(c.indirect_draws->sd)
        << std::setw(14) << fixed(c.total_draws->sd) << "\n";
    }
  }
  if (s.has_inference()) t << "  draws: " << s.draws << ", seed: " << s.seed << "\n";
  return t.str();
}

std::string cmd_impacts(const ImpactsArgs& a) {
  auto fits = read_fits(a.fit);
  if (!a.model.empty()) {
    const ModelKind kind = parse_model_kind(a.model);
    std::erase_if(fits, [&](const FitResult& f) { return f.spec.kind != kind; });
    if (fits.empty()) throw Error(ErrorCode::ConfigError, "no " + a.model + " fit in file");
  }
  require_file(a.shared.weights, "--weights");
  const SpatialWeights raw = io::read_weights(a.shared.weights);

  json models = json::array();
  std::string text;
  for (const auto& fit : fits) {
    if (raw.size() != fit.n) {
      throw Error(ErrorCode::IdMismatch, "fit has " + std::to_string(fit.n) +
                                             " units, weights have " + std::to_string(raw.size()));
    }
    // Reuse the normalization the model was estimated with unless overridden.
    std::string flag = a.shared.normalize;
    if (flag.empty() && raw.normalization() == Normalization::raw) {
      flag = std::string(to_string(fit.weights_normalization));
    }
    const SpatialWeights w = apply_normalization(raw, flag);
    const ImpactsSummary s = a.draws > 0 ? impacts_inference(fit, w, a.draws, a.shared.seed)
                                         : impacts_summary(fit, w);
    models.push_back(io::to_json(s));
    text += impacts_text(s);
  }
  if (a.shared.format == "text") return text;
  return json{{"models", models}}.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  Shared shared;
  std::string model = "sar";
  double rho = 0.0;
  double lambda = 0.0;
  std::string beta = "1";
  std::string theta;
  double alpha = 0.0;
  double sigma = 1.0;
  std::string lattice = "20x20";
  std::string manifest;
  std::string weights_out;
};

std::string cmd_simulate(const SimulateArgs& a) {
  DgpSpec spec;
  spec.kind = parse_model_kind(a.model);
  spec.rho = a.rho;
  spec.lambda = a.lambda;
  spec.beta = parse_vector(a.beta, "--beta");
  if (!a.theta.empty()) spec.theta = parse_vector(a.theta, "--theta");
  spec.alpha = a.alpha;
  spec.sigma = a.sigma;
  spec.seed = a.shared.seed;

  SpatialWeights w;
  json source;
  if (!a.shared.weights.empty()) {
    require_file(a.shared.weights, "--weights");
    w = io::read_weights(a.shared.weights);
    source = json{{"file", a.shared.weights}};
  } else {
    const auto x = a.lattice.find('x');
    std::size_t rows = 0, cols = 0;
    try {
      if (x == std::string::npos) throw std::invalid_argument(a.lattice);
      rows = std::stoul(a.lattice.substr(0, x));
      cols = std::stoul(a.lattice.substr(x + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "--lattice expects ROWSxCOLS");
    }
    if (rows * cols < 2) throw Error(ErrorCode::ConfigError, "lattice needs at least 2 units");
    w = rook_lattice(rows, cols);
    source = json{{"lattice", a.lattice}};
  }
  const std::string flag = a.shared.normalize.empty() && !w.is_normalized()
                               ? std::string("row")
                               : a.shared.normalize;
  w = apply_normalization(w, flag);

  const Dataset d = generate(spec, w);
  std::ostringstream csv;
  io::write_dataset_csv(d, csv);

  if (!a.weights_out.empty()) {
    std::ofstream file(a.weights_out, std::ios::binary);
    if (!file) throw Error(ErrorCode::IoError, "cannot write '" + a.weights_out + "'");
    io::write_weights_csv(w, file);
  }
  json manifest = io::to_json(spec);
  manifest["n"] = d.n();
  manifest["weights"] = source;
  manifest["weights"]["normalization"] = std::string(to_string(w.normalization()));
  if (!a.weights_out.empty()) manifest["weights"]["written_to"] = a.weights_out;
  if (!a.shared.out.empty()) manifest["data"] = a.shared.out;
  if (!a.manifest.empty()) {
    std::ofstream file(a.manifest, std::ios::binary);
    if (!file) throw Error(ErrorCode::IoError, "cannot write '" + a.manifest + "'");
    file << manifest.dump(2) << "\n";
  }
  return csv.str();
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError: return kConfigError;
    case ErrorCode::IoError: return kIoError;
    default: return kComputationError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spatial econometrics toolkit", "spatialecon"};
  app.require_subcommand(1);

  WeightsArgs wa;
  auto* weights = app.add_subcommand("weights", "Build and normalize a weights matrix");
  add_shared(weights, wa.shared);
  weights->add_option("--edges", wa.edges, "Edge list CSV (src,dst[,weight])");
  weights->add_option("--coords", wa.coords, "Coordinates CSV (id,x,y)");
  weights->add_option("--units", wa.units, "CSV with an id column listing every unit");
  weights->add_flag("--symmetrize", wa.symmetrize, "Add (j,i) for every (i,j)");
  weights->add_option("--knn", wa.knn, "k nearest neighbours");
  weights->add_option("--idw-alpha", wa.idw_alpha, "Inverse-distance decay exponent");
  weights->add_option("--cutoff", wa.cutoff, "Inverse-distance cutoff");
  weights->add_flag("--drop-islands", wa.drop, "Remove units without neighbours");
  weights->add_option("--report", wa.report, "Island report output file");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Estimate a spatial regression model");
  add_shared(fit, fa.shared);
  fit->add_option("--model", fa.model, "ols|slx|sar|sem|sdm|sdem|all");
  fit->add_option("--data", fa.data, "Data CSV");
  fit->add_option("--outcome", fa.outcome, "Outcome column");
  fit->add_option("--covariates", fa.covariates, "Comma-separated covariate columns");
  fit->add_option("--lag", fa.lag, "Covariates entering WX (default: all)");
  fit->add_option("--id-column", fa.id_column, "Unit id column");
  fit->add_flag("--standardize", fa.standardize, "z-score outcome and covariates");

  DiagnoseArgs da;
  auto* diagnose = app.add_subcommand("diagnose", "Moran's I and LM specification tests");
  add_shared(diagnose, da.shared);
  diagnose->add_option("--data", da.data, "Data CSV");
  diagnose->add_option("--variable", da.variable, "Column to test");
  diagnose->add_option("--outcome", da.outcome, "Outcome for OLS residual tests");
  diagnose->add_option("--covariates", da.covariates, "Covariates for OLS residual tests");
  diagnose->add_option("--fit", da.fit, "Saved fit JSON whose residuals are tested");
  diagnose->add_option("--model", da.model, "Model whose residuals are tested when --fit holds several");
  diagnose->add_option("--id-column", da.id_column, "Unit id column");
  diagnose->add_option("--permutations", da.permutations, "Permutation count");
  diagnose->add_option("--alternative", da.alternative, "two-sided|greater|less")
      ->check(CLI::IsMember({"two-sided", "greater", "less"}));
  diagnose->add_flag("--lm", da.lm, "Add the LM lag/error battery");

  ImpactsArgs ia;
  auto* impacts = app.add_subcommand("impacts", "Direct, indirect and total impacts");
  add_shared(impacts, ia.shared);
  impacts->add_option("--fit", ia.fit, "Saved fit JSON");
  impacts->add_option("--model", ia.model, "Model to report when the file holds several");
  impacts->add_option("--draws", ia.draws, "Simulation draws for inference (0 = none)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Generate data from a spatial DGP");
  add_shared(simulate, sa.shared);
  simulate->add_option("--model", sa.model, "ols|slx|sar|sem|sdm|sdem");
  simulate->add_option("--rho", sa.rho, "Spatial lag parameter");
  simulate->add_option("--lambda", sa.lambda, "Spatial error parameter");
  simulate->add_option("--beta", sa.beta, "Comma-separated beta");
  simulate->add_option("--theta", sa.theta, "Comma-separated theta");
  simulate->add_option("--alpha", sa.alpha, "Intercept");
  simulate->add_option("--sigma", sa.sigma, "Noise standard deviation");
  simulate->add_option("--lattice", sa.lattice, "Rook lattice ROWSxCOLS (default 20x20)");
  simulate->add_option("--manifest", sa.manifest, "JSON manifest output file");
  simulate->add_option("--weights-out", sa.weights_out, "Write the weights used");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "ConfigError: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    std::string result;
    const Shared* shared = nullptr;
    if (app.got_subcommand(weights)) {
      result = cmd_weights(wa, out);
      if (!result.empty()) out << result;
      return kSuccess;
    }
    if (app.got_subcommand(fit)) {
      result = cmd_fit(fa);
      shared = &fa.shared;
    } else if (app.got_subcommand(diagnose)) {
      result = cmd_diagnose(da);
      shared = &da.shared;
    } else if (app.got_subcommand(impacts)) {
      result = cmd_impacts(ia);
      shared = &ia.shared;
    } else if (app.got_subcommand(simulate)) {
      result = cmd_simulate(sa);
      shared = &sa.shared;
    }
    emit(result, *shared, out);
    return kSuccess;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kComputationError;
  }
}

}  // namespace spatialecon::cli
