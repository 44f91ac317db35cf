#include "bmse/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "bmse/inference.hpp"

namespace bmse {

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Json error_json(const Error& e) {
  return Json{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
}

namespace {

Family family_of(Method m) {
  return (m == Method::kBM || m == Method::kFlatTopBM) ? Family::kBM : Family::kOBM;
}

Json pilot_json(const PilotEstimates& pilot) {
  Json j{{"method", std::string(to_string(pilot.method))},
         {"sigma", vector_to_json(pilot.sigma_p)},
         {"gamma", vector_to_json(pilot.gamma_p)}};
  if (pilot.method == PilotMethod::kArFit) {
    j["orders"] = pilot.orders;
  } else {
    j["bandwidth"] = pilot.bandwidth;
  }
  return j;
}

Json batch_json(const BatchSizeResult& r) {
  Json j{{"method", std::string(to_string(r.method))}, {"b", r.b}};
  // The lag rule has no MSE coefficient.
  if (r.method != SelectionMethod::kLagBased) {
    j["coefficient"] = r.coefficient;
    j["family_constant"] = r.family_constant;
  }
  j["n"] = r.n;
  return j;
}

}  // namespace

Json estimate_report(const ChainMatrix& chain, const EstimateOptions& options) {
  if (options.b.has_value() == options.selection.has_value()) {
    throw Error(ErrorCode::kInvalidArgument, "give exactly one of an explicit batch size or a selection method");
  }
  const auto start = std::chrono::steady_clock::now();
  const Family family = family_of(options.estimator);
  const bool gobm = options.estimator == Method::kGeneralizedOBM;
  const WindowKind kind = gobm ? options.window
                               : (is_flat_top(options.estimator) ? WindowKind::kFlatTop : WindowKind::kBartlett);
  const bool flat_top = kind == WindowKind::kFlatTop;

  Json selection = nullptr;
  std::optional<PilotEstimates> ar;
  std::int64_t b = 0;
  if (options.b) {
    b = *options.b;
  } else {
    BatchSizeResult r;
    switch (*options.selection) {
      case SelectionMethod::kArFit:
        ar = ar_pilot(chain, options.max_order);
        r = optimal_batchsize(*ar, chain.n(), kind, family, flat_top);
        selection = batch_json(r);
        selection["pilot"] = pilot_json(*ar);
        break;
      case SelectionMethod::kNonparametric: {
        const PilotEstimates np = nonparametric_pilot(chain);
        r = optimal_batchsize(np, chain.n(), kind, family, flat_top);
        selection = batch_json(r);
        selection["pilot"] = pilot_json(np);
        break;
      }
      case SelectionMethod::kLagBased:
        r = lag_based_batchsize(chain, flat_top);
        selection = batch_json(r);
        break;
    }
    b = r.b;
  }

  const CovEstimate est = estimate(chain, options.estimator, b, kind);

  Json ess = nullptr;
  Json ess_error = nullptr;
  try {
    if (!ar) ar = ar_pilot(chain, options.max_order);
    ess = vector_to_json(ess_univariate(chain, *ar));
  } catch (const Error& e) {
    ess_error = error_json(e)["error"];
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json out{{"command", "estimate"},
           {"version", kVersion},
           {"n", chain.n()},
           {"p", chain.p()},
           {"estimator", std::string(to_string(est.method))},
           {"window", std::string(to_string(kind))},
           {"family", std::string(to_string(family))},
           {"b", est.b},
           {"batch_source", options.b ? std::string("explicit") : std::string(to_string(*options.selection))},
           {"selection", selection},
           {"mean", vector_to_json(mean_vector(chain))},
           {"sigma", matrix_to_json(est.sigma)},
           {"ess", ess}};
  if (!ess_error.is_null()) out["ess_error"] = ess_error;
  out["elapsed_seconds"] = elapsed;
  return out;
}

Json batchsize_report(const ChainMatrix& chain, const BatchsizeOptions& options) {
  Json methods = Json::object();
  const bool flat_top = options.flat_top_target || options.window == WindowKind::kFlatTop;
  for (const SelectionMethod m : options.methods) {
    Json entry;
    switch (m) {
      case SelectionMethod::kArFit: {
        const PilotEstimates pilot = ar_pilot(chain, options.max_order);
        entry = batch_json(optimal_batchsize(pilot, chain.n(), options.window, options.family, flat_top));
        entry["pilot"] = pilot_json(pilot);
        break;
      }
      case SelectionMethod::kNonparametric: {
        const PilotEstimates pilot = nonparametric_pilot(chain);
        entry = batch_json(optimal_batchsize(pilot, chain.n(), options.window, options.family, flat_top));
        entry["pilot"] = pilot_json(pilot);
        break;
      }
      case SelectionMethod::kLagBased: {
        const BatchSizeResult r = lag_based_batchsize(chain, flat_top);
        entry = batch_json(r);
        entry["r"] = r.b / 2;
        break;
      }
    }
    methods[std::string(to_string(m))] = std::move(entry);
  }
  return Json{{"command", "batchsize"},
              {"version", kVersion},
              {"n", chain.n()},
              {"p", chain.p()},
              {"family", std::string(to_string(options.family))},
              {"window", std::string(to_string(options.window))},
              {"flat_top_target", flat_top},
              {"methods", std::move(methods)}};
}

Json var1_sidecar(const Var1Spec& spec, double rho, std::uint64_t seed, std::int64_t n) {
  return Json{{"command", "simulate"},
              {"version", kVersion},
              {"p", spec.phi.rows()},
              {"n", n},
              {"rho", rho},
              {"seed", seed},
              {"spectral_radius", spec.spectral_radius},
              {"phi", matrix_to_json(spec.phi)},
              {"v", matrix_to_json(spec.v)},
              {"sigma", matrix_to_json(spec.sigma_true)},
              {"gamma", matrix_to_json(spec.gamma_true)},
              {"true_coefficient", true_bopt_coefficient(spec)}};
}

// ---------------------------------------------------------------------------

std::string_view to_string(BatchRule rule) {
  switch (rule) {
    case BatchRule::kAr: return "ar";
    case BatchRule::kNp: return "np";
    case BatchRule::kLag: return "lag";
    case BatchRule::kCubeRoot: return "n13";
    case BatchRule::kSquareRoot: return "n12";
  }
  return "unknown";
}

BatchRule parse_batch_rule(std::string_view name) {
  if (name == "ar") return BatchRule::kAr;
  if (name == "np") return BatchRule::kNp;
  if (name == "lag") return BatchRule::kLag;
  if (name == "n13") return BatchRule::kCubeRoot;
  if (name == "n12") return BatchRule::kSquareRoot;
  throw Error(ErrorCode::kInvalidArgument, "unknown batch rule '" + std::string(name) + "'");
}

std::int64_t integer_root_floor(std::int64_t n, int degree) {
  auto r = static_cast<std::int64_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / degree)));
  const auto power = [degree](std::int64_t x) {
    std::int64_t v = 1;
    for (int i = 0; i < degree; ++i) v *= x;
    return v;
  };
  while (r > 0 && power(r) > n) --r;
  while (power(r + 1) <= n) ++r;
  return r;
}

void ExperimentConfig::validate() const {
  const auto fail = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, "config: " + m); };
  if (p < 1) fail("p must be >= 1");
  if (n_pilot < 100) fail("n_pilot must be >= 100");
  if (!estimators.empty() && n_final < 4) fail("n_final must be >= 4");
  if (replications < 1) fail("replications must be >= 1");
  if (rho_grid.empty()) fail("rho_grid must not be empty");
  for (const double r : rho_grid) {
    if (!(r > 0.0 && r < 1.0)) fail("rho values must lie in (0, 1)");
  }
  if (!(level > 0.0 && level < 1.0)) fail("level must lie in (0, 1)");
  if (!estimators.empty() && rules.empty()) fail("at least one batch rule is required");
  for (const Method m : estimators) {
    if (m == Method::kGeneralizedOBM) fail("gobm is not a replication estimator; use obm or ft-obm");
  }
}

namespace {

std::string trim_copy(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim_copy(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream ss(value);
  T v{};
  ss >> v;
  if (!ss || !ss.eof()) {
    throw Error(ErrorCode::kParse, "config: bad value '" + value + "' for " + key);
  }
  return v;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim_copy(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim_copy(line.substr(0, eq));
    const std::string value = trim_copy(line.substr(eq + 1));
    if (key == "p") {
      c.p = parse_number<int>(key, value);
    } else if (key == "n_pilot") {
      c.n_pilot = parse_number<std::int64_t>(key, value);
    } else if (key == "n_final") {
      c.n_final = parse_number<std::int64_t>(key, value);
    } else if (key == "replications") {
      c.replications = parse_number<int>(key, value);
    } else if (key == "rho_grid") {
      c.rho_grid.clear();
      for (const auto& item : split_list(value)) c.rho_grid.push_back(parse_number<double>(key, item));
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "estimators") {
      c.estimators.clear();
      for (const auto& item : split_list(value)) c.estimators.push_back(parse_method(item));
    } else if (key == "methods") {
      c.rules.clear();
      for (const auto& item : split_list(value)) c.rules.push_back(parse_batch_rule(item));
    } else if (key == "level") {
      c.level = parse_number<double>(key, value);
    } else if (key == "max_order") {
      c.max_order = parse_number<int>(key, value);
    } else if (key == "threads") {
      c.threads = parse_number<int>(key, value);
    } else {
      throw Error(ErrorCode::kParse, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse_config(in);
}

Json config_to_json(const ExperimentConfig& c) {
  Json estimators = Json::array();
  for (const Method m : c.estimators) estimators.push_back(std::string(to_string(m)));
  Json rules = Json::array();
  for (const BatchRule r : c.rules) rules.push_back(std::string(to_string(r)));
  return Json{{"p", c.p},
              {"n_pilot", c.n_pilot},
              {"n_final", c.n_final},
              {"replications", c.replications},
              {"rho_grid", c.rho_grid},
              {"seed", c.seed},
              {"estimators", estimators},
              {"methods", rules},
              {"level", c.level},
              {"max_order", c.max_order}};
}

const CellSummary& RhoSummary::cell(Method estimator, BatchRule rule) const {
  for (const auto& c : cells) {
    if (c.estimator == estimator && c.rule == rule) return c;
  }
  throw Error(ErrorCode::kInvalidArgument, "no summary cell for " + std::string(to_string(estimator)) + "/" +
                                               std::string(to_string(rule)));
}

namespace {

std::string reason(const Error& e) { return std::string(to_string(e.code())); }

// Stream roles within a replication.
constexpr std::uint64_t kPilotStream = 0;
constexpr std::uint64_t kFinalStream = 1;

ReplicationRecord run_replication(const ExperimentConfig& cfg, const Var1Spec& spec, std::size_t rho_index,
                                  int replication) {
  ReplicationRecord rec;
  rec.rho_index = rho_index;
  rec.replication = replication;
  const auto r = static_cast<std::uint64_t>(replication);
  const ChainMatrix pilot = simulate(spec, cfg.n_pilot, cfg.seed, {rho_index, r, kPilotStream});

  std::optional<PilotEstimates> ar;
  std::optional<PilotEstimates> np;
  std::optional<std::int64_t> lag_b;
  try {
    ar = ar_pilot(pilot, cfg.max_order);
    rec.ar_coefficient = bopt_coefficient(ar->sigma_p, ar->gamma_p);
  } catch (const Error& e) {
    rec.ar_failure = reason(e);
  }
  try {
    np = nonparametric_pilot(pilot);
    rec.np_coefficient = bopt_coefficient(np->sigma_p, np->gamma_p);
  } catch (const Error& e) {
    rec.np_failure = reason(e);
  }
  const bool need_lag = std::find(cfg.rules.begin(), cfg.rules.end(), BatchRule::kLag) != cfg.rules.end();
  if (need_lag && !cfg.estimators.empty()) {
    try {
      lag_b = lag_based_batchsize(pilot, true).b;
    } catch (const Error& e) {
      rec.lag_failure = reason(e);
    }
  }
  if (cfg.estimators.empty()) return rec;

  const ChainMatrix final_chain = simulate(spec, cfg.n_final, cfg.seed, {rho_index, r, kFinalStream});
  const Eigen::VectorXd mean = mean_vector(final_chain);
  const Eigen::VectorXd truth = Eigen::VectorXd::Zero(cfg.p);
  const std::int64_t n = cfg.n_final;

  for (const Method est : cfg.estimators) {
    const Family fam = family_of(est);
    const bool ft = is_flat_top(est);
    for (const BatchRule rule : cfg.rules) {
      EstimatorOutcome out;
      out.estimator = est;
      out.rule = rule;
      try {
        switch (rule) {
          case BatchRule::kAr:
            if (!ar) throw Error(ErrorCode::kDegenerate, "ar pilot: " + rec.ar_failure);
            out.b = optimal_batchsize(*ar, n, WindowKind::kBartlett, fam, ft).b;
            break;
          case BatchRule::kNp:
            if (!np) throw Error(ErrorCode::kDegenerate, "np pilot: " + rec.np_failure);
            out.b = optimal_batchsize(*np, n, WindowKind::kBartlett, fam, ft).b;
            break;
          case BatchRule::kLag:
            if (!lag_b) throw Error(ErrorCode::kNoCutoff, "lag rule: " + rec.lag_failure);
            out.b = *lag_b;
            break;
          case BatchRule::kCubeRoot:
          case BatchRule::kSquareRoot: {
            std::int64_t b = integer_root_floor(n, rule == BatchRule::kCubeRoot ? 3 : 2);
            if (ft && b % 2 != 0) ++b;
            out.b = b;
            break;
          }
        }
        const CovEstimate cov = estimate(final_chain, est, out.b);
        out.sq_error = (cov.sigma - spec.sigma_true).array().square().mean();
        out.estimated = true;
        const ConfidenceRegion region = confidence_region(mean, cov, n, cfg.level);
        out.covered = region.contains(truth);
      } catch (const Error& e) {
        out.failure = out.estimated ? "indefinite" : reason(e);
      }
      rec.outcomes.push_back(std::move(out));
    }
  }
  return rec;
}

void summarize_coefficient(CoefficientSummary& s, const std::vector<std::optional<double>>& values,
                           double truth) {
  double sum = 0.0;
  double sq = 0.0;
  for (const auto& v : values) {
    if (!v) {
      ++s.failures;
      continue;
    }
    ++s.count;
    sum += *v;
    sq += (*v - truth) * (*v - truth);
  }
  if (s.count > 0) {
    s.mean = sum / s.count;
    s.mse = sq / s.count;
    s.relative_rmse = truth > 0.0 ? std::sqrt(s.mse) / truth : std::sqrt(s.mse);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  result.config = config;

  std::vector<Var1Spec> specs;
  for (const double rho : config.rho_grid) specs.push_back(make_var1(make_phi(config.p, rho, config.seed)));

  const auto cells = static_cast<std::int64_t>(config.rho_grid.size());
  const std::int64_t total = cells * config.replications;
  result.records.resize(static_cast<std::size_t>(total));

  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t task = 0; task < total; ++task) {
    const auto rho_index = static_cast<std::size_t>(task / config.replications);
    const auto rep = static_cast<int>(task % config.replications);
    result.records[static_cast<std::size_t>(task)] = run_replication(config, specs[rho_index], rho_index, rep);
  }

  for (std::size_t c = 0; c < specs.size(); ++c) {
    RhoSummary s;
    s.rho = config.rho_grid[c];
    s.spec = specs[c];
    s.true_coefficient = true_bopt_coefficient(specs[c]);
    std::vector<std::optional<double>> ar_vals;
    std::vector<std::optional<double>> np_vals;
    for (const auto& rec : result.records) {
      if (rec.rho_index != c) continue;
      ar_vals.push_back(rec.ar_coefficient);
      np_vals.push_back(rec.np_coefficient);
    }
    summarize_coefficient(s.ar, ar_vals, s.true_coefficient);
    summarize_coefficient(s.np, np_vals, s.true_coefficient);

    for (const Method est : config.estimators) {
      for (const BatchRule rule : config.rules) {
        CellSummary cell;
        cell.estimator = est;
        cell.rule = rule;
        double mse_sum = 0.0;
        double b_sum = 0.0;
        for (const auto& rec : result.records) {
          if (rec.rho_index != c) continue;
          for (const auto& o : rec.outcomes) {
            if (o.estimator != est || o.rule != rule) continue;
            if (o.estimated) {
              ++cell.estimated;
              mse_sum += o.sq_error;
              b_sum += static_cast<double>(o.b);
            }
            if (o.covered) {
              ++cell.coverage_trials;
              if (*o.covered) ++cell.covered;
            } else {
              ++cell.failures;
            }
          }
        }
        if (cell.estimated > 0) {
          cell.mean_mse = mse_sum / cell.estimated;
          cell.mean_b = b_sum / cell.estimated;
        }
        s.cells.push_back(cell);
      }
    }
    result.summaries.push_back(std::move(s));
  }
  return result;
}

void write_records_csv(const ExperimentResult& result, std::ostream& out) {
  const auto num = [](double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
  };
  const auto opt = [&num](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  out << "rho,replication,estimator,method,b,sq_error,covered,failure,ar_coefficient,np_coefficient\n";
  for (const auto& rec : result.records) {
    const double rho = result.config.rho_grid[rec.rho_index];
    for (const auto& o : rec.outcomes) {
      out << num(rho) << ',' << rec.replication << ',' << to_string(o.estimator) << ',' << to_string(o.rule)
          << ',' << o.b << ',' << (o.estimated ? num(o.sq_error) : std::string()) << ','
          << (o.covered ? (*o.covered ? "1" : "0") : "") << ',' << o.failure << ',' << opt(rec.ar_coefficient)
          << ',' << opt(rec.np_coefficient) << '\n';
    }
    if (rec.outcomes.empty()) {
      out << num(rho) << ',' << rec.replication << ",,,,,,," << opt(rec.ar_coefficient) << ','
          << opt(rec.np_coefficient) << '\n';
    }
  }
}

Json summary_json(const ExperimentResult& result) {
  const auto coef = [](const CoefficientSummary& s) {
    return Json{{"mean", s.mean}, {"mse", s.mse}, {"relative_rmse", s.relative_rmse}, {"count", s.count},
                {"failures", s.failures}};
  };
  Json by_rho = Json::object();
  for (const auto& s : result.summaries) {
    Json estimators = Json::object();
    for (const auto& cell : s.cells) {
      estimators[std::string(to_string(cell.estimator))][std::string(to_string(cell.rule))] =
          Json{{"mean_mse", cell.mean_mse},     {"mean_b", cell.mean_b},
               {"coverage", cell.coverage()},   {"covered", cell.covered},
               {"coverage_trials", cell.coverage_trials}, {"estimated", cell.estimated},
               {"failures", cell.failures}};
    }
    std::ostringstream key;
    key << s.rho;
    by_rho[key.str()] = Json{{"true_coefficient", s.true_coefficient},
                             {"sigma_true", matrix_to_json(s.spec.sigma_true)},
                             {"coefficient", {{"ar", coef(s.ar)}, {"np", coef(s.np)}}},
                             {"estimators", std::move(estimators)}};
  }
  return Json{{"command", "replicate"},
              {"version", kVersion},
              {"config", config_to_json(result.config)},
              {"results", std::move(by_rho)}};
}

}  // namespace bmse
