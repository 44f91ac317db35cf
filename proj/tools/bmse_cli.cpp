// Command-line front end: estimate, batchsize, simulate, replicate.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bmse/harness.hpp"

namespace {

using bmse::Error;
using bmse::ErrorCode;

std::vector<std::string> split_commas(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
  }
  return out;
}

void write_json_file(const bmse::Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failure on " + path);
}

Eigen::MatrixXd parse_phi(const std::string& text) {
  std::vector<double> values;
  for (const auto& item : split_commas({text})) values.push_back(std::stod(item));
  const auto p = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(values.size()))));
  if (p * p != static_cast<Eigen::Index>(values.size()) || p == 0) {
    throw Error(ErrorCode::kInvalidArgument, "--phi needs p*p comma-separated values (row-major)");
  }
  Eigen::MatrixXd phi(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) phi(i, j) = values[static_cast<std::size_t>(i * p + j)];
  }
  return phi;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch means estimation of Monte Carlo standard errors"};
  app.set_version_flag("--version", std::string(bmse::kVersion));
  app.require_subcommand(1);

  // estimate
  auto* est_cmd = app.add_subcommand("estimate", "Estimate the asymptotic covariance matrix of a chain");
  std::string est_in;
  bool est_header = false;
  std::string est_estimator = "obm";
  std::string est_window = "bartlett";
  std::int64_t est_b = 0;
  std::string est_method;
  int est_order = 0;
  est_cmd->add_option("--in", est_in, "Chain CSV file")->required()->check(CLI::ExistingFile);
  est_cmd->add_flag("--header", est_header, "First row is a header");
  est_cmd->add_option("--estimator", est_estimator, "bm, obm, gobm, ft-bm, ft-obm")->capture_default_str();
  est_cmd->add_option("--window", est_window, "Window for gobm: bartlett, flat-top, tukey-hanning")
      ->capture_default_str();
  auto* b_opt = est_cmd->add_option("--b", est_b, "Explicit batch size");
  auto* m_opt = est_cmd->add_option("--method", est_method, "Batch size selection: ar, np, lag");
  b_opt->excludes(m_opt);
  est_cmd->add_option("--max-order", est_order, "Largest AR order (default floor(10 log10 n))");

  // batchsize
  auto* bs_cmd = app.add_subcommand("batchsize", "Select batch sizes for a chain");
  std::string bs_in;
  bool bs_header = false;
  std::vector<std::string> bs_methods{"ar"};
  std::string bs_family = "obm";
  std::string bs_window = "bartlett";
  bool bs_ft = false;
  int bs_order = 0;
  bs_cmd->add_option("--in", bs_in, "Chain CSV file")->required()->check(CLI::ExistingFile);
  bs_cmd->add_flag("--header", bs_header, "First row is a header");
  bs_cmd->add_option("--method", bs_methods, "Comma-separated subset of ar, np, lag")->delimiter(',');
  bs_cmd->add_option("--family", bs_family, "bm or obm")->capture_default_str();
  bs_cmd->add_option("--window", bs_window, "bartlett or flat-top")->capture_default_str();
  bs_cmd->add_flag("--flat-top", bs_ft, "Round for a flat-top estimator (even b)");
  bs_cmd->add_option("--max-order", bs_order, "Largest AR order");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a VAR(1) chain with ground-truth sidecar");
  int sim_p = 3;
  double sim_rho = 0.9;
  std::int64_t sim_n = 10000;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  std::string sim_sidecar;
  std::string sim_phi;
  sim_cmd->add_option("--p", sim_p, "Dimension")->capture_default_str();
  sim_cmd->add_option("--rho", sim_rho, "Scale of Phi in [0, 1)")->capture_default_str();
  sim_cmd->add_option("--phi", sim_phi, "Explicit Phi, row-major comma-separated (overrides --p/--rho)");
  sim_cmd->add_option("--n", sim_n, "Chain length")->capture_default_str();
  sim_cmd->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "Output CSV path")->required();
  sim_cmd->add_option("--sidecar", sim_sidecar, "Ground truth JSON path (default <out>.json)");

  // replicate
  auto* rep_cmd = app.add_subcommand("replicate", "Run the VAR(1) replication experiment");
  std::string rep_config;
  std::string rep_csv = "replications.csv";
  std::string rep_summary = "summary.json";
  int rep_threads = 0;
  rep_cmd->add_option("--config", rep_config, "key = value config file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  rep_cmd->add_option("--out", rep_csv, "Per-replication CSV")->capture_default_str();
  rep_cmd->add_option("--summary", rep_summary, "Summary JSON")->capture_default_str();
  rep_cmd->add_option("--threads", rep_threads, "Worker threads (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << bmse::Json{{"error", {{"code", "usage"}, {"message", e.what()}}}}.dump() << '\n';
    return 2;
  }

  try {
    if (*est_cmd) {
      bmse::EstimateOptions opts;
      opts.estimator = bmse::parse_method(est_estimator);
      opts.window = bmse::parse_window_kind(est_window);
      opts.max_order = est_order;
      if (*b_opt) opts.b = est_b;
      if (*m_opt) opts.selection = bmse::parse_selection_method(est_method);
      if (!opts.b && !opts.selection) {
        throw Error(ErrorCode::kInvalidArgument, "give exactly one of --b or --method");
      }
      const auto chain = bmse::load_csv(est_in, est_header);
      std::cout << bmse::estimate_report(chain, opts).dump(2) << '\n';
    } else if (*bs_cmd) {
      bmse::BatchsizeOptions opts;
      opts.methods.clear();
      for (const auto& m : split_commas(bs_methods)) opts.methods.push_back(bmse::parse_selection_method(m));
      opts.family = bmse::parse_family(bs_family);
      opts.window = bmse::parse_window_kind(bs_window);
      opts.flat_top_target = bs_ft;
      opts.max_order = bs_order;
      const auto chain = bmse::load_csv(bs_in, bs_header);
      std::cout << bmse::batchsize_report(chain, opts).dump(2) << '\n';
    } else if (*sim_cmd) {
      const Eigen::MatrixXd phi =
          sim_phi.empty() ? bmse::make_phi(sim_p, sim_rho, sim_seed) : parse_phi(sim_phi);
      const bmse::Var1Spec spec = bmse::make_var1(phi);
      const auto chain = bmse::simulate(spec, sim_n, sim_seed);
      bmse::write_csv(chain, sim_out);
      bmse::Json sidecar = bmse::var1_sidecar(spec, sim_phi.empty() ? sim_rho : spec.spectral_radius, sim_seed, sim_n);
      write_json_file(sidecar, sim_sidecar.empty() ? sim_out + ".json" : sim_sidecar);
      std::cout << sidecar.dump(2) << '\n';
    } else if (*rep_cmd) {
      bmse::ExperimentConfig config = rep_config.empty() ? bmse::ExperimentConfig{} : bmse::load_config(rep_config);
      if (rep_threads > 0) config.threads = rep_threads;
      const auto result = bmse::run_experiment(config);
      std::ofstream csv(rep_csv, std::ios::binary);
      if (!csv) throw Error(ErrorCode::kIo, "cannot open " + rep_csv + " for writing");
      bmse::write_records_csv(result, csv);
      const bmse::Json summary = bmse::summary_json(result);
      write_json_file(summary, rep_summary);
      std::cout << summary.dump(2) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << bmse::error_json(e).dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << bmse::Json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump() << '\n';
    return 1;
  }
  return 0;
}
