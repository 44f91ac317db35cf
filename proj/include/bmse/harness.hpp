#ifndef BMSE_HARNESS_HPP
#define BMSE_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bmse/batch_select.hpp"
#include "bmse/chain.hpp"
#include "bmse/estimators.hpp"
#include "bmse/var1.hpp"

namespace bmse {

inline constexpr const char* kVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Single-chain reports backing the `estimate`, `batchsize` and `simulate`
// subcommands.

struct EstimateOptions {
  Method estimator = Method::kOBM;
  WindowKind window = WindowKind::kBartlett;  // generalized OBM only
  std::optional<std::int64_t> b;
  std::optional<SelectionMethod> selection;
  int max_order = 0;
};

Json estimate_report(const ChainMatrix& chain, const EstimateOptions& options);

struct BatchsizeOptions {
  std::vector<SelectionMethod> methods{SelectionMethod::kArFit};
  Family family = Family::kOBM;
  WindowKind window = WindowKind::kBartlett;
  bool flat_top_target = false;
  int max_order = 0;
};

Json batchsize_report(const ChainMatrix& chain, const BatchsizeOptions& options);

/// Ground-truth sidecar for a simulated chain.
Json var1_sidecar(const Var1Spec& spec, double rho, std::uint64_t seed, std::int64_t n);

Json matrix_to_json(const Eigen::MatrixXd& m);
Json vector_to_json(const Eigen::VectorXd& v);

Json error_json(const Error& e);

// ---------------------------------------------------------------------------
// Replication engine for the VAR(1) experiments.

/// Batch size rule evaluated in a replication: the three selectors plus the
/// fixed floor(n^(1/3)) and floor(n^(1/2)) baselines.
enum class BatchRule { kAr, kNp, kLag, kCubeRoot, kSquareRoot };
std::string_view to_string(BatchRule rule);
BatchRule parse_batch_rule(std::string_view name);

struct ExperimentConfig {
  int p = 3;
  std::int64_t n_pilot = 10000;
  std::int64_t n_final = 100000;
  int replications = 200;
  std::vector<double> rho_grid{0.8, 0.85, 0.9};
  std::uint64_t seed = 20190601;
  std::vector<Method> estimators{Method::kBM, Method::kOBM, Method::kFlatTopBM, Method::kFlatTopOBM};
  std::vector<BatchRule> rules{BatchRule::kAr, BatchRule::kNp, BatchRule::kLag, BatchRule::kCubeRoot,
                               BatchRule::kSquareRoot};
  double level = 0.9;
  int max_order = 0;
  int threads = 0;  // 0: OpenMP default

  void validate() const;
};

/// Plain-text `key = value` lines; `#` starts a comment; lists are
/// comma-separated. Unknown keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
Json config_to_json(const ExperimentConfig& config);

std::int64_t integer_root_floor(std::int64_t n, int degree);

struct EstimatorOutcome {
  Method estimator = Method::kBM;
  BatchRule rule = BatchRule::kAr;
  std::int64_t b = 0;
  double sq_error = 0.0;  // mean over all p^2 entries
  bool estimated = false;
  std::optional<bool> covered;  // unset when the region could not be built
  std::string failure;          // reason code, empty on success
};

struct ReplicationRecord {
  std::size_t rho_index = 0;
  int replication = 0;
  std::optional<double> ar_coefficient;
  std::optional<double> np_coefficient;
  std::string ar_failure;
  std::string np_failure;
  std::string lag_failure;
  std::vector<EstimatorOutcome> outcomes;
};

struct CellSummary {
  Method estimator = Method::kBM;
  BatchRule rule = BatchRule::kAr;
  double mean_mse = 0.0;
  double mean_b = 0.0;
  int estimated = 0;
  int covered = 0;
  int coverage_trials = 0;
  int failures = 0;
  double coverage() const { return coverage_trials > 0 ? static_cast<double>(covered) / coverage_trials : 0.0; }
};

struct CoefficientSummary {
  double mean = 0.0;
  double mse = 0.0;
  double relative_rmse = 0.0;  // sqrt(mse) / true coefficient
  int count = 0;
  int failures = 0;
};

struct RhoSummary {
  double rho = 0.0;
  double true_coefficient = 0.0;
  Var1Spec spec;
  CoefficientSummary ar;
  CoefficientSummary np;
  std::vector<CellSummary> cells;

  const CellSummary& cell(Method estimator, BatchRule rule) const;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ReplicationRecord> records;  // ordered by (rho index, replication)
  std::vector<RhoSummary> summaries;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Long format: one row per replication x rule x estimator.
void write_records_csv(const ExperimentResult& result, std::ostream& out);
Json summary_json(const ExperimentResult& result);

}  // namespace bmse

#endif  // BMSE_HARNESS_HPP
