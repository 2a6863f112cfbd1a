#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peerlab/estimators.hpp"
#include "peerlab/genmodels.hpp"
#include "peerlab/lim.hpp"

namespace peerlab {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Model { Bernoulli, Unrestricted, Restricted };

std::string_view to_string(Model m);
// Case-insensitive. Throws InvalidConfig.
Model parse_model(std::string_view name);

struct ExperimentConfig {
  Model model = Model::Bernoulli;
  std::vector<std::size_t> n_grid;
  std::size_t reps = 1;
  std::uint64_t base_seed = 0;
  std::vector<Estimator> estimators;
  LimParameters params;
  DcsbmConfig dcsbm;
  double covariate_p = 0.5;  // Bernoulli model only
  std::string output_dir = "out";
  bool record_timing = false;  // when false, wall_ms is written as 0

  // Throws InvalidConfig.
  void validate() const;
  std::size_t covariate_count() const;
};

// Desk-scale grid {100, 200, 400, 800, 1600} with 50 reps.
ExperimentConfig default_config(Model model);

// The full grid {100, 163, ..., 3000}, 100 reps.
std::vector<std::size_t> full_n_grid();
inline constexpr std::size_t kFullReps = 100;

// JSON mirroring ExperimentConfig. Keys present override default_config of
// the file's "model" (or `fallback` when absent). Unknown keys throw InvalidConfig.
ExperimentConfig config_from_json(std::string_view text, Model fallback);
ExperimentConfig load_config(const std::string& path, Model fallback);
std::string config_to_json(const ExperimentConfig& config);

// Coefficients whose design columns are asymptotically colinear:
// alpha, beta and the delta block for Bernoulli and Unrestricted, none for Restricted.
bool is_aliased(Model model, std::string_view coefficient);

// Coefficients the model fixes at zero and the estimators therefore drop from
// the regression: the zero entries of delta in the Restricted model.
std::vector<std::string> constrained_coefficients(const ExperimentConfig& config);

std::uint64_t rep_seed(std::uint64_t base_seed, std::size_t n, std::size_t rep);

struct CoefficientResult {
  std::string label;
  double truth = 0.0;
  double estimate = 0.0;
  double sq_error = 0.0;
  bool aliased = false;
  double vif = 0.0;
};

struct RepRecord {
  Model model = Model::Bernoulli;
  Estimator estimator = Estimator::Ols;
  std::size_t n = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::vector<CoefficientResult> coefficients;
  double gt_dev = 0.0;
  double gy_dev = 0.0;
  std::size_t distinct_eigs = 0;
  double sigma_min = 0.0;
  double wall_ms = 0.0;
  std::string status = "ok";
};

// Order used for the sorted output: model, estimator, n, rep.
bool record_less(const RepRecord& a, const RepRecord& b);

// Everything drawn for one (config, n, seed).
struct Replicate {
  DcsbmSample sample;
  AveragingOperator op;
  Matrix T;
  Outcomes outcomes;
  DesignMatrix design;  // full [1 | GY | T | GT]
  DesignMatrix fitted;  // design minus constrained columns
  Vector tau;  // true covariate mean
};

Replicate draw_replicate(const ExperimentConfig& config, std::size_t n, std::uint64_t seed);

struct RunOptions {
  unsigned workers = 1;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

// One record per (n, rep, estimator), sorted by record_less. Per-rep
// failures become records with status "error: ...".
std::vector<RepRecord> run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

struct SummaryRow {
  Model model = Model::Bernoulli;
  Estimator estimator = Estimator::Ols;
  std::size_t n = 0;
  std::string coefficient;
  bool aliased = false;
  double mean_mse = 0.0;
  double median_mse = 0.0;
  double median_vif = 0.0;
  std::size_t count = 0;  // contributing ok records
};

using SummaryTable = std::vector<SummaryRow>;

// Groups ok records by (model, estimator, n, coefficient).
SummaryTable summarize(const std::vector<RepRecord>& records);

double median(std::vector<double> values);

inline constexpr std::string_view kRecordsHeader =
    "model,estimator,n,rep,seed,coefficient,truth,estimate,sq_error,aliased,vif,gt_dev,gy_dev,"
    "distinct_eigs,sigma_min,wall_ms,status";
inline constexpr std::string_view kSummaryHeader =
    "model,estimator,n,coefficient,aliased,mean_mse,median_mse,median_vif";

void write_records_csv(std::ostream& out, const std::vector<RepRecord>& records);
std::vector<RepRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const SummaryTable& table);

// Writes records.csv, summary.csv and manifest.json into config.output_dir.
void write_outputs(const ExperimentConfig& config, const std::vector<RepRecord>& records);

}  // namespace peerlab
