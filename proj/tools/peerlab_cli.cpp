// peerlab command-line tool: simulate, summarize, diagnose, sample.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "covariates_csv.hpp"
#include "peerlab/error.hpp"
#include "peerlab/genmodels.hpp"
#include "peerlab/harness.hpp"
#include "peerlab/identify.hpp"
#include "peerlab/lim.hpp"
#include "peerlab/netcore.hpp"

namespace {

using nlohmann::json;
using namespace peerlab;

std::vector<std::size_t> parse_grid(const std::string& text) {
  std::vector<std::size_t> grid;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    grid.push_back(std::stoul(item));
  }
  return grid;
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct SimulateArgs {
  std::string model = "bernoulli";
  std::string config;
  std::string out;
  std::optional<std::size_t> reps;
  std::string n_grid;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::vector<std::string> estimators;
  bool full_scale = false;
  bool record_timing = false;
  bool quiet = false;
};

int run_simulate(const SimulateArgs& a) {
  const Model model = parse_model(a.model);
  ExperimentConfig cfg = a.config.empty() ? default_config(model) : load_config(a.config, model);
  if (a.full_scale) {
    cfg.n_grid = full_n_grid();
    cfg.reps = kFullReps;
  }
  if (!a.out.empty()) cfg.output_dir = a.out;
  if (a.reps) cfg.reps = *a.reps;
  if (!a.n_grid.empty()) cfg.n_grid = parse_grid(a.n_grid);
  if (a.seed) cfg.base_seed = *a.seed;
  if (!a.estimators.empty()) {
    cfg.estimators.clear();
    for (const auto& e : a.estimators) cfg.estimators.push_back(parse_estimator(e));
  }
  if (a.record_timing) cfg.record_timing = true;
  cfg.validate();

  RunOptions opts;
  opts.workers = a.workers;
  if (!a.quiet)
    opts.progress = [](std::size_t done, std::size_t total) {
      std::cerr << "\r" << done << "/" << total << " replicates" << std::flush;
      if (done == total) std::cerr << '\n';
    };
  const auto records = run_experiment(cfg, opts);
  write_outputs(cfg, records);
  std::size_t errors = 0;
  for (const auto& r : records)
    if (r.status.rfind("ok", 0) != 0) ++errors;
  std::cout << "wrote " << records.size() << " records (" << errors << " errors) to "
            << cfg.output_dir << '\n';
  return 0;
}

int run_summarize(const std::string& in_dir, const std::string& out_path) {
  const std::string path = in_dir + "/records.csv";
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  const auto table = summarize(read_records_csv(in));
  std::ofstream out(out_path);
  if (!out) throw Error("cannot write " + out_path);
  write_summary_csv(out, table);
  std::cout << "wrote " << table.size() << " summary rows to " << out_path << '\n';
  return 0;
}

int run_diagnose(const std::string& graph_path, const std::string& cov_path,
                 const std::string& outcome_path, bool skip_power_rank) {
  const Graph graph = read_edge_list_file(graph_path);
  const Matrix T = tools::read_covariates_csv_file(cov_path);
  if (static_cast<std::size_t>(T.rows()) != graph.size())
    throw DimensionMismatch("covariate rows (" + std::to_string(T.rows()) +
                            ") differ from node count (" + std::to_string(graph.size()) + ")");
  const AveragingOperator op(graph);

  DesignMatrix design;
  if (!outcome_path.empty()) {
    const Matrix y = tools::read_covariates_csv_file(outcome_path);
    if (y.cols() != 1 || y.rows() != T.rows())
      throw DimensionMismatch("outcomes must be a single column with one row per node");
    design = build_design(op, T, y.col(0));
  } else {
    const Eigen::Index p = T.cols();
    design.W.resize(T.rows(), 2 * p + 1);
    design.W.col(0).setOnes();
    design.W.middleCols(1, p) = T;
    design.W.middleCols(1 + p, p) = op.apply(T);
    const auto labels = coefficient_labels(static_cast<std::size_t>(p));
    design.labels = {labels[0]};
    design.labels.insert(design.labels.end(), labels.begin() + 2, labels.end());
  }

  ReportOptions opts;
  opts.power_rank = !skip_power_rank;
  const Vector spectrum = op.eigenvalues();
  opts.eigenvalues = &spectrum;
  const DiagnosticsReport r = colinearity_report(op, design, T, std::nullopt, opts);

  json vif = json::object();
  for (std::size_t k = 0; k < design.labels.size(); ++k) vif[design.labels[k]] = r.vif[k];
  json out = {
      {"n", graph.size()},
      {"covariates", T.cols()},
      {"distinct_eigs", r.distinct_eigs},
      {"identified", r.identified},
      {"lambda_min", spectrum(spectrum.size() - 1)},
      {"lambda_max", spectrum(0)},
      {"frob_sq", r.frob_sq},
      {"rate_bound", r.rate_bound},
      {"gt_dev", r.gt_dev},
      {"gy_dev", number_or_null(r.gy_dev)},
      {"sigma_min", r.sigma_min},
      {"vif", vif},
      {"vif_rank_deficient", r.vif_rank_deficient},
  };
  if (r.ig2_rank) {
    out["ig2_rank"] = *r.ig2_rank;
    out["ig2_independent"] = *r.ig2_rank == 3;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_sample(std::size_t n, std::uint64_t seed, const std::string& graph_path,
               const std::string& latent_path, const std::string& bern_path) {
  const DcsbmSample s = sample_dcsbm(four_block_config(), n, seed, IsolatedPolicy::Regenerate);
  write_edge_list_file(graph_path, s.graph);
  if (!latent_path.empty()) {
    std::ofstream out(latent_path);
    write_latent_csv(out, s.latent);
  }
  if (!bern_path.empty()) {
    const Vector t = sample_bernoulli_covariates(0.5, n, seed ^ 0x5bd1e995ULL);
    std::ofstream out(bern_path);
    out << "node,t\n";
    for (Eigen::Index i = 0; i < t.size(); ++i) out << i << ',' << t(i) << '\n';
  }
  std::cout << "sampled n=" << n << " rho=" << s.rho_used << " edges=" << s.graph.edges().size()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"peerlab: linear-in-means peer-effects simulation and diagnostics"};
  app.set_version_flag("--version", std::string(peerlab::kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the Monte Carlo study for one model");
  simulate->add_option("--model", sim.model, "bernoulli | unrestricted | restricted")
      ->capture_default_str();
  simulate->add_option("--config", sim.config, "JSON config file")->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_option("--reps", sim.reps, "Replicates per n");
  simulate->add_option("--n-grid", sim.n_grid, "Comma-separated node counts");
  simulate->add_option("--seed", sim.seed, "Base seed");
  simulate->add_option("--workers", sim.workers, "Worker threads")->capture_default_str();
  simulate->add_option("--estimators", sim.estimators, "Subset of ols, tsls, qmle")->delimiter(',');
  simulate->add_flag("--full-scale", sim.full_scale, "Full grid to n=3000 with 100 reps");
  simulate->add_flag("--record-timing", sim.record_timing,
                     "Write wall-clock times (output is then not byte-reproducible)");
  simulate->add_flag("--quiet", sim.quiet, "No progress output");

  std::string in_dir, out_csv;
  auto* summ = app.add_subcommand("summarize", "Aggregate records.csv into a summary table");
  summ->add_option("--in", in_dir, "Directory containing records.csv")->required();
  summ->add_option("--out", out_csv, "Summary CSV path")->required();

  std::string graph_path, cov_path, outcome_path;
  bool skip_power_rank = false;
  auto* diag = app.add_subcommand("diagnose", "Identification and colinearity diagnostics");
  diag->add_option("--graph", graph_path, "Edge-list file")->required()->check(CLI::ExistingFile);
  diag->add_option("--covariates", cov_path, "Covariate CSV")->required()->check(CLI::ExistingFile);
  diag->add_option("--outcomes", outcome_path, "Optional outcome CSV (one column)")
      ->check(CLI::ExistingFile);
  diag->add_flag("--skip-power-rank", skip_power_rank, "Skip the rank of {I, G, G^2}");

  std::size_t sample_n = 200;
  std::uint64_t sample_seed = 1;
  std::string sample_graph, sample_latent, sample_bern;
  auto* smp = app.add_subcommand("sample", "Draw a four-block DCSBM network");
  smp->add_option("--n", sample_n, "Node count")->capture_default_str();
  smp->add_option("--seed", sample_seed, "Seed")->capture_default_str();
  smp->add_option("--graph", sample_graph, "Edge-list output")->required();
  smp->add_option("--latent", sample_latent, "Latent-position CSV output");
  smp->add_option("--bernoulli", sample_bern, "Bernoulli(0.5) covariate CSV output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run_simulate(sim);
    if (*summ) return run_summarize(in_dir, out_csv);
    if (*diag) return run_diagnose(graph_path, cov_path, outcome_path, skip_power_rank);
    if (*smp) return run_sample(sample_n, sample_seed, sample_graph, sample_latent, sample_bern);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
