#include "peerlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "peerlab/error.hpp"
#include "peerlab/identify.hpp"
#include "peerlab/seed.hpp"

namespace peerlab {
namespace {

using json = nlohmann::json;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

LimParameters model_params(Model model) {
  LimParameters p;
  p.alpha = 3.0;
  p.beta = 0.2;
  p.sigma = 0.1;
  switch (model) {
    case Model::Bernoulli:
      p.gamma = Vector::Constant(1, 4.0);
      p.delta = Vector::Constant(1, 2.0);
      break;
    case Model::Unrestricted:
      p.gamma = (Vector(4) << 1.5, 2.5, 3.5, 4.5).finished();
      p.delta = (Vector(4) << 2.0, 2.0, 2.0, 2.0).finished();
      break;
    case Model::Restricted:
      p.gamma = (Vector(4) << 1.5, 2.5, 3.5, 4.5).finished();
      p.delta = (Vector(4) << 0.0, 0.0, 2.0, 2.0).finished();
      break;
  }
  return p;
}

// --- JSON helpers -----------------------------------------------------------

template <typename F>
void for_each_key(const json& obj, std::string_view where, F&& handle) {
  if (!obj.is_object()) throw InvalidConfig(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : obj.items())
    if (!handle(key, value))
      throw InvalidConfig("unknown key '" + key + "' in " + std::string(where));
}

Vector to_vector(const json& j, std::string_view what) {
  if (!j.is_array()) throw InvalidConfig(std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

Matrix to_matrix(const json& j, std::string_view what) {
  if (!j.is_array() || j.empty()) throw InvalidConfig(std::string(what) + " must be a 2-D array");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InvalidConfig(std::string(what) + " rows must have equal length");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json from_vector(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json from_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(from_vector(m.row(r).transpose()));
  return rows;
}

ThetaLaw parse_theta_law(const json& j) {
  const std::string kind = lower(j.at("kind").get<std::string>());
  if (kind == "constant") {
    ConstantTheta c;
    for_each_key(j, "theta_law", [&](const std::string& k, const json& v) {
      if (k == "kind") return true;
      if (k == "value") return c.value = v.get<double>(), true;
      return false;
    });
    return c;
  }
  if (kind == "uniform") {
    UniformTheta u;
    for_each_key(j, "theta_law", [&](const std::string& k, const json& v) {
      if (k == "kind") return true;
      if (k == "lo") return u.lo = v.get<double>(), true;
      if (k == "hi") return u.hi = v.get<double>(), true;
      return false;
    });
    return u;
  }
  throw InvalidConfig("theta_law.kind must be 'constant' or 'uniform'");
}

Sparsity parse_sparsity(const json& j) {
  const std::string kind = lower(j.at("kind").get<std::string>());
  if (kind == "explicit") {
    ExplicitRho e;
    for_each_key(j, "sparsity", [&](const std::string& k, const json& v) {
      if (k == "kind") return true;
      if (k == "rho") return e.rho = v.get<double>(), true;
      return false;
    });
    return e;
  }
  if (kind == "target_mean_degree") {
    TargetMeanDegree t;
    for_each_key(j, "sparsity", [&](const std::string& k, const json& v) {
      if (k == "kind") return true;
      if (k == "coef") return t.coef = v.get<double>(), true;
      if (k == "exponent") return t.exponent = v.get<double>(), true;
      return false;
    });
    return t;
  }
  throw InvalidConfig("sparsity.kind must be 'explicit' or 'target_mean_degree'");
}

json theta_law_json(const ThetaLaw& law) {
  if (const auto* c = std::get_if<ConstantTheta>(&law)) return {{"kind", "constant"}, {"value", c->value}};
  const auto& u = std::get<UniformTheta>(law);
  return {{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
}

json sparsity_json(const Sparsity& s) {
  if (const auto* e = std::get_if<ExplicitRho>(&s)) return {{"kind", "explicit"}, {"rho", e->rho}};
  const auto& t = std::get<TargetMeanDegree>(s);
  return {{"kind", "target_mean_degree"}, {"coef", t.coef}, {"exponent", t.exponent}};
}

// --- CSV helpers ------------------------------------------------------------

std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'");
  return v;
}

std::vector<std::string> fitted_labels(const ExperimentConfig& config) {
  const auto dropped = constrained_coefficients(config);
  std::vector<std::string> out;
  for (auto& l : coefficient_labels(config.covariate_count()))
    if (std::find(dropped.begin(), dropped.end(), l) == dropped.end()) out.push_back(l);
  return out;
}

double true_value(const ExperimentConfig& config, const std::string& label) {
  const auto labels = coefficient_labels(config.covariate_count());
  const auto it = std::find(labels.begin(), labels.end(), label);
  return config.params.coefficients()(static_cast<Eigen::Index>(it - labels.begin()));
}

std::vector<RepRecord> error_records(const ExperimentConfig& config, std::size_t n, std::size_t rep,
                                     std::uint64_t seed, const std::string& what, double ms) {
  std::vector<RepRecord> out;
  const auto labels = fitted_labels(config);
  for (Estimator e : config.estimators) {
    RepRecord r;
    r.model = config.model;
    r.estimator = e;
    r.n = n;
    r.rep = rep;
    r.seed = seed;
    r.gt_dev = r.gy_dev = r.sigma_min = std::nan("");
    r.wall_ms = config.record_timing ? ms : 0.0;
    r.status = "error: " + sanitize(what);
    for (std::size_t k = 0; k < labels.size(); ++k)
      r.coefficients.push_back({labels[k], true_value(config, labels[k]), std::nan(""),
                                std::nan(""), is_aliased(config.model, labels[k]), std::nan("")});
    out.push_back(std::move(r));
  }
  return out;
}

// [1 | T | GT] from [1 | GY | T | GT].
Matrix without_gy(const Matrix& W) {
  Matrix x(W.rows(), W.cols() - 1);
  x.col(0) = W.col(0);
  x.rightCols(W.cols() - 2) = W.rightCols(W.cols() - 2);
  return x;
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

std::vector<RepRecord> run_one(const ExperimentConfig& config, std::size_t n, std::size_t rep) {
  const std::uint64_t seed = rep_seed(config.base_seed, n, rep);
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<Replicate> data;
  Vector spectrum;
  DiagnosticsReport diag;
  try {
    data.emplace(draw_replicate(config, n, seed));
    spectrum = data->op.eigenvalues();
    ReportOptions opts;
    opts.power_rank = false;
    opts.eigenvalues = &spectrum;
    diag = colinearity_report(data->op, data->fitted, data->T, Truth{config.params, data->tau}, opts);
  } catch (const std::exception& e) {
    return error_records(config, n, rep, seed, e.what(), elapsed_ms(t0));
  }
  const double gen_ms = elapsed_ms(t0);

  const DesignMatrix& design = data->fitted;
  std::vector<RepRecord> out;
  for (Estimator est : config.estimators) {
    const auto t1 = std::chrono::steady_clock::now();
    RepRecord r;
    r.model = config.model;
    r.estimator = est;
    r.n = n;
    r.rep = rep;
    r.seed = seed;
    r.gt_dev = diag.gt_dev;
    r.gy_dev = diag.gy_dev;
    r.distinct_eigs = diag.distinct_eigs;
    r.sigma_min = diag.sigma_min;
    try {
      EstimateResult fit;
      switch (est) {
        case Estimator::Ols:
          fit = ols(design, data->outcomes.Y);
          break;
        case Estimator::Tsls:
          fit = tsls(design, data->outcomes.Y, build_instruments(data->op, data->T));
          break;
        case Estimator::Qmle:
          fit = qmle(data->op, data->outcomes.Y, without_gy(design.W), {}, &spectrum);
          break;
      }
      if (!fit.theta_hat.allFinite()) throw Error("non-finite estimate");
      std::string status = "ok";
      if (fit.rank_deficient) status += "+rank_deficient";
      if (fit.weak_instruments) status += "+weak_instruments";
      if (!fit.converged) status += "+not_converged";
      if (fit.boundary_maximum) status += "+boundary_maximum";
      r.status = status;
      for (std::size_t k = 0; k < design.labels.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const std::string& label = design.labels[k];
        const double truth = true_value(config, label);
        const double err = fit.theta_hat(i) - truth;
        r.coefficients.push_back(
            {label, truth, fit.theta_hat(i), err * err, is_aliased(config.model, label), diag.vif[k]});
      }
      r.wall_ms = config.record_timing ? gen_ms + elapsed_ms(t1) : 0.0;
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      auto errs = error_records(config, n, rep, seed, e.what(), gen_ms + elapsed_ms(t1));
      for (auto& er : errs)
        if (er.estimator == est) out.push_back(std::move(er));
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Model m) {
  switch (m) {
    case Model::Bernoulli: return "bernoulli";
    case Model::Unrestricted: return "unrestricted";
    case Model::Restricted: return "restricted";
  }
  return "unknown";
}

Model parse_model(std::string_view name) {
  const std::string s = lower(name);
  if (s == "bernoulli") return Model::Bernoulli;
  if (s == "unrestricted") return Model::Unrestricted;
  if (s == "restricted") return Model::Restricted;
  throw InvalidConfig("unknown model '" + std::string(name) + "'");
}

std::size_t ExperimentConfig::covariate_count() const {
  return model == Model::Bernoulli ? 1 : dcsbm.blocks();
}

void ExperimentConfig::validate() const {
  if (reps < 1) throw InvalidConfig("reps must be >= 1");
  if (n_grid.empty()) throw InvalidConfig("n_grid is empty");
  if (n_grid.front() < 2) throw InvalidConfig("n_grid entries must be >= 2");
  for (std::size_t k = 1; k < n_grid.size(); ++k)
    if (n_grid[k] <= n_grid[k - 1]) throw InvalidConfig("n_grid must be strictly increasing");
  if (estimators.empty()) throw InvalidConfig("no estimators selected");
  params.validate();
  dcsbm.validate();
  if (params.covariates() != covariate_count())
    throw InvalidConfig("model " + std::string(to_string(model)) + " needs " +
                        std::to_string(covariate_count()) + " covariate coefficients");
  if (model == Model::Bernoulli && !(covariate_p >= 0.0 && covariate_p <= 1.0))
    throw InvalidConfig("covariate_p must lie in [0, 1]");
  if (model == Model::Restricted) {
    const Vector& d = params.delta;
    if (d.size() < 3 || d(0) != 0.0 || d(1) != 0.0 || (d.tail(d.size() - 2).array() == 0.0).any())
      throw InvalidConfig("restricted model needs exactly two leading zeros in delta");
  }
}

ExperimentConfig default_config(Model model) {
  ExperimentConfig c;
  c.model = model;
  c.n_grid = {100, 200, 400, 800, 1600};
  c.reps = 50;
  c.base_seed = 20240417;
  c.estimators = {Estimator::Ols, Estimator::Tsls, Estimator::Qmle};
  c.params = model_params(model);
  c.dcsbm = four_block_config();
  c.covariate_p = 0.5;
  c.output_dir = "out/" + std::string(to_string(model));
  return c;
}

std::vector<std::size_t> full_n_grid() { return {100, 163, 264, 430, 698, 1135, 1845, 3000}; }

ExperimentConfig config_from_json(std::string_view text, Model fallback) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw InvalidConfig("config must be a JSON object");
  Model model = fallback;
  if (root.contains("model")) model = parse_model(root["model"].get<std::string>());
  ExperimentConfig c = default_config(model);
  try {
    for_each_key(root, "config", [&](const std::string& k, const json& v) {
      if (k == "model") return true;
      if (k == "n_grid") return c.n_grid = v.get<std::vector<std::size_t>>(), true;
      if (k == "reps") return c.reps = v.get<std::size_t>(), true;
      if (k == "base_seed") return c.base_seed = v.get<std::uint64_t>(), true;
      if (k == "covariate_p") return c.covariate_p = v.get<double>(), true;
      if (k == "output_dir") return c.output_dir = v.get<std::string>(), true;
      if (k == "record_timing") return c.record_timing = v.get<bool>(), true;
      if (k == "estimators") {
        c.estimators.clear();
        for (const auto& e : v) c.estimators.push_back(parse_estimator(e.get<std::string>()));
        return true;
      }
      if (k == "params") {
        for_each_key(v, "params", [&](const std::string& pk, const json& pv) {
          if (pk == "alpha") return c.params.alpha = pv.get<double>(), true;
          if (pk == "beta") return c.params.beta = pv.get<double>(), true;
          if (pk == "gamma") return c.params.gamma = to_vector(pv, "gamma"), true;
          if (pk == "delta") return c.params.delta = to_vector(pv, "delta"), true;
          if (pk == "sigma") return c.params.sigma = pv.get<double>(), true;
          return false;
        });
        return true;
      }
      if (k == "dcsbm") {
        for_each_key(v, "dcsbm", [&](const std::string& dk, const json& dv) {
          if (dk == "pi") return c.dcsbm.pi = to_vector(dv, "pi"), true;
          if (dk == "B") return c.dcsbm.B = to_matrix(dv, "B"), true;
          if (dk == "theta_law") return c.dcsbm.theta_law = parse_theta_law(dv), true;
          if (dk == "sparsity") return c.dcsbm.sparsity = parse_sparsity(dv), true;
          return false;
        });
        return true;
      }
      return false;
    });
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("config has a field of the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path, Model fallback) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str(), fallback);
}

std::string config_to_json(const ExperimentConfig& c) {
  json estimators = json::array();
  for (Estimator e : c.estimators) estimators.push_back(std::string(to_string(e)));
  json j = {
      {"model", std::string(to_string(c.model))},
      {"n_grid", c.n_grid},
      {"reps", c.reps},
      {"base_seed", c.base_seed},
      {"estimators", estimators},
      {"params",
       {{"alpha", c.params.alpha},
        {"beta", c.params.beta},
        {"gamma", from_vector(c.params.gamma)},
        {"delta", from_vector(c.params.delta)},
        {"sigma", c.params.sigma}}},
      {"dcsbm",
       {{"pi", from_vector(c.dcsbm.pi)},
        {"B", from_matrix(c.dcsbm.B)},
        {"theta_law", theta_law_json(c.dcsbm.theta_law)},
        {"sparsity", sparsity_json(c.dcsbm.sparsity)}}},
      {"covariate_p", c.covariate_p},
      {"output_dir", c.output_dir},
      {"record_timing", c.record_timing},
  };
  return j.dump(2);
}

bool is_aliased(Model model, std::string_view coefficient) {
  if (model == Model::Restricted) return false;
  return coefficient == "alpha" || coefficient == "beta" || coefficient.rfind("delta", 0) == 0;
}

std::vector<std::string> constrained_coefficients(const ExperimentConfig& config) {
  std::vector<std::string> out;
  if (config.model != Model::Restricted) return out;
  const auto labels = coefficient_labels(config.covariate_count());
  const std::size_t p = config.covariate_count();
  for (std::size_t k = 0; k < p; ++k)
    if (config.params.delta(static_cast<Eigen::Index>(k)) == 0.0) out.push_back(labels[2 + p + k]);
  return out;
}

std::uint64_t rep_seed(std::uint64_t base_seed, std::size_t n, std::size_t rep) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(rep)});
}

bool record_less(const RepRecord& a, const RepRecord& b) {
  return std::tuple(a.model, a.estimator, a.n, a.rep) < std::tuple(b.model, b.estimator, b.n, b.rep);
}

Replicate draw_replicate(const ExperimentConfig& config, std::size_t n, std::uint64_t seed) {
  DcsbmSample sample =
      sample_dcsbm(config.dcsbm, n, stream_seed(seed, Stream::Graph), IsolatedPolicy::Regenerate);
  AveragingOperator op(sample.graph);
  Matrix T;
  Vector tau;
  if (config.model == Model::Bernoulli) {
    T = sample_bernoulli_covariates(config.covariate_p, n, stream_seed(seed, Stream::Covariates));
    tau = Vector::Constant(1, config.covariate_p);
  } else {
    T = sample.latent.X;
    tau = sample.latent.mu();
  }
  Outcomes outcomes = generate_outcomes(op, T, config.params, stream_seed(seed, Stream::Noise));
  DesignMatrix design = build_design(op, T, outcomes.Y);
  DesignMatrix fitted = drop_columns(design, constrained_coefficients(config));
  return Replicate{std::move(sample), std::move(op),     std::move(T),     std::move(outcomes),
                   std::move(design), std::move(fitted), std::move(tau)};
}

std::vector<RepRecord> run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  config.validate();
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t n : config.n_grid)
    for (std::size_t rep = 0; rep < config.reps; ++rep) tasks.emplace_back(n, rep);

  std::vector<std::vector<RepRecord>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mu;
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      results[t] = run_one(config, tasks[t].first, tasks[t].second);
      const std::size_t d = ++done;
      if (options.progress) {
        std::lock_guard lock(progress_mu);
        options.progress(d, tasks.size());
      }
    }
  };
  const unsigned workers = std::max(1u, options.workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::vector<RepRecord> out;
  for (auto& r : results)
    for (auto& rec : r) out.push_back(std::move(rec));
  std::stable_sort(out.begin(), out.end(), record_less);
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) return std::nan("");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

SummaryTable summarize(const std::vector<RepRecord>& records) {
  using Key = std::tuple<Model, Estimator, std::size_t, std::size_t, std::string>;
  struct Acc {
    bool aliased = false;
    std::vector<double> sq, vif;
  };
  std::map<Key, Acc> groups;
  for (const RepRecord& r : records) {
    if (r.status.rfind("ok", 0) != 0) continue;
    for (std::size_t k = 0; k < r.coefficients.size(); ++k) {
      const CoefficientResult& c = r.coefficients[k];
      Acc& a = groups[Key(r.model, r.estimator, r.n, k, c.label)];
      a.aliased = c.aliased;
      a.sq.push_back(c.sq_error);
      a.vif.push_back(c.vif);
    }
  }
  SummaryTable table;
  for (auto& [key, acc] : groups) {
    SummaryRow row;
    std::size_t ignored = 0;
    std::tie(row.model, row.estimator, row.n, ignored, row.coefficient) = key;
    row.aliased = acc.aliased;
    double sum = 0.0;
    for (double v : acc.sq) sum += v;
    row.mean_mse = sum / static_cast<double>(acc.sq.size());
    row.median_mse = median(acc.sq);
    row.median_vif = median(acc.vif);
    row.count = acc.sq.size();
    table.push_back(std::move(row));
  }
  return table;
}

void write_records_csv(std::ostream& out, const std::vector<RepRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const RepRecord& r : records) {
    for (const CoefficientResult& c : r.coefficients) {
      out << to_string(r.model) << ',' << to_string(r.estimator) << ',' << r.n << ',' << r.rep << ','
          << r.seed << ',' << c.label << ',' << fmt(c.truth) << ',' << fmt(c.estimate) << ','
          << fmt(c.sq_error) << ',' << (c.aliased ? 1 : 0) << ',' << fmt(c.vif) << ','
          << fmt(r.gt_dev) << ',' << fmt(r.gy_dev) << ',' << r.distinct_eigs << ','
          << fmt(r.sigma_min) << ',' << fmt(r.wall_ms) << ',' << sanitize(r.status) << '\n';
    }
  }
}

std::vector<RepRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("records file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw ParseError("unexpected records header: " + line);
  std::vector<RepRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 17)
      throw ParseError("line " + std::to_string(line_no) + ": expected 17 fields");
    RepRecord key;
    key.model = parse_model(f[0]);
    key.estimator = parse_estimator(f[1]);
    key.n = parse_int<std::size_t>(f[2]);
    key.rep = parse_int<std::size_t>(f[3]);
    if (out.empty() || out.back().model != key.model || out.back().estimator != key.estimator ||
        out.back().n != key.n || out.back().rep != key.rep) {
      key.seed = parse_int<std::uint64_t>(f[4]);
      key.gt_dev = parse_double(f[11]);
      key.gy_dev = parse_double(f[12]);
      key.distinct_eigs = parse_int<std::size_t>(f[13]);
      key.sigma_min = parse_double(f[14]);
      key.wall_ms = parse_double(f[15]);
      key.status = f[16];
      out.push_back(std::move(key));
    }
    out.back().coefficients.push_back({f[5], parse_double(f[6]), parse_double(f[7]),
                                       parse_double(f[8]), f[9] == "1", parse_double(f[10])});
  }
  return out;
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  out << kSummaryHeader << '\n';
  for (const SummaryRow& r : table)
    out << to_string(r.model) << ',' << to_string(r.estimator) << ',' << r.n << ',' << r.coefficient
        << ',' << (r.aliased ? 1 : 0) << ',' << fmt(r.mean_mse) << ',' << fmt(r.median_mse) << ','
        << fmt(r.median_vif) << '\n';
}

void write_outputs(const ExperimentConfig& config, const std::vector<RepRecord>& records) {
  std::filesystem::create_directories(config.output_dir);
  const std::filesystem::path dir(config.output_dir);
  {
    std::ofstream out(dir / "records.csv");
    if (!out) throw Error("cannot write " + (dir / "records.csv").string());
    write_records_csv(out, records);
  }
  {
    std::ofstream out(dir / "summary.csv");
    write_summary_csv(out, summarize(records));
  }
  {
    std::ofstream out(dir / "manifest.json");
    json manifest = {{"tool", "peerlab"},
                     {"version", std::string(kVersion)},
                     {"config", json::parse(config_to_json(config))}};
    out << manifest.dump(2) << '\n';
  }
}

}  // namespace peerlab
