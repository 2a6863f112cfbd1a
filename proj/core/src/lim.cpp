#include "peerlab/lim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "peerlab/error.hpp"
#include "peerlab/seed.hpp"

namespace peerlab {
namespace {

void check_covariates(const AveragingOperator& op, const Matrix& T, const LimParameters& params) {
  if (static_cast<std::size_t>(T.rows()) != op.size())
    throw DimensionMismatch("covariate rows must equal the node count");
  if (static_cast<std::size_t>(T.cols()) != params.covariates())
    throw DimensionMismatch("covariate columns must equal len(gamma)");
}

Vector singular_values(const Matrix& M) {
  if (M.rows() > 4 * M.cols()) {
    Eigen::HouseholderQR<Matrix> qr(M);
    const Matrix R = qr.matrixQR().topRows(M.cols()).triangularView<Eigen::Upper>();
    return Eigen::JacobiSVD<Matrix>(R).singularValues();
  }
  return Eigen::JacobiSVD<Matrix>(M).singularValues();
}

// Greedily collects d linearly independent rows of X, skipping `used`, starting at `start`.
std::vector<Eigen::Index> independent_rows(const Matrix& X, const std::vector<bool>& used,
                                           Eigen::Index start) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  std::vector<Eigen::Index> picked;
  Matrix sel(0, d);
  for (Eigen::Index step = 0; step < n && static_cast<Eigen::Index>(picked.size()) < d; ++step) {
    const Eigen::Index i = (start + step) % n;
    if (used[static_cast<std::size_t>(i)]) continue;
    Matrix trial(sel.rows() + 1, d);
    trial.topRows(sel.rows()) = sel;
    trial.row(sel.rows()) = X.row(i);
    if (numerical_rank(trial) == static_cast<std::size_t>(trial.rows())) {
      sel = std::move(trial);
      picked.push_back(i);
    }
  }
  return picked;
}

Matrix rows_of(const Matrix& X, const std::vector<Eigen::Index>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = X.row(idx[k]);
  return out;
}

Vector inner_with_mean(const Matrix& X, const Vector& mu) {
  if (mu.size() != X.cols()) throw DimensionMismatch("mu length must equal latent dimension");
  Vector h = X * mu;
  for (Eigen::Index i = 0; i < h.size(); ++i)
    if (!(h(i) > 0.0))
      throw DegenerateInnerProduct("X_" + std::to_string(i) + "' mu = " + std::to_string(h(i)) +
                                   " is not positive");
  return h;
}

}  // namespace

void LimParameters::validate() const {
  if (!(std::abs(beta) < 1.0)) throw InvalidConfig("|beta| must be < 1");
  if (gamma.size() < 1) throw InvalidConfig("need at least one covariate");
  if (gamma.size() != delta.size()) throw InvalidConfig("gamma and delta must have equal length");
  if (!(sigma >= 0.0)) throw InvalidConfig("sigma must be non-negative");
}

Vector LimParameters::coefficients() const {
  const auto p = gamma.size();
  Vector c(2 * p + 2);
  c << alpha, beta, gamma, delta;
  return c;
}

std::vector<std::string> coefficient_labels(std::size_t p) {
  std::vector<std::string> labels{"alpha", "beta"};
  for (const char* name : {"gamma", "delta"})
    for (std::size_t k = 1; k <= p; ++k)
      labels.push_back(p == 1 ? std::string(name) : name + std::to_string(k));
  return labels;
}

Vector structural_base(const AveragingOperator& op, const Matrix& T, const LimParameters& params,
                       const Vector& eps) {
  check_covariates(op, T, params);
  if (static_cast<std::size_t>(eps.size()) != op.size())
    throw DimensionMismatch("noise length must equal the node count");
  const Matrix gt = op.apply(T);
  return Vector::Constant(eps.size(), params.alpha) + T * params.gamma + gt * params.delta + eps;
}

Vector solve_outcomes(const AveragingOperator& op, const Matrix& T, const LimParameters& params,
                      const Vector& eps) {
  params.validate();
  const Vector rhs = structural_base(op, T, params, eps);
  const auto n = static_cast<Eigen::Index>(op.size());
  const Matrix system = Matrix::Identity(n, n) - params.beta * op.matrix();
  const Vector y = system.partialPivLu().solve(rhs);
  const double resid = (system * y - rhs).lpNorm<Eigen::Infinity>();
  if (!y.allFinite() || !(resid < 1e-8 * (1.0 + rhs.lpNorm<Eigen::Infinity>())))
    throw SingularSystem("reduced-form solve failed (residual " + std::to_string(resid) + ")");
  return y;
}

Outcomes generate_outcomes(const AveragingOperator& op, const Matrix& T,
                           const LimParameters& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Vector eps(static_cast<Eigen::Index>(op.size()));
  for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = params.sigma * z(rng);
  Vector y = solve_outcomes(op, T, params, eps);
  return {std::move(y), std::move(eps)};
}

Vector neumann_outcomes(const AveragingOperator& op, const Matrix& T, const LimParameters& params,
                        const Vector& eps, int terms) {
  params.validate();
  Vector term = structural_base(op, T, params, eps);
  Vector sum = term;
  for (int k = 1; k <= terms; ++k) {
    term = params.beta * op.apply(term);
    sum += term;
  }
  return sum;
}

DesignMatrix build_design(const AveragingOperator& op, const Matrix& T, const Vector& Y) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (T.rows() != n || Y.size() != n)
    throw DimensionMismatch("design inputs must have one row per node");
  const Eigen::Index p = T.cols();
  DesignMatrix d;
  d.W.resize(n, 2 * p + 2);
  d.W.col(0).setOnes();
  d.W.col(1) = op.apply(Y);
  d.W.middleCols(2, p) = T;
  d.W.middleCols(2 + p, p) = op.apply(T);
  d.labels = coefficient_labels(static_cast<std::size_t>(p));
  return d;
}

DesignMatrix drop_columns(const DesignMatrix& design, const std::vector<std::string>& labels) {
  std::vector<Eigen::Index> keep;
  for (const auto& l : labels) {
    if (l == "alpha" || l == "beta") throw InvalidConfig("cannot drop the " + l + " column");
    if (std::find(design.labels.begin(), design.labels.end(), l) == design.labels.end())
      throw InvalidConfig("design has no column '" + l + "'");
  }
  DesignMatrix out;
  for (std::size_t k = 0; k < design.labels.size(); ++k) {
    if (std::find(labels.begin(), labels.end(), design.labels[k]) != labels.end()) continue;
    keep.push_back(static_cast<Eigen::Index>(k));
    out.labels.push_back(design.labels[k]);
  }
  out.W = design.W(Eigen::all, keep);
  return out;
}

double eta(const LimParameters& params, const Vector& tau, EtaForm form) {
  if (!(std::abs(params.beta) < 1.0)) throw InvalidConfig("|beta| must be < 1");
  if (tau.size() != params.gamma.size() || tau.size() != params.delta.size())
    throw DimensionMismatch("tau length must equal the covariate count");
  const double spill = (params.gamma + params.delta).dot(tau);
  if (form == EtaForm::Ratio) return (params.alpha + spill) / (1.0 - params.beta);
  return params.alpha / (1.0 - params.beta) + spill;
}

Matrix limit_gx(const Matrix& X, const Vector& mu) {
  const Vector h = inner_with_mean(X, mu);
  const Matrix secmm = X.transpose() * X / static_cast<double>(X.rows());
  return h.cwiseInverse().asDiagonal() * X * secmm;
}

RdpgLimitObjects rdpg_limit_objects(const Matrix& X, const Vector& mu, const LimParameters& params) {
  params.validate();
  if (params.gamma.size() != X.cols())
    throw DimensionMismatch("covariates must be the latent positions (p = d)");
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  RdpgLimitObjects out;
  out.H_diag = inner_with_mean(X, mu);
  const double inv_n = 1.0 / static_cast<double>(n);
  out.secmm = X.transpose() * X * inv_n;

  const Matrix hinv_x = out.H_diag.cwiseInverse().asDiagonal() * X;
  if (params.beta == 0.0) {
    out.Gamma = Matrix::Zero(d, d);
  } else {
    const Matrix weighted = X.transpose() * hinv_x * inv_n;
    const Matrix I = Matrix::Identity(d, d);
    out.Gamma = (I - params.beta * weighted).partialPivLu().inverse() - I;
  }
  out.gamma_tilde = out.secmm * params.gamma +
                    out.Gamma * out.secmm * (params.beta * params.gamma + params.delta);

  out.W_limit.resize(n, 2 * d + 2);
  out.W_limit.col(0).setOnes();
  out.W_limit.col(1) = Vector::Constant(n, params.alpha / (1.0 - params.beta)) +
                       hinv_x * out.gamma_tilde;
  out.W_limit.middleCols(2, d) = X;
  out.W_limit.middleCols(2 + d, d) = hinv_x * out.secmm;
  out.knife_edge = (out.gamma_tilde - mu).norm() < 1e-8;
  return out;
}

std::size_t numerical_rank(const Matrix& M, double rel_tol) {
  if (M.size() == 0) return 0;
  const Vector s = singular_values(M);
  const double cutoff = rel_tol * s.maxCoeff();
  std::size_t r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > cutoff && s(k) > 0.0) ++r;
  return r;
}

DesignRank theoretical_design_rank(const Matrix& X, const Vector& mu) {
  const Vector h = inner_with_mean(X, mu);
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Matrix M(n, 2 * d);
  M.leftCols(d) = X;
  M.rightCols(d) = h.cwiseInverse().asDiagonal() * X;

  DesignRank out;
  out.rank = numerical_rank(M);

  std::vector<bool> used(static_cast<std::size_t>(n), false);
  const auto y_idx = independent_rows(X, used, 0);
  if (static_cast<Eigen::Index>(y_idx.size()) < d) return out;
  for (auto i : y_idx) used[static_cast<std::size_t>(i)] = true;
  const Matrix Yr = rows_of(X, y_idx);
  const Vector hy = rows_of(h, y_idx);
  const Matrix y_term = Yr.partialPivLu().solve(hy.cwiseInverse().asDiagonal() * Yr);

  constexpr int kTries = 16;
  for (int t = 0; t < kTries && !out.schur_ok; ++t) {
    const auto z_idx = independent_rows(X, used, (static_cast<Eigen::Index>(t) * n) / kTries);
    if (static_cast<Eigen::Index>(z_idx.size()) < d) break;
    const Matrix Zr = rows_of(X, z_idx);
    const Vector hz = rows_of(h, z_idx);
    const Matrix z_term = Zr.partialPivLu().solve(hz.cwiseInverse().asDiagonal() * Zr);
    const Vector s = Eigen::JacobiSVD<Matrix>(z_term - y_term).singularValues();
    const double scale = std::max(z_term.norm(), y_term.norm());
    out.schur_ok = s.minCoeff() > 1e-8 * scale;
  }
  return out;
}

}  // namespace peerlab
