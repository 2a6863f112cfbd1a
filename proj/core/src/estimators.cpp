#include "peerlab/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <optional>

#include "peerlab/error.hpp"

namespace peerlab {
namespace {

Vector singular_values_of(const Matrix& M) {
  if (M.rows() > 4 * M.cols()) {
    Eigen::HouseholderQR<Matrix> qr(M);
    const Matrix R = qr.matrixQR().topRows(M.cols()).triangularView<Eigen::Upper>();
    return Eigen::JacobiSVD<Matrix>(R).singularValues();
  }
  return Eigen::JacobiSVD<Matrix>(M).singularValues();
}

Eigen::CompleteOrthogonalDecomposition<Matrix> decompose(const Matrix& M) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  cod.setThreshold(1e-12);
  return cod;
}

}  // namespace

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Ols: return "ols";
    case Estimator::Tsls: return "tsls";
    case Estimator::Qmle: return "qmle";
  }
  return "unknown";
}

Estimator parse_estimator(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "ols") return Estimator::Ols;
  if (s == "tsls" || s == "2sls") return Estimator::Tsls;
  if (s == "qmle") return Estimator::Qmle;
  throw InvalidConfig("unknown estimator '" + std::string(name) + "'");
}

double condition_number(const Matrix& M) {
  const Vector s = singular_values_of(M);
  const double smin = s.minCoeff();
  return smin > 0.0 ? s.maxCoeff() / smin : std::numeric_limits<double>::infinity();
}

EstimateResult ols(const Matrix& W, const Vector& Y) {
  if (W.rows() != Y.size()) throw DimensionMismatch("W and Y row counts differ");
  if (W.rows() < W.cols()) throw DimensionMismatch("OLS needs at least as many rows as columns");
  const auto cod = decompose(W);
  EstimateResult r;
  r.method = Estimator::Ols;
  r.theta_hat = cod.solve(Y);
  r.rank_deficient = cod.rank() < W.cols();
  const double rss = (Y - W * r.theta_hat).squaredNorm();
  const auto dof = W.rows() - W.cols();
  r.sigma2_hat = dof > 0 ? rss / static_cast<double>(dof) : 0.0;
  r.condition_number = condition_number(W);
  return r;
}

Matrix build_instruments(const AveragingOperator& op, const Matrix& T) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (T.rows() != n) throw DimensionMismatch("covariate rows must equal the node count");
  const Eigen::Index p = T.cols();
  const Matrix gt = op.apply(T);
  Matrix Z(n, 3 * p + 1);
  Z.col(0).setOnes();
  Z.middleCols(1, p) = T;
  Z.middleCols(1 + p, p) = gt;
  Z.middleCols(1 + 2 * p, p) = op.apply(gt);
  return Z;
}

Matrix exogenous_design(const AveragingOperator& op, const Matrix& T) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (T.rows() != n) throw DimensionMismatch("covariate rows must equal the node count");
  const Eigen::Index p = T.cols();
  Matrix X(n, 2 * p + 1);
  X.col(0).setOnes();
  X.middleCols(1, p) = T;
  X.middleCols(1 + p, p) = op.apply(T);
  return X;
}

EstimateResult tsls(const Matrix& W, const Vector& Y, const Matrix& Z) {
  if (W.rows() != Y.size() || Z.rows() != Y.size())
    throw DimensionMismatch("W, Y and Z row counts differ");
  if (Z.cols() < W.cols()) throw DimensionMismatch("need at least as many instruments as regressors");
  if (Z.rows() <= Z.cols()) throw DimensionMismatch("2SLS needs more rows than instruments");

  Eigen::ColPivHouseholderQR<Matrix> zqr(Z);
  zqr.setThreshold(1e-12);
  const Eigen::Index r = zqr.rank();
  const Matrix Q = zqr.householderQ() * Matrix::Identity(Z.rows(), r);
  const Matrix projected = Q * (Q.transpose() * W);

  const auto cod = decompose(projected);
  EstimateResult out;
  out.method = Estimator::Tsls;
  out.theta_hat = cod.solve(Y);
  out.rank_deficient = cod.rank() < W.cols();
  const double rss = (Y - W * out.theta_hat).squaredNorm();
  const auto dof = W.rows() - W.cols();
  out.sigma2_hat = dof > 0 ? rss / static_cast<double>(dof) : 0.0;
  out.condition_number = condition_number(projected);
  const Vector s = singular_values_of(Z.transpose() * W / static_cast<double>(W.rows()));
  out.weak_instruments = s.minCoeff() < 1e-10;
  return out;
}

ConcentratedLikelihood::ConcentratedLikelihood(const Matrix& G, Vector eigenvalues, const Vector& Y,
                                               const Matrix& X)
    : eigenvalues_(std::move(eigenvalues)) {
  if (G.rows() != Y.size() || X.rows() != Y.size() || eigenvalues_.size() != Y.size())
    throw DimensionMismatch("QMLE inputs must have one row per node");
  const Vector gy = G * Y;
  const auto cod = decompose(X);
  rank_deficient_ = cod.rank() < X.cols();
  c0_ = cod.solve(Y);
  c1_ = cod.solve(gy);
  e0_ = Y - X * c0_;
  e1_ = gy - X * c1_;
  cond_ = peerlab::condition_number(X);
}

double ConcentratedLikelihood::log_det(double beta) const {
  return (1.0 - beta * eigenvalues_.array()).abs().log().sum();
}

double ConcentratedLikelihood::sigma2(double beta) const {
  return (e0_ - beta * e1_).squaredNorm() / static_cast<double>(e0_.size());
}

Vector ConcentratedLikelihood::coefficients(double beta) const { return c0_ - beta * c1_; }

double ConcentratedLikelihood::operator()(double beta) const {
  const double s2 = sigma2(beta);
  if (s2 <= 0.0) return std::numeric_limits<double>::infinity();
  return -0.5 * static_cast<double>(e0_.size()) * std::log(s2) + log_det(beta);
}

double ConcentratedLikelihood::derivative(double beta) const {
  const Vector r = e0_ - beta * e1_;
  const double spectral = (eigenvalues_.array() / (1.0 - beta * eigenvalues_.array())).sum();
  return static_cast<double>(e0_.size()) * e1_.dot(r) / r.squaredNorm() - spectral;
}

namespace {

// Golden section only resolves the argmax to about sqrt(machine epsilon);
// the derivative changes sign linearly there, so bisecting on it recovers
// the stationary point to full precision. Returns nullopt without a sign change.
std::optional<double> polish(const ConcentratedLikelihood& lik, double a, double b) {
  double da = lik.derivative(a);
  const double db = lik.derivative(b);
  if (!(da > 0.0 && db < 0.0)) return std::nullopt;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    const double dm = lik.derivative(mid);
    if (std::isnan(dm)) break;
    if (dm > 0.0) {
      a = mid;
      da = dm;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

EstimateResult qmle(const AveragingOperator& op, const Vector& Y, const Matrix& X_exog,
                    const QmleSearch& search, const Vector* eigenvalues) {
  if (!(search.lo > -1.0 && search.hi < 1.0 && search.lo < search.hi))
    throw InvalidConfig("QMLE search interval must satisfy -1 < lo < hi < 1");
  if (search.grid_points < 3) throw InvalidConfig("QMLE grid needs at least three points");
  if (X_exog.cols() < 1) throw DimensionMismatch("X_exog needs the intercept column");

  const ConcentratedLikelihood lik(op.matrix(), eigenvalues ? *eigenvalues : op.eigenvalues(), Y,
                                   X_exog);
  const int m = search.grid_points;
  const double step = (search.hi - search.lo) / (m - 1);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < m; ++k) {
    const double v = lik(search.lo + k * step);
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }

  double a = search.lo + std::max(best - 1, 0) * step;
  double b = search.lo + std::min(best + 1, m - 1) * step;
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = lik(x1);
  double f2 = lik(x2);
  for (int it = 0; it < 500 && (b - a) >= search.tol; ++it) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = lik(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = lik(x2);
    }
  }
  const bool converged = (b - a) < search.tol;
  const double pad = search.tol;
  double beta_hat =
      polish(lik, std::max(a - pad, search.lo), std::min(b + pad, search.hi)).value_or(0.5 * (a + b));
  // The bracket midpoint can lose to the grid point on flat or kinked profiles.
  const double grid_beta = search.lo + best * step;
  if (lik(grid_beta) > lik(beta_hat)) beta_hat = grid_beta;

  const Vector c = lik.coefficients(beta_hat);
  EstimateResult r;
  r.method = Estimator::Qmle;
  r.theta_hat.resize(c.size() + 1);
  r.theta_hat << c(0), beta_hat, c.tail(c.size() - 1);
  r.sigma2_hat = lik.sigma2(beta_hat);
  r.condition_number = lik.condition_number();
  r.rank_deficient = lik.rank_deficient();
  r.converged = converged;
  r.boundary_maximum = best == 0 || best == m - 1;
  r.beta_hat_boundary = beta_hat - search.lo < 1e-3 || search.hi - beta_hat < 1e-3;
  return r;
}

}  // namespace peerlab
