#pragma once

#include <string>
#include <string_view>

#include "peerlab/lim.hpp"
#include "peerlab/netcore.hpp"

namespace peerlab {

enum class Estimator { Ols, Tsls, Qmle };

std::string_view to_string(Estimator e);
// Accepts "ols", "tsls"/"2sls", "qmle" in any case. Throws InvalidConfig.
Estimator parse_estimator(std::string_view name);

struct EstimateResult {
  Vector theta_hat;  // (alpha, beta, gamma_1..p, delta_1..p)
  double sigma2_hat = 0.0;
  Estimator method = Estimator::Ols;
  double condition_number = 0.0;
  bool rank_deficient = false;     // minimum-norm solution was returned
  bool weak_instruments = false;   // 2SLS: sigma_min(Z'W / n) < 1e-10
  bool converged = true;           // QMLE: final bracket narrower than tol
  bool boundary_maximum = false;   // QMLE: grid argmax at an end point
  bool beta_hat_boundary = false;  // QMLE: beta_hat within 1e-3 of the search bounds
};

// 2-norm condition number (largest / smallest singular value).
double condition_number(const Matrix& M);

// Least squares by complete orthogonal decomposition; sigma2 = RSS / (n - cols).
EstimateResult ols(const Matrix& W, const Vector& Y);
inline EstimateResult ols(const DesignMatrix& W, const Vector& Y) { return ols(W.W, Y); }

// Z = [1 | T | GT | G^2 T].
Matrix build_instruments(const AveragingOperator& op, const Matrix& T);

// [1 | T | GT], the regressors QMLE treats as exogenous.
Matrix exogenous_design(const AveragingOperator& op, const Matrix& T);

// Regress Y on the projection of W onto col(Z).
EstimateResult tsls(const Matrix& W, const Vector& Y, const Matrix& Z);
inline EstimateResult tsls(const DesignMatrix& W, const Vector& Y, const Matrix& Z) {
  return tsls(W.W, Y, Z);
}

// Gaussian log-likelihood with (c, sigma^2) profiled out:
//   l(beta) = -(n/2) log sigma2(beta) + sum_i log|1 - beta lambda_i|,
// where c(beta), sigma2(beta) come from OLS of (I - beta G) Y on X.
class ConcentratedLikelihood {
 public:
  // `eigenvalues` is the spectrum of G.
  ConcentratedLikelihood(const Matrix& G, Vector eigenvalues, const Vector& Y, const Matrix& X);

  double operator()(double beta) const;
  double derivative(double beta) const;  // d l / d beta
  double log_det(double beta) const;  // sum_i log|1 - beta lambda_i|
  Vector coefficients(double beta) const;  // c(beta)
  double sigma2(double beta) const;

  std::size_t size() const noexcept { return static_cast<std::size_t>(e0_.size()); }
  double condition_number() const noexcept { return cond_; }
  bool rank_deficient() const noexcept { return rank_deficient_; }

 private:
  Vector eigenvalues_;
  Vector c0_, c1_;  // c(beta) = c0 - beta c1
  Vector e0_, e1_;  // residual(beta) = e0 - beta e1
  double cond_ = 0.0;
  bool rank_deficient_ = false;
};

struct QmleSearch {
  double lo = -0.99;
  double hi = 0.99;
  double tol = 1e-6;
  int grid_points = 201;
};

// Grid scan, golden-section refinement of the concentrated likelihood, then
// bisection on the sign of its derivative inside the final bracket.
// X_exog is [1 | T | GT] (or a column subset starting with 1); theta_hat is
// (c_0, beta, c_1, ...). Pass the spectrum of G when it is already known.
EstimateResult qmle(const AveragingOperator& op, const Vector& Y, const Matrix& X_exog,
                    const QmleSearch& search = {}, const Vector* eigenvalues = nullptr);

}  // namespace peerlab
