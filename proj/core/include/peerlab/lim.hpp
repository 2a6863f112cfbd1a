#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "peerlab/genmodels.hpp"
#include "peerlab/netcore.hpp"

namespace peerlab {

// Coefficients of Y = alpha 1 + beta G Y + T gamma + G T delta + eps.
struct LimParameters {
  double alpha = 0.0;
  double beta = 0.0;  // |beta| < 1
  Vector gamma;       // length p
  Vector delta;       // length p
  double sigma = 0.0;

  std::size_t covariates() const noexcept { return static_cast<std::size_t>(gamma.size()); }
  // Throws InvalidConfig.
  void validate() const;
  // Ordered (alpha, beta, gamma_1..gamma_p, delta_1..delta_p), matching DesignMatrix columns.
  Vector coefficients() const;
};

// Coefficient labels for p covariates: alpha, beta, gamma, delta when p = 1,
// otherwise gamma1..gammap, delta1..deltap.
std::vector<std::string> coefficient_labels(std::size_t p);

struct DesignMatrix {
  Matrix W;  // [1 | GY | T | GT]
  std::vector<std::string> labels;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(W.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(W.cols()); }
};

struct Outcomes {
  Vector Y;
  Vector eps;
};

// alpha 1 + T gamma + G T delta + eps.
Vector structural_base(const AveragingOperator& op, const Matrix& T, const LimParameters& params,
                       const Vector& eps);

// Draws eps ~ N(0, sigma^2) and solves (I - beta G) Y = alpha 1 + T gamma + G T delta + eps
// with a dense LU. Throws SingularSystem if the residual check fails.
Outcomes generate_outcomes(const AveragingOperator& op, const Matrix& T,
                           const LimParameters& params, std::uint64_t seed);

// Solves for a given noise vector; generate_outcomes draws eps and delegates here.
Vector solve_outcomes(const AveragingOperator& op, const Matrix& T, const LimParameters& params,
                      const Vector& eps);

// Truncated reduced form sum_{k=0}^{K} beta^k G^k (alpha 1 + T gamma + G T delta + eps).
Vector neumann_outcomes(const AveragingOperator& op, const Matrix& T, const LimParameters& params,
                        const Vector& eps, int terms);

// Throws DimensionMismatch.
DesignMatrix build_design(const AveragingOperator& op, const Matrix& T, const Vector& Y);

// Copy of `design` without the named columns (coefficients fixed by a model
// constraint). Throws InvalidConfig for an unknown label or for "alpha"/"beta".
DesignMatrix drop_columns(const DesignMatrix& design, const std::vector<std::string>& labels);

enum class EtaForm {
  Ratio,     // (alpha + (gamma + delta)' tau) / (1 - beta)
  Separate,  // alpha / (1 - beta) + (gamma + delta)' tau
};

// Constant limit of the neighborhood-averaged outcomes GY.
double eta(const LimParameters& params, const Vector& tau, EtaForm form = EtaForm::Ratio);

struct RdpgLimitObjects {
  Vector H_diag;       // X_i' mu
  Matrix secmm;        // (1/n) X'X
  Matrix Gamma;        // (I - beta E[X X' / X'mu])^{-1} - I
  Vector gamma_tilde;  // secmm gamma + Gamma secmm (beta gamma + delta)
  Matrix W_limit;      // [1 | alpha/(1-beta) 1 + H^{-1} X gamma_tilde | X | H^{-1} X secmm]
  bool knife_edge = false;  // ||gamma_tilde - mu|| < 1e-8
};

// Plug-in limit objects over the realized X. Requires p = d.
// Throws DegenerateInnerProduct if some X_i' mu <= 0.
RdpgLimitObjects rdpg_limit_objects(const Matrix& X, const Vector& mu, const LimParameters& params);

// H^{-1} X secmm, the limit of GX.
Matrix limit_gx(const Matrix& X, const Vector& mu);

struct DesignRank {
  std::size_t rank = 0;   // numerical rank of [X | H^{-1} X]
  bool schur_ok = false;  // Z^{-1} H_Z^{-1} Z - Y^{-1} H_Y^{-1} Y invertible for a found row pair
};

DesignRank theoretical_design_rank(const Matrix& X, const Vector& mu);

// Numerical rank: singular values above rel_tol * largest.
std::size_t numerical_rank(const Matrix& M, double rel_tol = 1e-8);

}  // namespace peerlab
