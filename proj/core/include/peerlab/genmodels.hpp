#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "peerlab/netcore.hpp"

namespace peerlab {

// Law of the degree-correction parameters theta_i.
struct ConstantTheta {
  double value = 1.0;
};
struct UniformTheta {
  double lo = 1.0;
  double hi = 2.0;
};
using ThetaLaw = std::variant<ConstantTheta, UniformTheta>;

double theta_mean(const ThetaLaw& law);

// Sparsity either fixed directly or chosen so the expected mean degree is
// coef * n^exponent.
struct ExplicitRho {
  double rho = 1.0;
};
struct TargetMeanDegree {
  double coef = 2.0;
  double exponent = 0.7;
  double operator()(std::size_t n) const;
};
using Sparsity = std::variant<ExplicitRho, TargetMeanDegree>;

struct DcsbmConfig {
  Vector pi;  // block probabilities
  Matrix B;   // symmetric PSD inter-block rates
  ThetaLaw theta_law = ConstantTheta{};
  Sparsity sparsity = ExplicitRho{};

  std::size_t blocks() const noexcept { return static_cast<std::size_t>(pi.size()); }
  // Throws InvalidConfig.
  void validate() const;
};

// Four equiprobable blocks, B = 0.5 on the diagonal and 0.05 off it,
// theta ~ U[1, 2], target mean degree 2 n^0.7.
DcsbmConfig four_block_config();

struct LatentPositions {
  Matrix X;                           // n x d, row i is node i
  Vector mu_hat;                      // sample mean of the rows
  std::optional<Vector> mu_analytic;  // mean of F when the generator knows it

  // Analytic mean when available, otherwise the sample mean.
  const Vector& mu() const { return mu_analytic ? *mu_analytic : mu_hat; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }
};

LatentPositions make_latent_positions(Matrix X, std::optional<Vector> mu_analytic = std::nullopt);
void write_latent_csv(std::ostream& out, const LatentPositions& latent);

enum class IsolatedPolicy {
  Allow,       // return the sample as drawn
  Regenerate,  // redraw with seed+1, seed+2, ... up to 10 attempts, then throw IsolatedNode
};

inline constexpr int kMaxSampleAttempts = 10;

struct DcsbmSample {
  Graph graph;
  LatentPositions latent;
  std::vector<int> blocks;
  Vector theta;
  double rho_used = 0.0;
  int attempts = 1;
};

// rho = m(n) / ((n-1) (E theta)^2 pi' B pi). Throws NegativeTarget.
double calibrate_rho(const DcsbmConfig& config, std::size_t n);

// Symmetric square root of a PSD matrix. Eigenvalues below -1e-10 are
// rejected (InvalidConfig); smaller negatives are zeroed.
Matrix symmetric_sqrt(const Matrix& B);

// A_ij ~ Poisson(rho theta_i B_{z(i) z(j)} theta_j) for i < j.
// Latent positions X_i = theta_i (B^{1/2})_{z(i)}; rho is not folded into X.
DcsbmSample sample_dcsbm(const DcsbmConfig& config, std::size_t n, std::uint64_t seed,
                         IsolatedPolicy policy = IsolatedPolicy::Allow);

enum class EdgeLaw { Bernoulli, Poisson };

// Random dot product graph whose latent distribution is a finite mixture of
// atoms, each scaled by an independent degree multiplier.
struct RdpgConfig {
  Matrix atoms;       // k x d
  Vector atom_probs;  // length k
  ThetaLaw degree_multiplier_law = ConstantTheta{};
  EdgeLaw edge_law = EdgeLaw::Bernoulli;
  Sparsity sparsity = ExplicitRho{};

  void validate() const;
};

struct RdpgSample {
  Graph graph;
  LatentPositions latent;
  std::vector<int> atom_index;
  double rho_used = 0.0;
  int attempts = 1;
};

double calibrate_rho(const RdpgConfig& config, std::size_t n);

// Throws ProbabilityOverflow when a Bernoulli mean rho X_i'X_j exceeds one.
RdpgSample sample_rdpg(const RdpgConfig& config, std::size_t n, std::uint64_t seed,
                       IsolatedPolicy policy = IsolatedPolicy::Allow);

struct ExpectedDegrees {
  Vector delta;  // delta_i = rho sum_{j != i} X_i' X_j
  double delta_min = 0.0;
};

ExpectedDegrees expected_degrees(const Matrix& X, double rho);

// i.i.d. Bernoulli(p) draws in {0, 1}.
Vector sample_bernoulli_covariates(double p, std::size_t n, std::uint64_t seed);

}  // namespace peerlab
