#include "peerlab/genmodels.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "peerlab/error.hpp"
#include "peerlab/seed.hpp"

namespace peerlab {
namespace {

double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

int inverse_cdf(const Vector& probs, double u) {
  double cum = 0.0;
  int last_positive = 0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) {
    if (probs(k) <= 0.0) continue;
    last_positive = static_cast<int>(k);
    cum += probs(k);
    if (u < cum) return static_cast<int>(k);
  }
  return last_positive;
}

double draw_theta(const ThetaLaw& law, Rng& rng) {
  return std::visit(
      [&](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, ConstantTheta>) {
          return l.value;
        } else {
          return l.lo + (l.hi - l.lo) * uniform01(rng);
        }
      },
      law);
}

void validate_theta_law(const ThetaLaw& law) {
  std::visit(
      [](const auto& l) {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, ConstantTheta>) {
          if (!(l.value > 0.0)) throw InvalidConfig("constant theta must be positive");
        } else {
          if (!(l.lo > 0.0) || !(l.lo <= l.hi))
            throw InvalidConfig("uniform theta law needs 0 < lo <= hi");
        }
      },
      law);
}

void validate_probabilities(const Vector& p, const char* what) {
  if (p.size() == 0) throw InvalidConfig(std::string(what) + " is empty");
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (!(p(k) >= 0.0)) throw InvalidConfig(std::string(what) + " has a negative entry");
  if (std::abs(p.sum() - 1.0) > 1e-12) throw InvalidConfig(std::string(what) + " must sum to 1");
}

void validate_sparsity(const Sparsity& s) {
  if (const auto* e = std::get_if<ExplicitRho>(&s); e && !(e->rho >= 0.0))
    throw InvalidConfig("rho must be non-negative");
}

double resolve_rho(const Sparsity& s, std::size_t n, double unit_mean_degree) {
  if (const auto* e = std::get_if<ExplicitRho>(&s)) return e->rho;
  const double target = std::get<TargetMeanDegree>(s)(n);
  if (target < 0.0) throw NegativeTarget("target mean degree is negative");
  if (target == 0.0) return 0.0;
  const double denom = static_cast<double>(n - 1) * unit_mean_degree;
  if (!(denom > 0.0)) throw InvalidConfig("cannot calibrate rho: expected inner product is zero");
  return target / denom;
}

template <typename Draw>
auto sample_with_policy(Draw&& draw, std::uint64_t seed, IsolatedPolicy policy) {
  auto s = draw(seed);
  for (int attempt = 1;; ++attempt) {
    s.attempts = attempt;
    if (policy == IsolatedPolicy::Allow) return s;
    const Vector d = degrees(s.graph);
    Eigen::Index idx = 0;
    if (d.minCoeff(&idx) > 0.0) return s;
    if (attempt == kMaxSampleAttempts) throw IsolatedNode(static_cast<std::size_t>(idx));
    s = draw(seed + static_cast<std::uint64_t>(attempt));
  }
}

}  // namespace

double theta_mean(const ThetaLaw& law) {
  return std::visit(
      [](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, ConstantTheta>) {
          return l.value;
        } else {
          return 0.5 * (l.lo + l.hi);
        }
      },
      law);
}

double TargetMeanDegree::operator()(std::size_t n) const {
  return coef * std::pow(static_cast<double>(n), exponent);
}

void DcsbmConfig::validate() const {
  validate_probabilities(pi, "pi");
  const Eigen::Index d = pi.size();
  if (B.rows() != d || B.cols() != d) throw InvalidConfig("B must be d x d with d = len(pi)");
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!(B(i, j) >= 0.0 && B(i, j) <= 1.0)) throw InvalidConfig("B entries must lie in [0, 1]");
      if (std::abs(B(i, j) - B(j, i)) > 1e-12) throw InvalidConfig("B must be symmetric");
    }
  Eigen::SelfAdjointEigenSolver<Matrix> es(B, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10) throw InvalidConfig("B must be positive semidefinite");
  validate_theta_law(theta_law);
  validate_sparsity(sparsity);
}

DcsbmConfig four_block_config() {
  DcsbmConfig c;
  c.pi = Vector::Constant(4, 0.25);
  c.B = Matrix::Constant(4, 4, 0.05);
  c.B.diagonal().setConstant(0.5);
  c.theta_law = UniformTheta{1.0, 2.0};
  c.sparsity = TargetMeanDegree{2.0, 0.7};
  return c;
}

LatentPositions make_latent_positions(Matrix X, std::optional<Vector> mu_analytic) {
  LatentPositions lp;
  lp.mu_hat = X.rows() > 0 ? Vector(X.colwise().mean().transpose()) : Vector::Zero(X.cols());
  lp.X = std::move(X);
  lp.mu_analytic = std::move(mu_analytic);
  return lp;
}

void write_latent_csv(std::ostream& out, const LatentPositions& latent) {
  out << "node";
  for (std::size_t k = 1; k <= latent.dim(); ++k) out << ",x" << k;
  out << '\n';
  const auto old = out.precision(17);
  for (Eigen::Index i = 0; i < latent.X.rows(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < latent.X.cols(); ++k) out << ',' << latent.X(i, k);
    out << '\n';
  }
  out.precision(old);
}

double calibrate_rho(const DcsbmConfig& config, std::size_t n) {
  if (!std::holds_alternative<TargetMeanDegree>(config.sparsity))
    throw InvalidConfig("calibrate_rho needs a target mean degree");
  const double et = theta_mean(config.theta_law);
  const double pbp = config.pi.dot(config.B * config.pi);
  return resolve_rho(config.sparsity, n, et * et * pbp);
}

Matrix symmetric_sqrt(const Matrix& B) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(B);
  if (es.info() != Eigen::Success) throw InvalidConfig("eigendecomposition of B failed");
  Vector ev = es.eigenvalues();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (ev(k) < -1e-10) throw InvalidConfig("B has a negative eigenvalue");
    ev(k) = std::sqrt(std::max(ev(k), 0.0));
  }
  const Matrix& U = es.eigenvectors();
  return U * ev.asDiagonal() * U.transpose();
}

DcsbmSample sample_dcsbm(const DcsbmConfig& config, std::size_t n, std::uint64_t seed,
                         IsolatedPolicy policy) {
  if (n < 2) throw InvalidConfig("need at least two nodes");
  config.validate();
  const double rho = std::holds_alternative<ExplicitRho>(config.sparsity)
                         ? std::get<ExplicitRho>(config.sparsity).rho
                         : calibrate_rho(config, n);
  const Matrix root = symmetric_sqrt(config.B);
  const Vector mu = theta_mean(config.theta_law) * (root.transpose() * config.pi);
  const auto sz = static_cast<Eigen::Index>(n);
  const auto d = static_cast<Eigen::Index>(config.blocks());

  auto draw = [&](std::uint64_t s) {
    Rng rng(s);
    std::vector<int> blocks(n);
    for (auto& b : blocks) b = inverse_cdf(config.pi, uniform01(rng));
    Vector theta(sz);
    for (Eigen::Index i = 0; i < sz; ++i) theta(i) = draw_theta(config.theta_law, rng);

    Matrix A = Matrix::Zero(sz, sz);
    for (Eigen::Index i = 0; i < sz; ++i) {
      for (Eigen::Index j = i + 1; j < sz; ++j) {
        const double rate = rho * theta(i) * config.B(blocks[i], blocks[j]) * theta(j);
        if (rate <= 0.0) continue;
        std::poisson_distribution<long long> pois(rate);
        const auto k = static_cast<double>(pois(rng));
        A(i, j) = k;
        A(j, i) = k;
      }
    }
    Matrix X(sz, d);
    for (Eigen::Index i = 0; i < sz; ++i) X.row(i) = theta(i) * root.row(blocks[i]);
    return DcsbmSample{Graph(std::move(A)), make_latent_positions(std::move(X), mu),
                       std::move(blocks), std::move(theta), rho, 1};
  };
  return sample_with_policy(draw, seed, policy);
}

void RdpgConfig::validate() const {
  if (atoms.rows() == 0 || atoms.cols() == 0) throw InvalidConfig("atoms must be non-empty");
  validate_probabilities(atom_probs, "atom_probs");
  if (atom_probs.size() != atoms.rows())
    throw InvalidConfig("atom_probs length must equal the number of atoms");
  const Matrix gram = atoms * atoms.transpose();
  if (gram.minCoeff() < -1e-12) throw InvalidConfig("atoms must have non-negative inner products");
  validate_theta_law(degree_multiplier_law);
  validate_sparsity(sparsity);
}

double calibrate_rho(const RdpgConfig& config, std::size_t n) {
  if (!std::holds_alternative<TargetMeanDegree>(config.sparsity))
    throw InvalidConfig("calibrate_rho needs a target mean degree");
  const double et = theta_mean(config.degree_multiplier_law);
  const Vector mean_atom = config.atoms.transpose() * config.atom_probs;
  return resolve_rho(config.sparsity, n, et * et * mean_atom.squaredNorm());
}

RdpgSample sample_rdpg(const RdpgConfig& config, std::size_t n, std::uint64_t seed,
                       IsolatedPolicy policy) {
  if (n < 2) throw InvalidConfig("need at least two nodes");
  config.validate();
  const double rho = std::holds_alternative<ExplicitRho>(config.sparsity)
                         ? std::get<ExplicitRho>(config.sparsity).rho
                         : calibrate_rho(config, n);
  const Vector mu =
      theta_mean(config.degree_multiplier_law) * (config.atoms.transpose() * config.atom_probs);
  const auto sz = static_cast<Eigen::Index>(n);

  auto draw = [&](std::uint64_t s) {
    Rng rng(s);
    std::vector<int> idx(n);
    for (auto& k : idx) k = inverse_cdf(config.atom_probs, uniform01(rng));
    Matrix X(sz, config.atoms.cols());
    for (Eigen::Index i = 0; i < sz; ++i)
      X.row(i) = draw_theta(config.degree_multiplier_law, rng) * config.atoms.row(idx[i]);

    Matrix A = Matrix::Zero(sz, sz);
    for (Eigen::Index i = 0; i < sz; ++i) {
      for (Eigen::Index j = i + 1; j < sz; ++j) {
        const double mean = rho * X.row(i).dot(X.row(j));
        if (mean <= 0.0) continue;
        double a = 0.0;
        if (config.edge_law == EdgeLaw::Bernoulli) {
          if (mean > 1.0 + 1e-12)
            throw ProbabilityOverflow("rho * X_i'X_j = " + std::to_string(mean) +
                                      " exceeds 1 for a Bernoulli edge");
          a = uniform01(rng) < mean ? 1.0 : 0.0;
        } else {
          std::poisson_distribution<long long> pois(mean);
          a = static_cast<double>(pois(rng));
        }
        A(i, j) = a;
        A(j, i) = a;
      }
    }
    return RdpgSample{Graph(std::move(A)), make_latent_positions(std::move(X), mu), std::move(idx),
                      rho, 1};
  };
  return sample_with_policy(draw, seed, policy);
}

ExpectedDegrees expected_degrees(const Matrix& X, double rho) {
  const Vector total = X.colwise().sum().transpose();
  Vector delta = rho * (X * total - X.rowwise().squaredNorm());
  const double dmin = delta.size() > 0 ? delta.minCoeff() : 0.0;
  return {std::move(delta), dmin};
}

Vector sample_bernoulli_covariates(double p, std::size_t n, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig("Bernoulli probability must lie in [0, 1]");
  Rng rng(seed);
  Vector t(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = uniform01(rng) < p ? 1.0 : 0.0;
  return t;
}

}  // namespace peerlab
