#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "peerlab/lim.hpp"
#include "peerlab/netcore.hpp"

namespace peerlab {

inline constexpr double kDistinctEigTol = 1e-8;
inline constexpr double kVifCap = 1e12;

// Clusters of the sorted spectrum, splitting where a gap exceeds
// rel_tol * max(1, spread).
std::size_t distinct_eigenvalue_count(const Vector& eigenvalues, double rel_tol = kDistinctEigTol);
std::size_t distinct_eigenvalue_count(const AveragingOperator& op, double rel_tol = kDistinctEigTol);

struct PowerIndependence {
  bool independent = false;
  std::size_t rank = 0;
};

// Rank of [vec(I), vec(G), vec(G^2)].
PowerIndependence powers_linearly_independent(const AveragingOperator& op, double tol = 1e-8);

struct VifResult {
  std::vector<double> values;
  std::vector<bool> capped;  // perfect fit; value replaced by kVifCap
  bool rank_deficient = false;  // some column's regressors were exactly dependent
};

// Uncentered VIF: 1 / (1 - R^2) with R^2 = 1 - |resid|^2 / |col|^2.
VifResult vif(const Matrix& W);
inline VifResult vif(const DesignMatrix& W) { return vif(W.W); }

// Known truth used to centre the colinearity deviations.
struct Truth {
  LimParameters params;
  Vector tau;  // covariate mean
};

struct DiagnosticsReport {
  std::size_t distinct_eigs = 0;
  bool identified = false;  // distinct_eigs >= 3
  std::optional<std::size_t> ig2_rank;
  std::vector<double> vif;
  bool vif_rank_deficient = false;
  double gt_dev = 0.0;  // max_i ||[GT]_i - tau||
  double gy_dev = 0.0;  // max_i |[GY]_i - eta|; NaN when W has no GY column
  double tau_used = 0.0;
  double eta_used = 0.0;
  double sigma_min = 0.0;  // smallest eigenvalue of W'W / n
  double frob_sq = 0.0;
  double rate_bound = 0.0;
};

struct ReportOptions {
  // Rank of {I, G, G^2} costs an n^3 product; harness runs skip it.
  bool power_rank = true;
  // Spectrum of G if the caller already has it.
  const Vector* eigenvalues = nullptr;
};

// max_i ||[GT]_i - tau|| over rows.
double gt_deviation(const Matrix& gt, const Vector& tau);

// When truth is absent, tau is the column means of T and eta is the mean of GY.
// The GY column is recognised by the label "beta" in position 1.
DiagnosticsReport colinearity_report(const AveragingOperator& op, const DesignMatrix& W,
                                     const Matrix& T, const std::optional<Truth>& truth,
                                     const ReportOptions& options = {});

// Smallest eigenvalue of W'W / n.
double min_gram_eigenvalue(const Matrix& W);

}  // namespace peerlab
