#include "peerlab/identify.hpp"

#include <algorithm>
#include <cmath>

#include "peerlab/error.hpp"

namespace peerlab {

std::size_t distinct_eigenvalue_count(const Vector& eigenvalues, double rel_tol) {
  if (eigenvalues.size() == 0) return 0;
  std::vector<double> ev(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::sort(ev.begin(), ev.end());
  const double spread = ev.back() - ev.front();
  const double gap = rel_tol * std::max(1.0, spread);
  std::size_t clusters = 1;
  for (std::size_t k = 1; k < ev.size(); ++k)
    if (ev[k] - ev[k - 1] > gap) ++clusters;
  return clusters;
}

std::size_t distinct_eigenvalue_count(const AveragingOperator& op, double rel_tol) {
  return distinct_eigenvalue_count(op.eigenvalues(), rel_tol);
}

PowerIndependence powers_linearly_independent(const AveragingOperator& op, double tol) {
  const auto n = static_cast<Eigen::Index>(op.size());
  const Matrix& g = op.matrix();
  Matrix stacked(n * n, 3);
  stacked.col(0) = Matrix::Identity(n, n).reshaped();
  stacked.col(1) = g.reshaped();
  stacked.col(2) = (g * g).reshaped();
  const std::size_t r = numerical_rank(stacked, tol);
  return {r == 3, r};
}

VifResult vif(const Matrix& W) {
  const Eigen::Index k = W.cols();
  if (W.rows() <= k) throw DimensionMismatch("VIF needs more rows than columns");
  VifResult out;
  out.values.resize(static_cast<std::size_t>(k));
  out.capped.resize(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    Matrix others(W.rows(), k - 1);
    others.leftCols(j) = W.leftCols(j);
    others.rightCols(k - 1 - j) = W.rightCols(k - 1 - j);
    const Vector y = W.col(j);
    double r2 = 0.0;
    if (k > 1) {
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(others);
      cod.setThreshold(1e-12);
      if (cod.rank() < others.cols()) out.rank_deficient = true;
      const Vector resid = y - others * cod.solve(y);
      const double total = y.squaredNorm();
      r2 = total > 0.0 ? 1.0 - resid.squaredNorm() / total : 1.0;
    }
    const auto idx = static_cast<std::size_t>(j);
    if (r2 >= 1.0 - 1e-12) {
      out.values[idx] = kVifCap;
      out.capped[idx] = true;
    } else {
      out.values[idx] = 1.0 / (1.0 - std::max(r2, 0.0));
    }
  }
  return out;
}

double gt_deviation(const Matrix& gt, const Vector& tau) {
  if (gt.cols() != tau.size()) throw DimensionMismatch("tau length must equal covariate count");
  if (gt.rows() == 0) return 0.0;
  return (gt.rowwise() - tau.transpose()).rowwise().norm().maxCoeff();
}

double min_gram_eigenvalue(const Matrix& W) {
  const Matrix gram = W.transpose() * W / static_cast<double>(W.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().minCoeff());
}

DiagnosticsReport colinearity_report(const AveragingOperator& op, const DesignMatrix& W,
                                     const Matrix& T, const std::optional<Truth>& truth,
                                     const ReportOptions& options) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (T.rows() != n || static_cast<Eigen::Index>(W.rows()) != n)
    throw DimensionMismatch("report inputs must have one row per node");
  DiagnosticsReport r;

  const Vector spectrum = options.eigenvalues ? *options.eigenvalues : op.eigenvalues();
  r.distinct_eigs = distinct_eigenvalue_count(spectrum);
  r.identified = r.distinct_eigs >= 3;
  if (options.power_rank) r.ig2_rank = powers_linearly_independent(op).rank;

  const VifResult v = vif(W.W);
  r.vif = v.values;
  r.vif_rank_deficient = v.rank_deficient;

  const Matrix gt = op.apply(T);
  const Vector tau = truth ? truth->tau : Vector(T.colwise().mean().transpose());
  r.gt_dev = gt_deviation(gt, tau);
  r.tau_used = tau.size() == 1 ? tau(0) : tau.norm();

  r.eta_used = truth ? eta(truth->params, tau) : std::nan("");
  r.gy_dev = std::nan("");
  if (W.labels.size() > 1 && W.labels[1] == "beta") {
    const Vector gy = W.W.col(1);
    if (!truth) r.eta_used = gy.mean();
    r.gy_dev = (gy.array() - r.eta_used).abs().maxCoeff();
  }

  r.sigma_min = min_gram_eigenvalue(W.W);
  const FrobeniusStats fs = frobenius_stats(op);
  r.frob_sq = fs.frob_sq;
  r.rate_bound = fs.rate_bound;
  return r;
}

}  // namespace peerlab
