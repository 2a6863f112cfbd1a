#include "peerlab/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "peerlab/error.hpp"

namespace peerlab {

Graph::Graph(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) throw InvalidGraph("adjacency matrix must be square");
  const Eigen::Index n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) throw InvalidGraph("self-loop at node " + std::to_string(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = weights_(i, j);
      if (!(w >= 0.0) || !std::isfinite(w))
        throw InvalidGraph("edge weights must be finite and non-negative");
      if (w != weights_(j, i)) throw InvalidGraph("adjacency matrix must be symmetric");
    }
  }
}

Graph Graph::empty(std::size_t n) {
  const auto sz = static_cast<Eigen::Index>(n);
  return Graph(Matrix::Zero(sz, sz));
}

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges) {
  const auto sz = static_cast<Eigen::Index>(n);
  Matrix w = Matrix::Zero(sz, sz);
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) throw InvalidGraph("edge endpoint out of range");
    if (e.i == e.j) throw InvalidGraph("self-loop at node " + std::to_string(e.i));
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
      throw InvalidGraph("edge weights must be finite and non-negative");
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    w(i, j) += e.weight;
    w(j, i) = w(i, j);
  }
  return Graph(std::move(w));
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (const double w = weights_(i, j); w != 0.0) out.push_back({i, j, w});
  return out;
}

Vector degrees(const Graph& graph) { return graph.weights().rowwise().sum(); }

AveragingOperator::AveragingOperator(const Graph& graph) : degrees_(peerlab::degrees(graph)) {
  for (Eigen::Index i = 0; i < degrees_.size(); ++i)
    if (!(degrees_(i) > 0.0)) throw IsolatedNode(static_cast<std::size_t>(i));
  g_ = degrees_.cwiseInverse().asDiagonal() * graph.weights();
}

Vector AveragingOperator::apply(const Vector& v) const {
  if (v.size() != g_.cols())
    throw DimensionMismatch("vector of length " + std::to_string(v.size()) +
                            " applied to operator of size " + std::to_string(g_.cols()));
  return g_ * v;
}

Matrix AveragingOperator::apply(const Matrix& v) const {
  if (v.rows() != g_.cols())
    throw DimensionMismatch("matrix with " + std::to_string(v.rows()) +
                            " rows applied to operator of size " + std::to_string(g_.cols()));
  return g_ * v;
}

Matrix AveragingOperator::symmetric_similar() const {
  // D^{1/2} G D^{-1/2} = D^{-1/2} A D^{-1/2}; symmetrize to drop rounding asymmetry.
  const Vector root = degrees_.cwiseSqrt();
  Matrix s = root.asDiagonal() * g_ * root.cwiseInverse().asDiagonal();
  return (0.5 * (s + s.transpose())).eval();
}

Vector AveragingOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric_similar(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolver failed");
  Vector ev = solver.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
  return ev;
}

AveragingOperator averaging_operator(const Graph& graph) { return AveragingOperator(graph); }

FrobeniusStats frobenius_stats(const AveragingOperator& op) {
  const double frob_sq = op.matrix().squaredNorm();
  return {frob_sq, std::sqrt(static_cast<double>(op.size()) / frob_sq)};
}

}  // namespace peerlab
