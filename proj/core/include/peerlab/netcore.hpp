#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace peerlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

// Undirected, non-negative, hollow weighted graph stored as a dense matrix.
class Graph {
 public:
  // Throws InvalidGraph unless `weights` is square, symmetric, hollow and non-negative.
  explicit Graph(Matrix weights);

  static Graph empty(std::size_t n);
  // Repeated pairs accumulate their weights. Self-loops are rejected.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  const Matrix& weights() const noexcept { return weights_; }
  double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }

  // Each undirected edge once, with i < j, in row-major order.
  std::vector<Edge> edges() const;

 private:
  Matrix weights_;
};

// d_i = sum_j A_ij.
Vector degrees(const Graph& graph);

// The row-normalized operator G = D^{-1} A.
//
// Immutable after construction. The operator keeps its own dense copy of G
// and the degree vector; it does not reference the source graph.
class AveragingOperator {
 public:
  // Throws IsolatedNode for the first node with zero degree.
  explicit AveragingOperator(const Graph& graph);

  std::size_t size() const noexcept { return static_cast<std::size_t>(g_.rows()); }
  const Matrix& matrix() const noexcept { return g_; }
  const Vector& degrees() const noexcept { return degrees_; }

  // Gv; throws DimensionMismatch when v.size() != n.
  Vector apply(const Vector& v) const;
  // Column-wise GV.
  Matrix apply(const Matrix& v) const;

  // D^{-1/2} A D^{-1/2}, which is similar to G.
  Matrix symmetric_similar() const;

  // Real spectrum of G in descending order.
  Vector eigenvalues() const;

 private:
  Matrix g_;
  Vector degrees_;
};

AveragingOperator averaging_operator(const Graph& graph);
inline Vector apply(const AveragingOperator& op, const Vector& v) { return op.apply(v); }
inline Matrix apply(const AveragingOperator& op, const Matrix& v) { return op.apply(v); }
inline Vector eigenvalues(const AveragingOperator& op) { return op.eigenvalues(); }

struct FrobeniusStats {
  double frob_sq;     // sum_ij G_ij^2
  double rate_bound;  // sqrt(n / frob_sq)
};

FrobeniusStats frobenius_stats(const AveragingOperator& op);

// Edge-list text format:
//   # comment lines
//   n=<count>
//   i j w        (0-based ids, one undirected edge per line)
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& graph);
void write_edge_list_file(const std::string& path, const Graph& graph);

}  // namespace peerlab
