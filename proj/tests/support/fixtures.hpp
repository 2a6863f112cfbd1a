#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "peerlab/netcore.hpp"

namespace peerlab::testing {

// A-B, A-C, B-C, C-D with A..D = 0..3.
inline Graph fig1_graph() {
  const std::vector<Edge> e{{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
  return Graph::from_edges(4, e);
}

inline Vector fig1_covariate() { return (Vector(4) << 1, 0, 1, 1).finished(); }

inline Graph complete_graph(std::size_t n, double w = 1.0) {
  const auto sz = static_cast<Eigen::Index>(n);
  Matrix a = Matrix::Constant(sz, sz, w);
  a.diagonal().setZero();
  return Graph(a);
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, 1.0});
  return Graph::from_edges(n, e);
}

// Weighted random graph with a Hamiltonian path, so no node is isolated.
inline Graph random_graph(std::size_t n, double density, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (j == i + 1 || u(rng) < density) e.push_back({i, j, 0.5 + u(rng)});
  return Graph::from_edges(n, e);
}

inline Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Vector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = z(rng);
  return v;
}

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z;
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (auto& x : m.reshaped()) x = z(rng);
  return m;
}

inline std::vector<Eigen::Index> random_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<Eigen::Index> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// P A P' where (P v)_k = v_{perm[k]}.
inline Graph permute(const Graph& g, const std::vector<Eigen::Index>& perm) {
  return Graph(g.weights()(perm, perm));
}

inline Vector permute(const Vector& v, const std::vector<Eigen::Index>& perm) { return v(perm); }
inline Matrix permute_rows(const Matrix& m, const std::vector<Eigen::Index>& perm) {
  return m(perm, Eigen::all);
}

// [Gv]_i = (1/d_i) sum_j A_ij v_j by explicit loops.
inline Vector brute_average(const Graph& g, const Vector& v) {
  const std::size_t n = g.size();
  Vector out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      num += g.weight(i, j) * v(static_cast<Eigen::Index>(j));
      den += g.weight(i, j);
    }
    out(static_cast<Eigen::Index>(i)) = num / den;
  }
  return out;
}

}  // namespace peerlab::testing
