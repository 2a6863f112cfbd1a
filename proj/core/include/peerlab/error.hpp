#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace peerlab {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGraph : public Error {
 public:
  using Error::Error;
};

// The averaging operator is undefined when a node has zero degree.
class IsolatedNode : public Error {
 public:
  explicit IsolatedNode(std::size_t node)
      : Error("node " + std::to_string(node) + " is isolated (zero degree)"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class NegativeTarget : public Error {
 public:
  using Error::Error;
};

// A Bernoulli edge law was asked for a probability above one.
class ProbabilityOverflow : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

// Some latent position has a non-positive inner product with the mean.
class DegenerateInnerProduct : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace peerlab
