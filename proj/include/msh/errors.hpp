#pragma once

#include <stdexcept>
#include <string>

namespace msh {

// Base class for everything this library throws on its own behalf.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimal subset does not determine a model (coincident/collinear points,
// rank-deficient design matrix).
class DegenerateSubset : public Error {
 public:
  using Error::Error;
};

// Fewer data points than the minimal subset size of the model.
class InsufficientPoints : public Error {
 public:
  using Error::Error;
};

// Too many consecutive degenerate draws while generating one hypothesis.
class GenerationExhausted : public Error {
 public:
  using Error::Error;
};

// IKOSE cannot produce a positive scale (zero K-th residual or the inlier
// count collapsed to K or below).
class DegenerateScale : public Error {
 public:
  using Error::Error;
};

// Every hypothesis was dropped while building the hypergraph.
class EmptyHypergraph : public Error {
 public:
  using Error::Error;
};

// Tanimoto distance against an all-zero preference vector.
class ZeroVector : public Error {
 public:
  using Error::Error;
};

// Weight-aware sampling with no positive vertex weight.
class AllZeroWeights : public Error {
 public:
  using Error::Error;
};

// Mode selection needs at least two scored vertices.
class TooFewVertices : public Error {
 public:
  using Error::Error;
};

// Data dimensionality does not match the model family.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Malformed dataset file; carries the 1-based offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line_number)
      : Error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  int line;
};

// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace msh
