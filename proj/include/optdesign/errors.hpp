// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace optdesign {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The basis is not identifiable on the candidate set: rank(V) < N.
class RankDeficient : public Error {
 public:
  RankDeficient(long expected, long actual)
      : Error("Vandermonde matrix is rank deficient: rank " +
              std::to_string(actual) + " < N = " + std::to_string(expected)),
        expected(expected),
        actual(actual) {}
  long expected;
  long actual;
};

class NegativeWeight : public Error {
 public:
  NegativeWeight(long index, double value)
      : Error("negative design weight w[" + std::to_string(index) +
              "] = " + std::to_string(value)),
        index(index),
        value(value) {}
  long index;
  double value;
};

// The current design cannot identify the model: diag(|z|)V lost column rank.
class SupportRankDeficient : public Error {
 public:
  using Error::Error;
  SupportRankDeficient() : Error("support-weighted Vandermonde is rank deficient") {}
};

// Factorization of the step Hessian failed (or the iterative solve hit
// negative curvature / stalled); the time step is too large.
class IndefiniteHessian : public Error {
 public:
  using Error::Error;
  IndefiniteHessian() : Error("step Hessian is not positive definite") {}
};

class ZeroGradientStart : public Error {
 public:
  ZeroGradientStart() : Error("gradient vanishes at the initial point") {}
};

class MomentMismatch : public Error {
 public:
  MomentMismatch(double residual, double scale)
      : Error("compressed design does not match moments: residual " +
              std::to_string(residual) + " vs scale " + std::to_string(scale)),
        residual(residual),
        scale(scale) {}
  double residual;
  double scale;
};

class DenseCapExceeded : public Error {
 public:
  DenseCapExceeded(long m, long cap)
      : Error("dense matrix of dimension " + std::to_string(m) +
              " exceeds cap " + std::to_string(cap)),
        m(m),
        cap(cap) {}
  long m;
  long cap;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

}  // namespace optdesign
