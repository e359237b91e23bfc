#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bregman {

// Primal and dual points share one representation: the domain is R^d with the
// Euclidean norm, so the dual norm coincides with the primal one.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: dimension mismatch, out-of-range parameters.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The oracle or map lacks a derivative or closed form the operation needs.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of the operation does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// NaN or Inf produced where a finite value was required.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// An inner solver missed its residual target. Carries the best iterate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, Vector best, double residual)
      : Error(what), best_(std::move(best)), residual_(residual) {}

  const Vector& best_iterate() const { return best_; }
  double residual() const { return residual_; }

 private:
  Vector best_;
  double residual_;
};

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// Throws InputError unless every coordinate is finite.
inline const Vector& require_finite(const Vector& v, const char* what = "point") {
  if (v.size() < 1) {
    throw InputError(std::string(what) + ": dimension must be at least 1");
  }
  if (!v.allFinite()) {
    throw InputError(std::string(what) + ": non-finite coordinate");
  }
  return v;
}

inline void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw InputError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace bregman
