#pragma once

#include <cmath>

#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::glr {

struct BiasEstimate {
  double b_hat = 0.0;     ///< severity along the fault direction (input units)
  double d = 0.0;         ///< signal accumulator
  double c = 0.0;         ///< information accumulator
  double criterion = 0.0; ///< likelihood-ratio value at the optimum: d^2 / c
  long samples = 0;
};

/// Streaming accumulators for the windowed severity estimate: per sample,
/// d += z'G'S^{-1}γ and c += z'G'S^{-1}Gz with the covariance factored once
/// and frozen over the window for numerical stability.
class BiasAccumulator {
 public:
  BiasAccumulator(const Vec5& z, const Mat5& s_frozen) : z_(z), llt_(s_frozen) {
    if (llt_.info() != Eigen::Success)
      throw NumericalError("frozen window covariance is not positive definite");
  }

  void add(const Mat5& g_fused, const Vec5& gamma) {
    const Vec5 gz = g_fused * z_;
    const Vec5 sinv_gz = llt_.solve(gz);
    d_ += sinv_gz.dot(gamma);
    c_ += sinv_gz.dot(gz);
    ++n_;
  }

  long samples() const { return n_; }

  /// Throws when the accumulated information cannot identify the fault.
  BiasEstimate finish(double c_tolerance = 1e-12) const {
    if (n_ == 0) throw ValidationError("severity window is empty");
    if (!(c_ > c_tolerance))
      throw NumericalError("fault direction unidentifiable: information " +
                           std::to_string(c_) + " below tolerance");
    BiasEstimate e;
    e.d = d_;
    e.c = c_;
    e.b_hat = d_ / c_;
    e.criterion = d_ * d_ / c_;
    e.samples = n_;
    return e;
  }

  /// Criterion value at an arbitrary severity: J(b) = 2 b d - b^2 c.
  double criterion_at(double b) const { return 2.0 * b * d_ - b * b * c_; }

 private:
  Vec5 z_;
  Eigen::LLT<Mat5> llt_;
  double d_ = 0.0;
  double c_ = 0.0;
  long n_ = 0;
};

}  // namespace gtfdi::glr
