#pragma once

#include <cmath>
#include <numbers>

#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::filter {

/// Smallest density reported in linear space; keeps Bayes recursions away
/// from hard zeros deep inside a hypothesis mismatch.
inline constexpr double kLikelihoodFloor = 1e-300;

/// log N(gamma; 0, S) via Cholesky. Throws NumericalError when S is not
/// symmetric positive definite.
template <int N>
double gaussian_loglike(const Vec<N>& gamma, const Mat<N, N>& s) {
  const Eigen::LLT<Mat<N, N>> llt(s);
  if (llt.info() != Eigen::Success)
    throw NumericalError("covariance in density evaluation is not positive definite");
  const Vec<N> z = llt.matrixL().solve(gamma);
  double half_logdet = 0.0;
  for (int i = 0; i < N; ++i) half_logdet += std::log(llt.matrixL()(i, i));
  return -0.5 * (N * std::log(2.0 * std::numbers::pi) + z.squaredNorm()) - half_logdet;
}

/// Linear-space density with underflow clamped to the floor. Non-finite
/// log-densities map to exactly zero so a dead track carries no evidence.
inline double likelihood_from_log(double loglike) {
  if (!std::isfinite(loglike)) return 0.0;
  return std::max(std::exp(loglike), kLikelihoodFloor);
}

template <int N>
double gaussian_likelihood(const Vec<N>& gamma, const Mat<N, N>& s) {
  return likelihood_from_log(gaussian_loglike<N>(gamma, s));
}

}  // namespace gtfdi::filter
