#pragma once

#include <utility>

#include "gtfdi/errors.hpp"
#include "gtfdi/num/expm.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::linearize {

/// Zero-order-hold discretization: one matrix exponential of the augmented
/// block [[A_c, B_c], [0, 0]]·T_s yields A = exp(A_c·T_s) in the top-left and
/// B = (∫₀^{T_s} exp(A_c τ) dτ)·B_c in the top-right.
template <class DA, class DB>
std::pair<MatX, MatX> discretize(const Eigen::MatrixBase<DA>& A_c,
                                 const Eigen::MatrixBase<DB>& B_c, double sample_period) {
  const Eigen::Index n = A_c.rows();
  const Eigen::Index m = B_c.cols();
  if (A_c.cols() != n || B_c.rows() != n)
    throw ValidationError("discretize: inconsistent dimensions");
  if (!(sample_period > 0.0)) throw ValidationError("discretize: sample period must be positive");

  MatX aug = MatX::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = A_c;
  aug.topRightCorner(n, m) = B_c;
  const MatX e = num::expm((aug * sample_period).eval());
  return {e.topLeftCorner(n, n), e.topRightCorner(n, m)};
}

}  // namespace gtfdi::linearize
