#pragma once

#include <cmath>
#include <string>

#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::num {

/// Central-difference Jacobian of f : R^N -> R^M with per-component step
/// h_j = rel_step * max(1, |x_j|).
template <int M, int N, class F>
Mat<M, N> fd_jacobian(F&& f, const Vec<N>& x, double rel_step = 1e-6) {
  Mat<M, N> jac;
  for (int j = 0; j < N; ++j) {
    const double h = rel_step * std::max(1.0, std::abs(x[j]));
    Vec<N> xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    const Vec<M> fp = f(xp);
    const Vec<M> fm = f(xm);
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < N; ++c)
      if (!std::isfinite(jac(r, c)))
        throw NumericalError("non-finite Jacobian entry at (" + std::to_string(r) + ", " +
                             std::to_string(c) + ")");
  return jac;
}

}  // namespace gtfdi::num
