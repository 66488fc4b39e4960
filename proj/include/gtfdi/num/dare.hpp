#pragma once

#include <string>

#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::num {

struct DareResult {
  MatX P;  ///< stationary prediction-error covariance
  MatX K;  ///< correction gain P·Cᵀ·(C·P·Cᵀ + R)⁻¹, applied before propagation
  MatX S;  ///< stationary innovation covariance C·P·Cᵀ + R
  int iterations = 0;
};

/// Discrete algebraic Riccati equation by fixed-point iteration of the
/// prediction-form recursion
///   P ← A·(P − P·Cᵀ(C·P·Cᵀ + R)⁻¹·C·P)·Aᵀ + Q
/// until ‖ΔP‖∞ ≤ tol.  Requires Q ⪰ 0, R ≻ 0, (A, C) detectable.
/// The returned gain corrects the estimate before it is propagated:
/// x⁺ = A·(x + K·γ); the equivalent predictor gain is A·K.
template <class DA, class DC, class DQ, class DR>
DareResult dare_stationary_gain(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DC>& C,
                                const Eigen::MatrixBase<DQ>& Q, const Eigen::MatrixBase<DR>& R,
                                double tol = 1e-10, int max_iterations = 200000) {
  const Eigen::Index n = A.rows();
  const Eigen::Index q = C.rows();
  if (A.cols() != n || C.cols() != n || Q.rows() != n || Q.cols() != n || R.rows() != q ||
      R.cols() != q)
    throw ValidationError("riccati: inconsistent dimensions");

  MatX P = MatX(Q);
  MatX S(q, q);
  for (int it = 1; it <= max_iterations; ++it) {
    S.noalias() = C * P * C.transpose();
    S += R;
    Eigen::LLT<MatX> llt(S);
    if (llt.info() != Eigen::Success)
      throw NumericalError("riccati: innovation covariance not positive definite");
    // P·Cᵀ·S⁻¹ via the factorization, then the downdated propagation.
    const MatX PCt = P * C.transpose();
    const MatX G = llt.solve(PCt.transpose()).transpose();  // P·Cᵀ·S⁻¹
    MatX next = A * (P - G * PCt.transpose()) * A.transpose();
    next += Q;
    next = 0.5 * (next + next.transpose()).eval();
    const double delta = (next - P).cwiseAbs().maxCoeff();
    P = std::move(next);
    if (!P.allFinite()) throw NumericalError("riccati: iteration diverged");
    if (delta <= tol) {
      DareResult out;
      out.P = P;
      out.S.noalias() = C * P * C.transpose();
      out.S += R;
      Eigen::LLT<MatX> fin(out.S);
      out.K = fin.solve((P * C.transpose()).transpose()).transpose();
      out.iterations = it;
      return out;
    }
  }
  throw NumericalError("riccati: no convergence within " + std::to_string(max_iterations) +
                       " iterations");
}

}  // namespace gtfdi::num
