#pragma once

#include <cmath>
#include <sstream>

#include "gtfdi/engine/plant.hpp"
#include "gtfdi/num/finite_difference.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::engine {

struct TrimOptions {
  double tolerance = 1e-9;  ///< scaled residual 2-norm
  int max_iterations = 80;
  double max_rel_step = 0.25;  ///< per-component Newton step clamp
};

struct TrimResult {
  Vec4 state = Vec4::Zero();
  Vec5 outputs = Vec5::Zero();
  double residual_norm = 0.0;
  int iterations = 0;
};

/// Steady-state solve at fixed fuel flow, intake conditions, and health.
/// Damped Newton with a backtracking line search on the scaled residual;
/// scaling uses the initial-guess magnitudes so the mixed-unit state
/// (bar / rpm / K) is weighted evenly.
inline TrimResult trim(const EngineModel& model, double fuel, const RamConditions& ram,
                       const HealthFactors& lam, const Vec4& guess,
                       const TrimOptions& opt = TrimOptions{}) {
  Vec4 scale;
  for (int i = 0; i < kStateDim; ++i) scale[i] = std::max(std::abs(guess[i]), 1.0);

  const auto residual = [&](const Vec4& x) -> Vec4 {
    return model.derivatives(x, fuel, ram, lam).cwiseQuotient(scale);
  };

  const auto try_residual = [&](const Vec4& x, Vec4* r) -> bool {
    if ((x.array() <= 0.0).any()) return false;
    try {
      *r = residual(x);
    } catch (const NumericalError&) {
      return false;
    }
    return r->allFinite();
  };

  Vec4 x = guess;
  Vec4 r;
  if (!try_residual(x, &r)) throw NumericalError("trim: infeasible initial guess");
  double rnorm = r.norm();

  for (int it = 1; it <= opt.max_iterations; ++it) {
    if (rnorm <= opt.tolerance) {
      TrimResult out;
      out.state = x;
      out.outputs = model.outputs(x, ram, lam);
      out.residual_norm = rnorm;
      out.iterations = it - 1;
      return out;
    }

    const Mat4 jac = num::fd_jacobian<kStateDim, kStateDim>(residual, x);
    Vec4 step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) throw NumericalError("trim: singular Jacobian");

    // Clamp outsized steps so the iterate stays in the physical region.
    for (int i = 0; i < kStateDim; ++i) {
      const double lim = opt.max_rel_step * std::max(std::abs(x[i]), scale[i]);
      step[i] = std::clamp(step[i], -lim, lim);
    }

    double t = 1.0;
    bool accepted = false;
    while (t >= 1.0 / 1024.0) {
      Vec4 r_new;
      const Vec4 x_new = x + t * step;
      if (try_residual(x_new, &r_new) && r_new.norm() < rnorm * (1.0 - 1e-4 * t)) {
        x = x_new;
        r = r_new;
        rnorm = r_new.norm();
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "trim: line search stalled at scaled residual " << rnorm;
      throw NumericalError(msg.str());
    }
  }

  if (rnorm <= opt.tolerance) {
    TrimResult out;
    out.state = x;
    out.outputs = model.outputs(x, ram, lam);
    out.residual_norm = rnorm;
    out.iterations = opt.max_iterations;
    return out;
  }
  std::ostringstream msg;
  msg << "trim: no convergence after " << opt.max_iterations
      << " iterations, scaled residual " << rnorm;
  throw NumericalError(msg.str());
}

}  // namespace gtfdi::engine
