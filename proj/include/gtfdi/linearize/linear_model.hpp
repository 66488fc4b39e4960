#pragma once

#include "gtfdi/engine/plant.hpp"
#include "gtfdi/num/finite_difference.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::linearize {

/// Continuous-time linearization of the plant at one trimmed operating point.
struct ContinuousLinearModel {
  Mat4 A_c = Mat4::Zero();
  Vec4 B_c = Vec4::Zero();
  Mat54 C_c = Mat54::Zero();
  Vec4 x_ss = Vec4::Zero();
  double u_ss = 0.0;
  Vec5 y_ss = Vec5::Zero();
};

/// Central-difference Jacobians of the dynamics and output maps about
/// (x_ss, u_ss) at fixed ambient and health factors.
inline ContinuousLinearModel jacobians(const engine::EngineModel& model, const Vec4& x_ss,
                                       double u_ss, const engine::RamConditions& ram,
                                       const engine::HealthFactors& lam) {
  ContinuousLinearModel out;
  out.x_ss = x_ss;
  out.u_ss = u_ss;
  out.y_ss = model.outputs(x_ss, ram, lam);

  out.A_c = num::fd_jacobian<kStateDim, kStateDim>(
      [&](const Vec4& x) { return model.derivatives(x, u_ss, ram, lam); }, x_ss);
  const auto b = num::fd_jacobian<kStateDim, 1>(
      [&](const Vec<1>& u) { return model.derivatives(x_ss, u[0], ram, lam); },
      Vec<1>{u_ss});
  out.B_c = b.col(0);
  out.C_c = num::fd_jacobian<kOutputDim, kStateDim>(
      [&](const Vec4& x) { return model.outputs(x, ram, lam); }, x_ss);
  return out;
}

}  // namespace gtfdi::linearize
