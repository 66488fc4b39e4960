#pragma once

#include "gtfdi/linearize/model_bank.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::filter {

struct StepResult {
  Vec5 y_hat;  ///< predicted measurement deviation (scaled), hypothesis offset included
  Vec5 gamma;  ///< innovation (scaled), emitted before the state update
};

/// One innovation step in the scaled deviation space, shared by the hybrid
/// bank (reference = onboard model trajectory, du = 0) and the anchored
/// linear variants (reference = stored steady state, du = scaled input
/// deviation from that anchor). The gain corrects the estimate before
/// propagation — the convention the failure-signature recursion is exact for.
inline StepResult innovation_step(const linearize::ScaledDiscreteModel& m, Vec4& d,
                                  const Vec5& y_dev, const Vec5& offset, double du) {
  StepResult r;
  r.y_hat = m.C * d + offset;
  r.gamma = y_dev - r.y_hat;
  d = (m.A * (d + m.K * r.gamma) + m.B * du).eval();
  return r;
}

}  // namespace gtfdi::filter
