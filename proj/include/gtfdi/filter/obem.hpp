#pragma once

#include "gtfdi/engine/plant.hpp"
#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::filter {

/// On-board engine model: the plant integrated with the *estimated* health
/// baseline, fed noise-free ambient conditions and the measured fuel flow.
/// Never sees sensor faults.  Can be pinned to a fixed state for the
/// frozen-anchor reduction checks.
class ObemRunner {
 public:
  ObemRunner(const engine::EngineModel& model, const engine::HealthFactors& lambda_hat,
             const Vec4& x0)
      : model_(&model), lambda_hat_(lambda_hat), x_(x0) {}

  /// Advance one sample with inputs held constant over the step.
  void step(double fuel, const engine::RamConditions& ram, double dt) {
    if (frozen_) return;
    x_ = model_->step_const(x_, dt, engine::PlantInputs{fuel, ram}, lambda_hat_);
  }

  Vec5 outputs(const engine::RamConditions& ram) const {
    if (frozen_) return frozen_y_;
    return model_->outputs(x_, ram, lambda_hat_);
  }

  const Vec4& state() const { return frozen_ ? frozen_x_ : x_; }
  const engine::HealthFactors& baseline() const { return lambda_hat_; }

  /// Periodic health-baseline refresh.  The linear model bank is untouched by
  /// design; only the nonlinear reference trajectory responds.
  void update_baseline(const engine::HealthFactors& lam) {
    for (double v : {lam.eta_c, lam.eta_t, lam.flow_c, lam.flow_t})
      if (!(v > 0.0 && v <= 1.0))
        throw ValidationError("health baseline outside (0, 1]");
    lambda_hat_ = lam;
  }

  /// Pin state and outputs (reduction checks: a frozen reference turns every
  /// hybrid filter into its fixed-anchor linear counterpart).
  void freeze_at(const Vec4& x, const Vec5& y) {
    frozen_ = true;
    frozen_x_ = x;
    frozen_y_ = y;
  }
  bool frozen() const { return frozen_; }

 private:
  const engine::EngineModel* model_;
  engine::HealthFactors lambda_hat_;
  Vec4 x_;
  bool frozen_ = false;
  Vec4 frozen_x_ = Vec4::Zero();
  Vec5 frozen_y_ = Vec5::Zero();
};

}  // namespace gtfdi::filter
