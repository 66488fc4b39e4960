#pragma once

#include <span>

#include "gtfdi/engine/plant.hpp"
#include "gtfdi/types.hpp"
#include "gtfdi/util/rng.hpp"

namespace gtfdi::engine {

/// Additive step bias on one sensor channel, active from `onset_sample` on.
struct FaultEvent {
  Sensor sensor = kCompressorTemp;
  double bias = 0.0;          ///< physical units of the affected channel
  long onset_sample = 0;
};

/// Measurement model: clean outputs plus per-channel Gaussian noise and any
/// active bias faults.  Noise SDs are percentages of the design-point outputs
/// (stored absolute here), optionally scaled by a campaign-wide factor.
class SensorSuite {
 public:
  SensorSuite(const EngineModel& model, double noise_scale = 1.0)
      : model_(&model) {
    const EngineConfig& cfg = model.config();
    sd_abs_ = (cfg.noise.sd_output_pct / 100.0).cwiseProduct(
                  cfg.design_outputs.cwiseAbs()) *
              noise_scale;
  }

  const Vec5& noise_sd() const { return sd_abs_; }

  /// Y(k) = G(X, lambda) + sum of active biases + v(k).  Pass rng = nullptr
  /// for a noise-free reading.
  Vec5 measure(const Vec4& x, const RamConditions& ram, const HealthFactors& lam,
               std::span<const FaultEvent> faults, long k, Rng* rng) const {
    Vec5 y = model_->outputs(x, ram, lam);
    for (const FaultEvent& f : faults)
      if (k >= f.onset_sample) y[static_cast<int>(f.sensor)] += f.bias;
    if (rng != nullptr)
      for (int c = 0; c < kOutputDim; ++c) y[c] += sd_abs_[c] * rng->gaussian();
    return y;
  }

 private:
  const EngineModel* model_;
  Vec5 sd_abs_;
};

/// Ambient process noise: perturbs the static (T_amb, P_amb) pair by
/// percentages of standard sea-level conditions, then rebuilds ram conditions.
class AmbientNoise {
 public:
  AmbientNoise(const EngineConfig& cfg, double noise_scale = 1.0) {
    sd_t_ = cfg.noise.sd_ambient_pct[0] / 100.0 * cfg.ambient.t_sl_k * noise_scale;
    sd_p_ = cfg.noise.sd_ambient_pct[1] / 100.0 * cfg.ambient.p_sl_bar * noise_scale;
    gamma_ = cfg.gamma;
    model_ = cfg.ambient;
  }

  RamConditions perturb(const RamConditions& clean, Rng* rng) const {
    if (rng == nullptr) return clean;
    const double t = clean.t_amb_k + sd_t_ * rng->gaussian();
    const double p = clean.p_amb_bar + sd_p_ * rng->gaussian();
    return ram_from_static(t, p, clean.mach, gamma_);
  }

 private:
  double sd_t_ = 0.0, sd_p_ = 0.0, gamma_ = 1.4;
  AmbientModel model_;
};

}  // namespace gtfdi::engine
