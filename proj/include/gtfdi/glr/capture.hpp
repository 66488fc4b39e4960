#pragma once

#include <vector>

#include "gtfdi/errors.hpp"
#include "gtfdi/glr/estimate.hpp"
#include "gtfdi/glr/signature.hpp"
#include "gtfdi/linearize/model_bank.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::glr {

/// Windowed severity estimation for one isolated sensor: advances the
/// per-model signature recursions from the detection sample, fuses them with
/// the no-fault-mode weights supplied per sample, and accumulates the
/// estimator sums against the covariance frozen at detection. A nonzero
/// baseline (the standing pre-onset residual mean) is subtracted from every
/// innovation so follow-on faults are measured against the already-isolated
/// background.
class SeverityCapture {
 public:
  SeverityCapture(const linearize::ModelBank* bank, int sensor, long k_ds, long window,
                  const Mat5& s_frozen, const Vec5& baseline = Vec5::Zero())
      : bank_(bank),
        sensor_(sensor),
        k_ds_(k_ds),
        window_(window),
        baseline_(baseline),
        sigs_(bank == nullptr ? 0 : static_cast<size_t>(bank->size())),
        acc_(Vec5::Unit(sensor), s_frozen) {
    if (bank_ == nullptr || bank_->size() == 0)
      throw ValidationError("severity capture requires a loaded model bank");
    if (sensor < 0 || sensor >= kOutputDim)
      throw ValidationError("severity capture sensor index out of range");
    if (window < 0) throw ValidationError("severity window must be nonnegative");
  }

  /// Feed the no-fault-mode fused innovation and weights for one sample,
  /// starting with the detection sample. Returns true once the window
  /// [k_ds, k_ds + window] is fully consumed.
  bool consume(const Vec5& gamma_c, const VecX& weights) {
    if (complete()) return true;
    for (size_t i = 0; i < sigs_.size(); ++i)
      signature_step(sigs_[i], bank_->models[i]);
    const FusedSignature f = fuse_signatures(sigs_, weights);
    acc_.add(f.G, gamma_c - baseline_);
    ++consumed_;
    return complete();
  }

  bool complete() const { return consumed_ >= window_ + 1; }
  long consumed() const { return consumed_; }
  int sensor() const { return sensor_; }
  long k_ds() const { return k_ds_; }

  /// Severity estimate in scaled units along the sensor direction.
  BiasEstimate finish() const { return acc_.finish(); }

 private:
  const linearize::ModelBank* bank_;
  int sensor_;
  long k_ds_;
  long window_;
  long consumed_ = 0;
  Vec5 baseline_;
  std::vector<SignatureState> sigs_;
  BiasAccumulator acc_;
};

}  // namespace gtfdi::glr
