#pragma once

#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::filter {

enum class CovarianceMode {
  kStationary,  ///< constant solution from the gain design
  kEmpirical,   ///< exponentially weighted estimate of recent innovations
};

struct CovarianceOptions {
  CovarianceMode mode = CovarianceMode::kStationary;
  double forgetting = 0.995;  ///< EWMA memory; effective window ~2/(1-forgetting)
  double epsilon = 1e-10;     ///< SPD floor folded into each rank-1 update
};

/// Innovation covariance for one filter track. The empirical variant is
/// seeded from the stationary solution, so it is full rank from the first
/// sample and needs no warm-up fallback.
class InnovationCovariance {
 public:
  InnovationCovariance() : InnovationCovariance(Mat5::Identity(), CovarianceOptions{}) {}

  InnovationCovariance(const Mat5& stationary, const CovarianceOptions& opt)
      : s_(stationary), stationary_(stationary), opt_(opt) {
    if (opt.mode == CovarianceMode::kEmpirical &&
        (opt.forgetting <= 0.0 || opt.forgetting >= 1.0))
      throw ValidationError("covariance forgetting factor must lie in (0, 1)");
    if (opt.epsilon < 0.0) throw ValidationError("covariance epsilon must be nonnegative");
  }

  const Mat5& value() const { return s_; }
  const Mat5& stationary_value() const { return stationary_; }
  CovarianceMode mode() const { return opt_.mode; }

  /// Folds one innovation into the estimate; no-op in stationary mode.
  void update(const Vec5& gamma) {
    if (opt_.mode != CovarianceMode::kEmpirical) return;
    const double lam = opt_.forgetting;
    s_ = lam * s_ +
         (1.0 - lam) * (gamma * gamma.transpose() + opt_.epsilon * Mat5::Identity());
    s_ = 0.5 * (s_ + s_.transpose()).eval();
  }

  void reset() { s_ = stationary_; }

 private:
  Mat5 s_;
  Mat5 stationary_;
  CovarianceOptions opt_;
};

}  // namespace gtfdi::filter
