#pragma once

#include <span>
#include <vector>

#include "gtfdi/filter/covariance.hpp"
#include "gtfdi/fusion/fusion.hpp"
#include "gtfdi/linearize/model_bank.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::filter {

/// Static fault hypothesis: a pre-determined measurement offset in scaled
/// units, applied from session start (always-on per-mode offset).
struct HypothesisSpec {
  int mode = 1;                  ///< 1-based slot within its bank; 1 = no new fault
  Vec5 direction = Vec5::Zero();  ///< unit fault direction; zero for the no-new-fault slot
  double bias = 0.0;              ///< scaled magnitude along `direction`
  Vec5 carried = Vec5::Zero();    ///< standing offset inherited from an isolated fault
  std::vector<int> sensors;       ///< implicated sensor indices, isolation order

  Vec5 offset() const { return carried + bias * direction; }
};

/// No-fault hypothesis plus one bias hypothesis per sensor.
std::vector<HypothesisSpec> single_fault_hypotheses(double bias_scaled);

/// Hypothesis set after isolating `sensor`: that fault continuing, a larger
/// (2x) fault on the same sensor, and the pairings with each other sensor.
std::vector<HypothesisSpec> concurrent_hypotheses(int sensor, double bias_scaled);

struct TrackState {
  Vec4 d = Vec4::Zero();      ///< scaled deviation estimate from the reference
  Vec5 gamma = Vec5::Zero();  ///< last scaled innovation
  double likelihood = 0.0;
  bool alive = true;  ///< cleared permanently on a non-finite innovation
  InnovationCovariance cov;
};

/// Scaled measurement and input deviations relative to model i's reference
/// trajectory. An onboard-model reference carries the input response, so its
/// frames have du = 0; anchored references pass the deviation from their
/// stored steady state.
struct ModelFrame {
  Vec5 y_dev = Vec5::Zero();
  double du = 0.0;
};

/// The stored models run in parallel under one fault hypothesis and are
/// interpolated per step into a single fused innovation, covariance, and
/// density.
class ModeBank {
 public:
  ModeBank(const linearize::ModelBank* bank, HypothesisSpec spec,
           const CovarianceOptions& cov_opt, const fusion::WeightOptions& w_opt);

  /// One sample: innovations, per-track densities against the pre-update
  /// covariances, weight recursion, fusion, then covariance updates.
  void step(std::span<const ModelFrame> frames);

  /// Same step against externally supplied per-point covariances (one per
  /// stored model).  The bank's own covariance states are left untouched, so
  /// every hypothesis sharing the same `s_pre` is normalized identically and
  /// density gaps reflect data fit alone.
  void step(std::span<const ModelFrame> frames, std::span<const Mat5> s_pre);

  /// Overwrite the per-point covariance states (detaching a reference copy).
  void install_covariances(std::span<const InnovationCovariance> covs);

  /// Copy another bank's per-point state estimates (hypothesis handover).
  void seed_states(const ModeBank& src);

  const fusion::FusedMode& fused() const { return fused_; }
  double fused_loglike() const { return fused_loglike_; }
  const VecX& weights() const { return weights_; }
  const HypothesisSpec& spec() const { return spec_; }
  std::span<const TrackState> tracks() const { return tracks_; }
  bool weights_degenerate() const { return weights_degenerate_; }
  bool dead() const { return dead_; }
  const linearize::ModelBank& bank() const { return *bank_; }

  void reset();

 private:
  void step_impl(std::span<const ModelFrame> frames, const Mat5* s_pre);

  const linearize::ModelBank* bank_;
  HypothesisSpec spec_;
  CovarianceOptions cov_opt_;
  fusion::WeightOptions w_opt_;
  std::vector<TrackState> tracks_;
  VecX weights_;
  fusion::FusedMode fused_;
  double fused_loglike_ = 0.0;
  bool weights_degenerate_ = false;
  bool dead_ = false;
};

/// One diagnosis level: a mode bank per hypothesis, stepped on shared frames.
/// The innovation covariance is estimated once per operating point from the
/// reference (first) slot and shared by every hypothesis, so the mode
/// densities stay comparably normalized while the estimate adapts.
class LevelBank {
 public:
  LevelBank(const linearize::ModelBank* bank, std::span<const HypothesisSpec> specs,
            const CovarianceOptions& cov_opt, const fusion::WeightOptions& w_opt);

  void step(std::span<const ModelFrame> frames);

  std::span<const ModeBank> modes() const { return modes_; }
  const ModeBank& mode(int j) const { return modes_[static_cast<size_t>(j)]; }
  int size() const { return static_cast<int>(modes_.size()); }

  /// Log-densities of the fused modes, in hypothesis order.
  VecX loglikes() const;

  /// Per-point covariance states estimated from the reference slot.
  std::span<const InnovationCovariance> shared_covariances() const { return shared_; }

  /// Adopt covariance states from a predecessor level (level handover).
  void install_shared(std::span<const InnovationCovariance> covs);

  /// Seed every hypothesis's state estimates from a predecessor's mode.
  void seed_mode_states(const ModeBank& src);

  /// Standalone copy of the reference slot carrying the shared covariance
  /// states, for running on as a detached no-fault reference.
  ModeBank detach_reference() const;

 private:
  std::vector<ModeBank> modes_;
  std::vector<InnovationCovariance> shared_;
};

}  // namespace gtfdi::filter
