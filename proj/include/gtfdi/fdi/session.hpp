#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "gtfdi/engine/plant.hpp"
#include "gtfdi/fdi/decide.hpp"
#include "gtfdi/fdi/mode_probs.hpp"
#include "gtfdi/filter/covariance.hpp"
#include "gtfdi/filter/hkf.hpp"
#include "gtfdi/filter/obem.hpp"
#include "gtfdi/fusion/fusion.hpp"
#include "gtfdi/glr/capture.hpp"
#include "gtfdi/linearize/model_bank.hpp"

namespace gtfdi::fdi {

struct SessionOptions {
  filter::CovarianceOptions covariance;
  fusion::WeightOptions weights;
  ModeProbOptions mode_probs;
  DecisionOptions decision;
  double hypothesis_bias = 0.03;  ///< pre-determined scaled bias per hypothesis
  long severity_window = 200;     ///< samples past detection fed to the estimator
  long baseline_window = 200;     ///< pre-onset mean window for follow-on faults
  long decision_arming = -1;      ///< samples before the probability layer arms;
                                  ///< -1 derives it from the covariance memory
                                  ///< (zero under a stationary covariance)
};

enum class EventKind {
  kIsolated,            ///< first fault declared; second level activated
  kSeverityRefined,     ///< larger-fault-same-sensor hypothesis won at level 2
  kConcurrentIsolated,  ///< a second sensor declared at level 2 (terminal)
  kSeverityEstimated,   ///< a severity window closed with an estimate
  kDegeneracy,          ///< all mode densities vanished; probabilities held
};

struct SessionEvent {
  EventKind kind{};
  long k = 0;        ///< sample at which the event fired
  int level = 1;     ///< diagnosis level active when it fired
  long k_ds = 0;     ///< backdated detection sample (isolation/severity events)
  std::vector<int> sensors;  ///< implicated sensors, isolation order
  double b_hat = 0.0;        ///< severity in sensor units (severity events)
  double criterion = 0.0;    ///< estimator criterion value (severity events)
  VecX probs;                ///< mode-probability snapshot
};

/// Per-step observable state, refreshed by step().
struct StepTrace {
  long k = 0;
  int level = 1;
  VecX probs;
  Vec5 reference_gamma = Vec5::Zero();  ///< no-fault-slot fused innovation (scaled)
  VecX reference_weights;
  bool degenerate = false;
};

/// Orchestrates one diagnosis run: the onboard reference model, the active
/// hypothesis bank, mode probabilities, persistence declarations, the
/// two-level concurrent-fault scheme, and severity windows.
class DiagnosisSession {
 public:
  DiagnosisSession(const engine::EngineModel& model, const linearize::ModelBank& bank,
                   const engine::HealthFactors& lambda_hat, const Vec4& obem_x0,
                   const SessionOptions& opt);

  /// One sample at the bank rate: measurement, shared fuel command, and
  /// noise-free ambient. The onboard reference advances after the banks so
  /// both see sample-k data.
  void step(const Vec5& y_meas, double fuel, const engine::RamConditions& ambient,
            double dt);

  /// Refresh the onboard reference baselines (periodic health updates).
  void update_baseline(const engine::HealthFactors& lambda_hat);

  long sample() const { return k_; }
  int level() const { return level_; }
  const VecX& mode_probs() const { return probs_; }
  std::span<const SessionEvent> events() const { return events_; }
  const filter::LevelBank& active_bank() const { return *bank_; }
  const filter::ObemRunner& obem() const { return obem_; }
  const StepTrace& last_trace() const { return trace_; }
  bool concurrent_terminal() const { return terminal_; }

  /// Sensors isolated so far, in declaration order.
  std::span<const int> isolated_sensors() const { return isolated_; }

  std::function<void(const SessionEvent&)> on_event;

 private:
  struct ReferenceSample {
    long k = 0;
    Vec5 gamma_c = Vec5::Zero();
    VecX weights;
    Mat5 s_c = Mat5::Zero();
  };

  struct OpenCapture {
    glr::SeverityCapture capture;
    bool on_ghost = false;  ///< fed by the detached level-1 no-fault bank
  };

  void emit(SessionEvent ev);
  void handle_declaration(const Declaration& dec, double dt);
  void start_capture(int sensor, long k_ds, bool on_ghost, const Vec5& baseline);
  void feed_captures(double dt);
  Vec5 trailing_baseline(long k_ds) const;

  const linearize::ModelBank* models_;
  SessionOptions opt_;
  filter::ObemRunner obem_;
  std::unique_ptr<filter::LevelBank> bank_;
  std::unique_ptr<filter::ModeBank> ghost_;  ///< level-1 no-fault bank kept for severity
  ModeProbOptions prob_opt_;
  PersistenceDetector detector_;
  VecX probs_;
  long k_ = 0;
  long arming_ = 0;  ///< first sample at which declarations may accumulate
  int level_ = 1;
  bool refined_ = false;
  bool terminal_ = false;
  bool was_degenerate_ = false;
  std::vector<int> isolated_;
  std::vector<SessionEvent> events_;
  std::deque<ReferenceSample> history_;
  std::vector<OpenCapture> captures_;
  StepTrace trace_;
};

}  // namespace gtfdi::fdi
