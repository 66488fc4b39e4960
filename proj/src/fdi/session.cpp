#include "gtfdi/fdi/session.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "gtfdi/errors.hpp"

namespace gtfdi::fdi {

DiagnosisSession::DiagnosisSession(const engine::EngineModel& model,
                                   const linearize::ModelBank& bank,
                                   const engine::HealthFactors& lambda_hat,
                                   const Vec4& obem_x0, const SessionOptions& opt)
    : models_(&bank),
      opt_(opt),
      obem_(model, lambda_hat, obem_x0),
      prob_opt_(opt.mode_probs),
      detector_(opt.decision),
      probs_(VecX::Constant(kModeCount, 1.0 / kModeCount)) {
  if (models_->size() == 0)
    throw ValidationError("diagnosis session requires a loaded model bank");
  if (opt_.severity_window < 0 || opt_.baseline_window < 0)
    throw ValidationError("severity and baseline windows must be nonnegative");
  const auto specs = filter::single_fault_hypotheses(opt_.hypothesis_bias);
  bank_ = std::make_unique<filter::LevelBank>(models_, specs, opt_.covariance,
                                              opt_.weights);
  arming_ = opt_.decision_arming;
  if (arming_ < 0) {
    if (opt_.covariance.mode == filter::CovarianceMode::kEmpirical) {
      // The empirical covariance still carries weight lambda^k on its seed
      // after k updates; arm once that weight is negligible.
      constexpr double kSeedWeightFloor = 1e-7;
      arming_ = static_cast<long>(
          std::ceil(std::log(kSeedWeightFloor) / std::log(opt_.covariance.forgetting)));
    } else {
      arming_ = 0;
    }
  }
}

void DiagnosisSession::emit(SessionEvent ev) {
  events_.push_back(ev);
  if (on_event) on_event(events_.back());
}

void DiagnosisSession::step(const Vec5& y_meas, double fuel,
                            const engine::RamConditions& ambient, double dt) {
  // Reference outputs at this sample; the reference advances afterwards.
  const Vec5 y_obem = obem_.outputs(ambient);

  filter::ModelFrame frame;
  frame.y_dev = (y_meas - y_obem).cwiseQuotient(models_->y_scale);
  frame.du = 0.0;  // the reference trajectory carries the input response
  const std::vector<filter::ModelFrame> frames(static_cast<size_t>(models_->size()),
                                               frame);

  bank_->step(frames);
  if (ghost_) ghost_->step(frames);

  // While the innovation covariance still remembers its inflated seed, the
  // quadratic terms of every hypothesis are flat and the densities rank
  // hypotheses by normalization alone; the probability layer holds its prior
  // until the estimator has matured.
  bool degenerate_now = false;
  if (k_ >= arming_) {
    const VecX densities = densities_from_loglikes(bank_->loglikes());
    const fusion::BayesResult upd = update_mode_probs(probs_, densities, prob_opt_);
    probs_ = upd.value;
    degenerate_now = upd.degenerate;
    if (degenerate_now && !was_degenerate_) {
      SessionEvent ev;
      ev.kind = EventKind::kDegeneracy;
      ev.k = k_;
      ev.level = level_;
      ev.probs = probs_;
      emit(std::move(ev));
    }
  }
  was_degenerate_ = degenerate_now;

  const filter::ModeBank& slot0 = bank_->mode(0);
  history_.push_back(
      ReferenceSample{k_, slot0.fused().gamma_c, slot0.weights(), slot0.fused().S_c});
  const size_t depth = static_cast<size_t>(opt_.baseline_window +
                                           opt_.decision.n_persist + 2);
  while (history_.size() > depth) history_.pop_front();

  if (!terminal_) {
    if (const auto dec = detector_.update(probs_, k_)) handle_declaration(*dec, dt);
  }

  feed_captures(dt);

  trace_.k = k_;
  trace_.level = level_;
  trace_.probs = probs_;
  trace_.reference_gamma = bank_->mode(0).fused().gamma_c;
  trace_.reference_weights = bank_->mode(0).weights();
  trace_.degenerate = degenerate_now;

  obem_.step(fuel, ambient, dt);
  ++k_;
}

void DiagnosisSession::update_baseline(const engine::HealthFactors& lambda_hat) {
  obem_.update_baseline(lambda_hat);
}

Vec5 DiagnosisSession::trailing_baseline(long k_ds) const {
  Vec5 sum = Vec5::Zero();
  long n = 0;
  for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
    if (it->k >= k_ds) continue;
    sum += it->gamma_c;
    if (++n == opt_.baseline_window) break;
  }
  return n > 0 ? Vec5((sum / static_cast<double>(n)).eval()) : Vec5::Zero();
}

void DiagnosisSession::start_capture(int sensor, long k_ds, bool on_ghost,
                                     const Vec5& baseline) {
  // Covariance frozen at detection; replay the buffered stream from k_ds.
  const Mat5* frozen = nullptr;
  for (const auto& h : history_)
    if (h.k == k_ds) {
      frozen = &h.s_c;
      break;
    }
  if (frozen == nullptr && !history_.empty()) frozen = &history_.front().s_c;
  if (frozen == nullptr)
    throw NumericalError("no buffered reference output available at detection");

  OpenCapture oc{glr::SeverityCapture(models_, sensor, k_ds, opt_.severity_window,
                                      *frozen, baseline),
                 on_ghost};
  for (const auto& h : history_) {
    if (h.k < k_ds) continue;
    oc.capture.consume(h.gamma_c, h.weights);
  }
  captures_.push_back(std::move(oc));
}

void DiagnosisSession::handle_declaration(const Declaration& dec, double) {
  if (level_ == 1) {
    const filter::ModeBank& winner = bank_->mode(dec.slot);
    const int sensor = winner.spec().sensors.front();
    isolated_.assign(1, sensor);

    SessionEvent ev;
    ev.kind = EventKind::kIsolated;
    ev.k = k_;
    ev.level = 1;
    ev.k_ds = dec.k_ds;
    ev.sensors = isolated_;
    ev.probs = probs_;
    emit(std::move(ev));

    // Severity runs on the no-fault stream; detach it before escalating.
    ghost_ = std::make_unique<filter::ModeBank>(bank_->detach_reference());
    start_capture(sensor, dec.k_ds, /*on_ghost=*/true, Vec5::Zero());

    // The next level inherits the covariance estimates and continues from
    // the winning hypothesis's state, so no re-absorption transient follows.
    const auto specs = filter::concurrent_hypotheses(sensor, opt_.hypothesis_bias);
    auto next = std::make_unique<filter::LevelBank>(models_, specs, opt_.covariance,
                                                    opt_.weights);
    next->install_shared(bank_->shared_covariances());
    next->seed_mode_states(winner);
    bank_ = std::move(next);
    probs_ = VecX::Constant(kModeCount, 1.0 / kModeCount);
    detector_.reset();
    history_.clear();  // the buffered stream switches to the new first slot
    level_ = 2;
    return;
  }

  if (dec.slot == 1) {  // larger fault on the already-isolated sensor
    if (!refined_) {
      refined_ = true;
      SessionEvent ev;
      ev.kind = EventKind::kSeverityRefined;
      ev.k = k_;
      ev.level = 2;
      ev.k_ds = dec.k_ds;
      ev.sensors = isolated_;
      ev.probs = probs_;
      emit(std::move(ev));
    }
    return;
  }

  const filter::ModeBank& winner = bank_->mode(dec.slot);
  const int second = winner.spec().sensors.back();
  isolated_.push_back(second);
  terminal_ = true;

  SessionEvent ev;
  ev.kind = EventKind::kConcurrentIsolated;
  ev.k = k_;
  ev.level = 2;
  ev.k_ds = dec.k_ds;
  ev.sensors = isolated_;
  ev.probs = probs_;
  emit(std::move(ev));

  start_capture(second, dec.k_ds, /*on_ghost=*/false, trailing_baseline(dec.k_ds));
}

void DiagnosisSession::feed_captures(double) {
  for (auto it = captures_.begin(); it != captures_.end();) {
    bool done = it->capture.complete();
    if (!done) {
      const filter::ModeBank* source = it->on_ghost ? ghost_.get() : &bank_->mode(0);
      if (source == nullptr || source->dead()) {
        // source lost; finalize with what accumulated
        done = true;
      } else if (it->capture.k_ds() <= k_) {
        // replayed samples already covered this k; stream only beyond them
        if (it->capture.consumed() <= k_ - it->capture.k_ds())
          done = it->capture.consume(source->fused().gamma_c, source->weights());
      }
    }
    if (done) {
      SessionEvent ev;
      ev.kind = EventKind::kSeverityEstimated;
      ev.k = k_;
      ev.level = level_;
      ev.k_ds = it->capture.k_ds();
      ev.sensors = {it->capture.sensor()};
      ev.probs = probs_;
      try {
        const glr::BiasEstimate est = it->capture.finish();
        ev.b_hat = est.b_hat * models_->y_scale[it->capture.sensor()];
        ev.criterion = est.criterion;
      } catch (const NumericalError&) {
        ev.b_hat = std::numeric_limits<double>::quiet_NaN();
        ev.criterion = 0.0;
      } catch (const ValidationError&) {
        ev.b_hat = std::numeric_limits<double>::quiet_NaN();
        ev.criterion = 0.0;
      }
      emit(std::move(ev));
      if (it->on_ghost) ghost_.reset();
      it = captures_.erase(it);
    } else {
      ++it;
    }
  }
}

}  // namespace gtfdi::fdi
