#include "gtfdi/filter/hkf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gtfdi/errors.hpp"
#include "gtfdi/filter/kernel.hpp"
#include "gtfdi/filter/likelihood.hpp"

namespace gtfdi::filter {

std::vector<HypothesisSpec> single_fault_hypotheses(double bias_scaled) {
  if (bias_scaled <= 0.0) throw ValidationError("hypothesis bias must be positive");
  std::vector<HypothesisSpec> specs;
  specs.push_back(HypothesisSpec{});  // mode 1: no fault
  for (int s = 0; s < kOutputDim; ++s) {
    HypothesisSpec h;
    h.mode = s + 2;
    h.direction = Vec5::Unit(s);
    h.bias = bias_scaled;
    h.sensors = {s};
    specs.push_back(std::move(h));
  }
  return specs;
}

std::vector<HypothesisSpec> concurrent_hypotheses(int sensor, double bias_scaled) {
  if (sensor < 0 || sensor >= kOutputDim)
    throw ValidationError("isolated sensor index out of range");
  if (bias_scaled <= 0.0) throw ValidationError("hypothesis bias must be positive");
  std::vector<HypothesisSpec> specs;

  HypothesisSpec cont;  // slot 1: the isolated fault continues unchanged
  cont.mode = 1;
  cont.direction = Vec5::Unit(sensor);
  cont.bias = bias_scaled;
  cont.sensors = {sensor};
  specs.push_back(std::move(cont));

  HypothesisSpec larger;  // slot 2: larger fault on the same sensor
  larger.mode = 2;
  larger.direction = Vec5::Unit(sensor);
  larger.bias = 2.0 * bias_scaled;
  larger.sensors = {sensor};
  specs.push_back(std::move(larger));

  int mode = 3;
  for (int s = 0; s < kOutputDim; ++s) {
    if (s == sensor) continue;
    HypothesisSpec pair;  // slots 3..6: a second fault on another sensor
    pair.mode = mode++;
    pair.direction = Vec5::Unit(s);
    pair.bias = bias_scaled;
    pair.carried = bias_scaled * Vec5::Unit(sensor);
    pair.sensors = {sensor, s};
    specs.push_back(std::move(pair));
  }
  return specs;
}

ModeBank::ModeBank(const linearize::ModelBank* bank, HypothesisSpec spec,
                   const CovarianceOptions& cov_opt, const fusion::WeightOptions& w_opt)
    : bank_(bank), spec_(std::move(spec)), cov_opt_(cov_opt), w_opt_(w_opt) {
  if (bank_ == nullptr || bank_->size() == 0)
    throw ValidationError("mode bank requires a loaded model bank");
  const int n = bank_->size();
  if (w_opt_.floor >= 1.0 / n)
    throw ValidationError("weight floor must be below 1/L");
  tracks_.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    tracks_[static_cast<size_t>(i)].cov =
        InnovationCovariance(bank_->models[static_cast<size_t>(i)].S_stat, cov_opt_);
  weights_ = VecX::Constant(n, 1.0 / n);
}

void ModeBank::reset() {
  const int n = bank_->size();
  for (auto& t : tracks_) {
    t.d.setZero();
    t.gamma.setZero();
    t.likelihood = 0.0;
    t.alive = true;
    t.cov.reset();
  }
  weights_ = VecX::Constant(n, 1.0 / n);
  fused_ = fusion::FusedMode{};
  fused_loglike_ = 0.0;
  weights_degenerate_ = false;
  dead_ = false;
}

void ModeBank::step(std::span<const ModelFrame> frames) { step_impl(frames, nullptr); }

void ModeBank::step(std::span<const ModelFrame> frames, std::span<const Mat5> s_pre) {
  if (static_cast<int>(s_pre.size()) != bank_->size())
    throw ValidationError("one shared covariance per stored model required");
  step_impl(frames, s_pre.data());
}

void ModeBank::install_covariances(std::span<const InnovationCovariance> covs) {
  if (covs.size() != tracks_.size())
    throw ValidationError("one covariance state per stored model required");
  for (size_t i = 0; i < tracks_.size(); ++i) tracks_[i].cov = covs[i];
}

void ModeBank::seed_states(const ModeBank& src) {
  if (src.tracks_.size() != tracks_.size())
    throw ValidationError("state handover requires matching bank sizes");
  for (size_t i = 0; i < tracks_.size(); ++i) tracks_[i].d = src.tracks_[i].d;
}

void ModeBank::step_impl(std::span<const ModelFrame> frames, const Mat5* s_pre) {
  const int n = bank_->size();
  if (static_cast<int>(frames.size()) != n)
    throw ValidationError("one frame per stored model required");
  const Vec5 offset = spec_.offset();

  std::vector<Vec5> gammas(static_cast<size_t>(n), Vec5::Zero());
  std::vector<Mat5> covs(static_cast<size_t>(n), Mat5::Identity());
  VecX loglikes = VecX::Constant(n, -std::numeric_limits<double>::infinity());
  std::vector<char> alive(static_cast<size_t>(n), 0);

  for (int i = 0; i < n; ++i) {
    auto& t = tracks_[static_cast<size_t>(i)];
    if (!t.alive) continue;
    const auto& frame = frames[static_cast<size_t>(i)];
    const StepResult r = innovation_step(bank_->models[static_cast<size_t>(i)], t.d,
                                         frame.y_dev, offset, frame.du);
    if (!r.gamma.allFinite()) {
      t.alive = false;  // faulted-out: never fused again
      t.likelihood = 0.0;
      continue;
    }
    t.gamma = r.gamma;
    // Pre-update covariance, pairing with gamma(k).
    covs[static_cast<size_t>(i)] = (s_pre != nullptr) ? s_pre[i] : t.cov.value();
    double ll;
    try {
      ll = gaussian_loglike<kOutputDim>(t.gamma, covs[static_cast<size_t>(i)]);
    } catch (const NumericalError&) {
      t.alive = false;
      t.likelihood = 0.0;
      continue;
    }
    t.likelihood = likelihood_from_log(ll);
    loglikes[i] = ll;
    gammas[static_cast<size_t>(i)] = t.gamma;
    alive[static_cast<size_t>(i)] = 1;
  }

  bool any_alive = false;
  for (const char a : alive) any_alive |= (a != 0);
  if (!any_alive) {
    dead_ = true;
    fused_loglike_ = -std::numeric_limits<double>::infinity();
    return;
  }

  // Evidence shifted by the best log-density before exponentiation: ratios
  // are preserved exactly even when every density underflows linearly.
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (alive[static_cast<size_t>(i)]) best = std::max(best, loglikes[i]);
  VecX likes = VecX::Zero(n);
  if (std::isfinite(best))
    for (int i = 0; i < n; ++i)
      if (alive[static_cast<size_t>(i)] && std::isfinite(loglikes[i]))
        likes[i] = std::exp(loglikes[i] - best);

  const fusion::BayesResult upd = fusion::update_weights(weights_, likes, w_opt_, &alive);
  weights_ = upd.value;
  weights_degenerate_ = upd.degenerate;
  for (int i = 0; i < n; ++i)
    if (!alive[static_cast<size_t>(i)]) weights_[i] = 0.0;

  fused_ = fusion::combine(weights_, bank_->models, gammas, covs);
  try {
    fused_loglike_ = gaussian_loglike<kOutputDim>(fused_.gamma_c, fused_.S_c);
  } catch (const NumericalError&) {
    fused_loglike_ = -std::numeric_limits<double>::infinity();
  }

  if (s_pre == nullptr)
    for (int i = 0; i < n; ++i) {
      auto& t = tracks_[static_cast<size_t>(i)];
      if (t.alive) t.cov.update(t.gamma);
    }
}

LevelBank::LevelBank(const linearize::ModelBank* bank,
                     std::span<const HypothesisSpec> specs,
                     const CovarianceOptions& cov_opt, const fusion::WeightOptions& w_opt) {
  if (specs.empty()) throw ValidationError("a level needs at least one hypothesis");
  modes_.reserve(specs.size());
  for (const auto& s : specs) modes_.emplace_back(bank, s, cov_opt, w_opt);
  shared_.reserve(static_cast<size_t>(bank->size()));
  for (const auto& m : bank->models) shared_.emplace_back(m.S_stat, cov_opt);
}

void LevelBank::step(std::span<const ModelFrame> frames) {
  std::vector<Mat5> s_pre;
  s_pre.reserve(shared_.size());
  for (const auto& c : shared_) s_pre.push_back(c.value());
  for (auto& m : modes_) m.step(frames, s_pre);

  // The reference slot's innovations drive the common estimate.
  const ModeBank& ref = modes_.front();
  for (size_t i = 0; i < shared_.size(); ++i)
    if (ref.tracks()[i].alive) shared_[i].update(ref.tracks()[i].gamma);
}

void LevelBank::install_shared(std::span<const InnovationCovariance> covs) {
  if (covs.size() != shared_.size())
    throw ValidationError("covariance handover requires matching bank sizes");
  shared_.assign(covs.begin(), covs.end());
}

void LevelBank::seed_mode_states(const ModeBank& src) {
  for (auto& m : modes_) m.seed_states(src);
}

ModeBank LevelBank::detach_reference() const {
  ModeBank copy = modes_.front();
  copy.install_covariances(shared_);
  return copy;
}

VecX LevelBank::loglikes() const {
  VecX out(size());
  for (int j = 0; j < size(); ++j) out[j] = modes_[static_cast<size_t>(j)].fused_loglike();
  return out;
}

}  // namespace gtfdi::filter
