#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gtfdi/errors.hpp"
#include "gtfdi/linearize/model_bank.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::fusion {

struct WeightOptions {
  double floor = 1e-3;      ///< rho: smallest admissible weight
  bool renormalize = true;  ///< floor-only variant kept for fidelity experiments
};

struct BayesResult {
  VecX value;
  bool degenerate = false;  ///< all evidence vanished; previous state held
};

/// Bayes recursion v_i <- v_i * e_i / sum, followed by flooring. With
/// renormalization on, floored entries are pinned at the floor and the
/// remaining mass is redistributed over the free entries until every entry
/// respects the floor and the total is exactly one. Entries whose `alive`
/// flag is cleared are forced to zero and receive no floor. When no entry
/// carries positive finite evidence the previous vector is returned with the
/// degeneracy flag set.
inline BayesResult floored_bayes(const VecX& prev, const VecX& evidence, double floor,
                                 bool renormalize, const std::vector<char>* alive = nullptr) {
  const int n = static_cast<int>(prev.size());
  if (evidence.size() != n) throw ValidationError("evidence size does not match weights");
  auto is_alive = [&](int i) { return alive == nullptr || (*alive)[i] != 0; };

  VecX w = VecX::Zero(n);
  double total = 0.0;
  int n_alive = 0;
  for (int i = 0; i < n; ++i) {
    if (!is_alive(i)) continue;
    ++n_alive;
    const double v = prev[i] * evidence[i];
    if (std::isfinite(v) && v > 0.0) {
      w[i] = v;
      total += v;
    }
  }
  if (n_alive == 0 || total <= 0.0 || !std::isfinite(total)) return {prev, true};
  w /= total;

  if (!renormalize) {
    for (int i = 0; i < n; ++i)
      if (is_alive(i)) w[i] = std::max(w[i], floor);
    return {w, false};
  }

  std::vector<char> pinned(static_cast<size_t>(n), 0);
  for (int pass = 0; pass <= n; ++pass) {
    int n_pinned = 0;
    double free_mass = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!is_alive(i)) continue;
      if (pinned[static_cast<size_t>(i)]) {
        ++n_pinned;
        continue;
      }
      free_mass += w[i];
    }
    const double target = 1.0 - floor * n_pinned;
    if (target <= 0.0 || free_mass <= 0.0) {
      // floor too large for this population; fall back to uniform
      for (int i = 0; i < n; ++i) w[i] = is_alive(i) ? 1.0 / n_alive : 0.0;
      return {w, false};
    }
    const double scale = target / free_mass;
    bool newly_pinned = false;
    for (int i = 0; i < n; ++i) {
      if (!is_alive(i) || pinned[static_cast<size_t>(i)]) continue;
      w[i] *= scale;
      if (w[i] < floor) {
        pinned[static_cast<size_t>(i)] = 1;
        w[i] = floor;
        newly_pinned = true;
      }
    }
    if (!newly_pinned) break;
  }
  return {w, false};
}

/// Per-mode interpolation weight update over the stored models.
inline BayesResult update_weights(const VecX& prev, const VecX& likelihoods,
                                  const WeightOptions& opt,
                                  const std::vector<char>* alive = nullptr) {
  return floored_bayes(prev, likelihoods, opt.floor, opt.renormalize, alive);
}

struct FusedMode {
  Mat4 A_c = Mat4::Zero();
  Mat54 C_c = Mat54::Zero();
  Vec5 gamma_c = Vec5::Zero();
  Mat5 S_c = Mat5::Zero();
};

/// Weighted combination across the stored models; the covariance uses
/// squared weights. Entries with exactly zero weight are skipped so a dead
/// track cannot inject non-finite values.
inline FusedMode combine(const VecX& w,
                         std::span<const linearize::ScaledDiscreteModel> models,
                         std::span<const Vec5> gammas, std::span<const Mat5> covs) {
  const int n = static_cast<int>(w.size());
  if (static_cast<int>(models.size()) != n || static_cast<int>(gammas.size()) != n ||
      static_cast<int>(covs.size()) != n)
    throw ValidationError("combine inputs must have one entry per weight");
  FusedMode f;
  for (int i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    f.A_c += w[i] * models[static_cast<size_t>(i)].A;
    f.C_c += w[i] * models[static_cast<size_t>(i)].C;
    f.gamma_c += w[i] * gammas[static_cast<size_t>(i)];
    f.S_c += w[i] * w[i] * covs[static_cast<size_t>(i)];
  }
  return f;
}

}  // namespace gtfdi::fusion
