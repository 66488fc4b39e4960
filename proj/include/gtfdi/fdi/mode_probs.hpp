#pragma once

#include <cmath>
#include <limits>

#include "gtfdi/fusion/fusion.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::fdi {

struct ModeProbOptions {
  double floor = 1e-4;  ///< keeps every mode recoverable
};

/// Densities from per-mode log-densities, shifted by the best mode before
/// exponentiation so the recursion sees exact ratios at any absolute scale.
/// Non-finite entries carry no evidence.
inline VecX densities_from_loglikes(const VecX& loglikes) {
  const int n = static_cast<int>(loglikes.size());
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j)
    if (std::isfinite(loglikes[j])) best = std::max(best, loglikes[j]);
  VecX f = VecX::Zero(n);
  if (std::isfinite(best))
    for (int j = 0; j < n; ++j)
      if (std::isfinite(loglikes[j])) f[j] = std::exp(loglikes[j] - best);
  return f;
}

/// Bayes recursion over the fused-mode densities with flooring and
/// renormalization; all-zero evidence holds the previous vector and flags
/// degeneracy.
inline fusion::BayesResult update_mode_probs(const VecX& prev, const VecX& densities,
                                             const ModeProbOptions& opt) {
  return fusion::floored_bayes(prev, densities, opt.floor, /*renormalize=*/true);
}

}  // namespace gtfdi::fdi
