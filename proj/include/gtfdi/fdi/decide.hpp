#pragma once

#include <optional>

#include "gtfdi/errors.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::fdi {

struct DecisionOptions {
  int n_persist = 5;  ///< consecutive samples required to declare
};

struct Declaration {
  int slot = 0;    ///< 0-based hypothesis slot within the active bank (> 0)
  long k_ds = 0;   ///< first sample of the persistent run
};

/// Debounces the argmax of the mode probabilities: fires once per run when a
/// non-first slot has been the argmax (ties toward the lower index) for
/// n_persist consecutive samples; k_ds backdates to the run start.
class PersistenceDetector {
 public:
  explicit PersistenceDetector(const DecisionOptions& opt) : opt_(opt) {
    if (opt.n_persist < 1) throw ValidationError("persistence must be at least 1 sample");
  }

  std::optional<Declaration> update(const VecX& probs, long k) {
    int best = 0;
    for (int j = 1; j < probs.size(); ++j)
      if (probs[j] > probs[best]) best = j;  // strict: ties keep the lower index
    if (best == 0) {
      run_slot_ = 0;
      run_len_ = 0;
      return std::nullopt;
    }
    if (best == run_slot_) {
      ++run_len_;
    } else {
      run_slot_ = best;
      run_start_ = k;
      run_len_ = 1;
    }
    if (run_len_ == opt_.n_persist) return Declaration{run_slot_, run_start_};
    return std::nullopt;
  }

  void reset() {
    run_slot_ = 0;
    run_len_ = 0;
  }

 private:
  DecisionOptions opt_;
  int run_slot_ = 0;
  long run_start_ = 0;
  int run_len_ = 0;
};

}  // namespace gtfdi::fdi
