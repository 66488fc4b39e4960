#pragma once

#include <span>
#include <vector>

#include "gtfdi/errors.hpp"
#include "gtfdi/linearize/model_bank.hpp"
#include "gtfdi/types.hpp"

namespace gtfdi::glr {

/// Failure-signature recursion for one stored model, started at the
/// detection sample. J carries the state-correction signature of the
/// previous sample (zero before detection), so the first call yields G = I
/// exactly and the second G = I - C·A·K.
struct SignatureState {
  Mat5 G = Mat5::Identity();
  Mat45 J = Mat45::Zero();
};

inline void signature_step(SignatureState& s, const linearize::ScaledDiscreteModel& m) {
  s.G = Mat5::Identity() - m.C * (m.A * s.J);
  s.J = (m.A * s.J + m.K * s.G).eval();
}

struct FusedSignature {
  Mat5 G = Mat5::Zero();
  Mat45 J = Mat45::Zero();
};

/// Weighted signature across the stored models under the no-fault-mode
/// interpolation weights.
inline FusedSignature fuse_signatures(std::span<const SignatureState> sigs, const VecX& w) {
  if (static_cast<int>(sigs.size()) != w.size())
    throw ValidationError("one signature per weight required");
  FusedSignature f;
  for (int i = 0; i < w.size(); ++i) {
    f.G += w[i] * sigs[static_cast<size_t>(i)].G;
    f.J += w[i] * sigs[static_cast<size_t>(i)].J;
  }
  return f;
}

}  // namespace gtfdi::glr
