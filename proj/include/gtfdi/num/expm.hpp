#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include "gtfdi/types.hpp"

namespace gtfdi::num {

/// Matrix exponential (scaling-and-squaring Padé via Eigen).
template <class Derived>
auto expm(const Eigen::MatrixBase<Derived>& m) {
  return m.exp().eval();
}

}  // namespace gtfdi::num
