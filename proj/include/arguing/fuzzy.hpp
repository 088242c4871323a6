#pragma once

#include "arguing/ops.hpp"

namespace arguing {

// Fuzzy-logic primitives over truth degrees in [0,1]. All differentiable
// through the tape.

/// Gödel T-norm, elementwise minimum. Inputs must lie in [0,1].
Tensor tnorm(const Tensor& a, const Tensor& b);

/// Smooth universal aggregation: the LogSumExp soft minimum over all
/// elements, clamped back into [0,1]. An empty input aggregates to exactly 1.
Tensor aggregate(const Tensor& values, double t);
Tensor aggregate_empty();

/// Strong negation 1 - a.
Tensor negate(const Tensor& a);

}  // namespace arguing
