#pragma once

#include "arguing/tensor.hpp"

#include <vector>

namespace arguing {

// ---------------------------------------------------------------------------
// Elementwise and linear-algebra primitives with backward rules. All free
// functions; inputs are never modified.
// ---------------------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor eabs(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Elementwise minimum / maximum. The subgradient at ties goes to the first
/// argument.
Tensor emin(const Tensor& a, const Tensor& b);
Tensor emax(const Tensor& a, const Tensor& b);

/// -t * log(sum_i exp(-a_i / t)) over all elements, max-subtraction
/// stabilized. Requires t > 0 and a non-empty input.
Tensor logsumexp_neg(const Tensor& a, double t);

/// Elementwise soft minimum across a stack of same-shaped tensors:
/// out[e] = -t * log(sum_g mask_g[e] * exp(-terms_g[e] / t)), stabilized by
/// the masked minimum. masks may be empty (all ones); each mask is a 0/1
/// matrix matching the term shape. Elements with an empty masked set get 1
/// (empty fuzzy aggregation).
Tensor softmin_stack(const std::vector<Tensor>& terms,
                     const std::vector<Matrix>& masks, double t);

/// tr(e^B) for square B via scaling-and-squaring with a truncated Taylor
/// series; backward uses d tr(e^B) / dB = (e^B)^T.
Tensor trace_expm(const Tensor& b);

/// Mean over the batch of w_{y_b} * (-log softmax(logits_b)[y_b]).
/// Labels are 0-based here; callers present 1-based class ids at the API
/// boundary.
Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                             const std::vector<double>& class_weights);

// Broadcast / gather helpers for the batched semantics.
Tensor broadcast_rows(const Tensor& row, long n_rows);   // 1 x n -> B x n
Tensor broadcast_cols(const Tensor& col, long n_cols);   // B x 1 -> B x n
Tensor row(const Tensor& a, long i);                     // 1 x n slice
Tensor col(const Tensor& a, long j);                     // m x 1 slice
Tensor gather_cols(const Tensor& a, const std::vector<int>& indices);

/// Pairwise soft coordinate dominance, pre-activation:
/// out[i][j] = (1/d) * sum_l (2 * sigmoid(alpha * (ea[i][l] - eb[j][l])) - 1).
/// A single tape node; the backward rule recomputes the sigmoids.
Tensor soft_dominance(const Tensor& ea, const Tensor& eb, double alpha);

/// Differentiable clamp into [0,1] (zero gradient in the clamped regions).
Tensor clamp01(const Tensor& a);

}  // namespace arguing
