#pragma once

#include "arguing/qbaf.hpp"

namespace arguing {

/// How the new cases' attacks enter the iteration. Fold keeps their
/// contribution inside the effective base score so it is re-applied at every
/// influence step (their strength is constant); OneShot applies it only when
/// forming S^(1).
enum class NewCaseMode { Fold, OneShot };

struct StrengthTrace {
    Tensor strengths;                // B x n after I iterations
    std::vector<double> max_delta;   // optional per-iteration convergence diagnostic
};

/// Batched gradual semantics: S^(k+1) = ReLU(B_eff + S^(k) * A_cb) for I
/// fixed steps, starting from the tiled base scores.
StrengthTrace final_strengths(const QBAFBatch& qbaf, int iterations,
                              NewCaseMode mode = NewCaseMode::Fold,
                              bool record_deltas = false);

struct Prediction {
    std::vector<int> labels;  // 0-based argmax, ties to the smallest class
    Tensor logits;            // B x C target strengths
};

Prediction predict(const StrengthTrace& trace, const std::vector<int>& target_indices);

/// Scalar-loop oracle for the semantics: the new case is an explicit graph
/// member of constant strength. Values only, no tape.
Matrix reference_strengths(const Matrix& a_cb, const Matrix& b_cb, const Matrix& a_new,
                           const Matrix& b_new, int iterations,
                           NewCaseMode mode = NewCaseMode::Fold);

}  // namespace arguing
