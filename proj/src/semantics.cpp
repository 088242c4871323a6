#include "arguing/semantics.hpp"

#include <stdexcept>

namespace arguing {

StrengthTrace final_strengths(const QBAFBatch& qbaf, int iterations, NewCaseMode mode,
                              bool record_deltas) {
    if (iterations < 1)
        throw std::invalid_argument("final_strengths: need at least one iteration");
    const long n = qbaf.a_cb.rows();
    const long batch = qbaf.a_new.rows();
    if (qbaf.a_cb.cols() != n || qbaf.b_cb.rows() != n || qbaf.a_new.cols() != n ||
        qbaf.b_new.rows() != batch)
        throw std::invalid_argument("final_strengths: inconsistent QBAF shapes");

    Tensor base_tiled = broadcast_rows(transpose(qbaf.b_cb), batch);     // B x n
    Tensor new_effect = hadamard(qbaf.a_new, broadcast_cols(qbaf.b_new, n));
    Tensor b_eff = add(base_tiled, new_effect);

    StrengthTrace trace;
    Tensor s = base_tiled;  // S^(0)
    for (int step = 0; step < iterations; ++step) {
        // OneShot applies the new cases' attacks only when forming S^(1).
        const Tensor& effective = (mode == NewCaseMode::Fold || step == 0) ? b_eff : base_tiled;
        Tensor next = relu(add(effective, matmul(s, qbaf.a_cb)));
        if (record_deltas)
            trace.max_delta.push_back((next.value() - s.value()).cwiseAbs().maxCoeff());
        s = next;
    }
    trace.strengths = s;
    return trace;
}

Prediction predict(const StrengthTrace& trace, const std::vector<int>& target_indices) {
    Prediction pred;
    pred.logits = gather_cols(trace.strengths, target_indices);
    const Matrix& v = pred.logits.value();
    for (long b = 0; b < v.rows(); ++b) {
        int best = 0;
        for (long c = 1; c < v.cols(); ++c)
            if (v(b, c) > v(b, best)) best = static_cast<int>(c);
        pred.labels.push_back(best);
    }
    return pred;
}

Matrix reference_strengths(const Matrix& a_cb, const Matrix& b_cb, const Matrix& a_new,
                           const Matrix& b_new, int iterations, NewCaseMode mode) {
    if (iterations < 1)
        throw std::invalid_argument("reference_strengths: need at least one iteration");
    const long n = a_cb.rows();
    const long batch = a_new.rows();
    Matrix out(batch, n);
    for (long b = 0; b < batch; ++b) {
        std::vector<double> prev(n), next(n);
        for (long i = 0; i < n; ++i) prev[i] = b_cb(i, 0);
        const double s_new = b_new(b, 0);  // constant: nothing attacks the new case
        for (int step = 0; step < iterations; ++step) {
            for (long j = 0; j < n; ++j) {
                double agg = 0.0;
                for (long i = 0; i < n; ++i) agg += a_cb(i, j) * prev[i];
                if (mode == NewCaseMode::Fold || step == 0) agg += a_new(b, j) * s_new;
                const double s = b_cb(j, 0) + agg;
                next[j] = s > 0.0 ? s : 0.0;
            }
            prev = next;
        }
        for (long j = 0; j < n; ++j) out(b, j) = prev[j];
    }
    return out;
}

}  // namespace arguing
