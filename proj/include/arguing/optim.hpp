#pragma once

#include "arguing/tensor.hpp"

#include <vector>

namespace arguing {

/// Decoupled-weight-decay Adam state over a fixed parameter list.
class AdamW {
public:
    AdamW(std::vector<Tensor> params, double lr, double weight_decay,
          double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

    /// Applies decoupled weight decay, then the Adam update, to every
    /// parameter with a populated gradient.
    void step();

    long step_count() const { return step_count_; }
    const std::vector<Tensor>& params() const { return params_; }

private:
    std::vector<Tensor> params_;
    std::vector<Matrix> m_, v_;
    double lr_, weight_decay_, beta1_, beta2_, epsilon_;
    long step_count_ = 0;
};

/// Rescales all gradients jointly so the global L2 norm does not exceed
/// max_norm; a no-op when it already does not.
void clip_global_norm(const std::vector<Tensor>& params, double max_norm);

double global_grad_norm(const std::vector<Tensor>& params);

}  // namespace arguing
