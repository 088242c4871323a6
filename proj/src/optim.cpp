#include "arguing/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace arguing {

AdamW::AdamW(std::vector<Tensor> params, double lr, double weight_decay, double beta1,
             double beta2, double epsilon)
    : params_(std::move(params)),
      lr_(lr),
      weight_decay_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      epsilon_(epsilon) {
    if (lr_ <= 0.0) throw std::invalid_argument("AdamW: learning rate must be > 0");
    for (const auto& p : params_) {
        m_.push_back(Matrix::Zero(p.rows(), p.cols()));
        v_.push_back(Matrix::Zero(p.rows(), p.cols()));
    }
}

void AdamW::step() {
    ++step_count_;
    const double bc1 = 1.0 - std::pow(beta1_, step_count_);
    const double bc2 = 1.0 - std::pow(beta2_, step_count_);
    for (size_t i = 0; i < params_.size(); ++i) {
        if (!params_[i].has_grad()) continue;
        const Matrix& g = params_[i].grad();
        Matrix& p = params_[i].mutable_value();
        p -= lr_ * weight_decay_ * p;
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
        const Matrix mhat = m_[i] / bc1;
        const Matrix vhat = v_[i] / bc2;
        p -= lr_ * (mhat.array() / (vhat.array().sqrt() + epsilon_)).matrix();
    }
}

double global_grad_norm(const std::vector<Tensor>& params) {
    double sq = 0.0;
    for (const auto& p : params)
        if (p.has_grad()) sq += p.grad().squaredNorm();
    return std::sqrt(sq);
}

void clip_global_norm(const std::vector<Tensor>& params, double max_norm) {
    if (max_norm <= 0.0) throw std::invalid_argument("clip_global_norm: max_norm must be > 0");
    const double norm = global_grad_norm(params);
    if (norm <= max_norm) return;
    const double s = max_norm / norm;
    for (auto p : params)
        if (p.has_grad()) p.mutable_grad() *= s;
}

}  // namespace arguing
