#pragma once

#include "arguing/tensor.hpp"

#include <functional>
#include <random>
#include <vector>

namespace testutil {

using arguing::Matrix;
using arguing::Tensor;

inline Matrix random_matrix(long rows, long cols, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) m(i, j) = dist(rng);
    return m;
}

/// Central finite differences of a scalar-valued forward closure with respect
/// to every entry of every leaf, against the analytic gradients from one
/// backward pass. Returns the worst relative error (absolute error where the
/// reference is tiny).
inline double max_grad_error(const std::vector<Tensor>& leaves,
                             const std::function<Tensor()>& forward, double h = 1e-5) {
    arguing::zero_grads(leaves);
    Tensor loss = forward();
    arguing::backward(loss);

    double worst = 0.0;
    for (const auto& leaf : leaves) {
        Matrix analytic = leaf.has_grad()
                              ? leaf.grad()
                              : Matrix::Zero(leaf.rows(), leaf.cols());
        for (long i = 0; i < leaf.rows(); ++i)
            for (long j = 0; j < leaf.cols(); ++j) {
                Tensor mut = leaf;  // shares the node; mutate in place
                const double orig = mut.value()(i, j);
                mut.mutable_value()(i, j) = orig + h;
                const double up = forward().item();
                mut.mutable_value()(i, j) = orig - h;
                const double down = forward().item();
                mut.mutable_value()(i, j) = orig;
                const double fd = (up - down) / (2.0 * h);
                const double denom = std::max(1.0, std::abs(fd));
                worst = std::max(worst, std::abs(fd - analytic(i, j)) / denom);
            }
    }
    return worst;
}

}  // namespace testutil
