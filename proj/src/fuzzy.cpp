#include "arguing/fuzzy.hpp"

#include <stdexcept>

namespace arguing {

namespace {

void require_unit_range(const Tensor& a, const char* op) {
    if (a.size() == 0) return;
    if (a.value().minCoeff() < 0.0 || a.value().maxCoeff() > 1.0)
        throw std::domain_error(std::string(op) + ": input outside [0,1]");
}

}  // namespace

Tensor tnorm(const Tensor& a, const Tensor& b) {
    require_unit_range(a, "tnorm");
    require_unit_range(b, "tnorm");
    return emin(a, b);
}

Tensor aggregate_empty() { return Tensor::scalar(1.0); }

Tensor aggregate(const Tensor& values, double t) {
    if (t <= 0.0) throw std::invalid_argument("aggregate: temperature must be > 0");
    if (values.size() == 0) return aggregate_empty();
    require_unit_range(values, "aggregate");
    return clamp01(logsumexp_neg(values, t));
}

Tensor negate(const Tensor& a) {
    require_unit_range(a, "negate");
    return sub(Tensor::constant(Matrix::Ones(a.rows(), a.cols())), a);
}

}  // namespace arguing
