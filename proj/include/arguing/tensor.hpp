#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace arguing {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct TensorNode;
using NodePtr = std::shared_ptr<TensorNode>;

/// One recorded operation result. Leaves (parameters, constants) have no
/// backprop rule; interior nodes hold references to their inputs and a
/// closure that scatters the output gradient into them.
struct TensorNode {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    bool grad_allocated = false;
    std::vector<NodePtr> parents;
    std::function<void(TensorNode&)> backprop;

    void ensure_grad() {
        if (!grad_allocated) {
            grad = Matrix::Zero(value.rows(), value.cols());
            grad_allocated = true;
        }
    }
};

/// Dense 2-D tensor with an optional gradient slot. Values are immutable once
/// produced by an op; only leaf parameters are mutated (by the optimizer).
class Tensor {
public:
    Tensor() = default;

    static Tensor constant(Matrix v) { return Tensor(std::move(v), false); }

    static Tensor param(Matrix v) { return Tensor(std::move(v), true); }

    static Tensor scalar(double v) {
        Matrix m(1, 1);
        m(0, 0) = v;
        return constant(std::move(m));
    }

    const Matrix& value() const { return node_->value; }
    Matrix& mutable_value() { return node_->value; }

    bool requires_grad() const { return node_ && node_->requires_grad; }
    bool has_grad() const { return node_ && node_->grad_allocated; }

    const Matrix& grad() const {
        if (!has_grad()) throw std::logic_error("tensor has no gradient");
        return node_->grad;
    }
    Matrix& mutable_grad() {
        node_->ensure_grad();
        return node_->grad;
    }

    void zero_grad() {
        if (node_) {
            node_->grad_allocated = false;
            node_->grad.resize(0, 0);
        }
    }

    long rows() const { return node_->value.rows(); }
    long cols() const { return node_->value.cols(); }
    long size() const { return node_->value.size(); }
    bool is_scalar() const { return size() == 1; }
    double item() const {
        if (!is_scalar()) throw std::logic_error("item() on non-scalar tensor");
        return node_->value(0, 0);
    }

    NodePtr node() const { return node_; }

    bool defined() const { return node_ != nullptr; }

    friend Tensor make_op(Matrix value, std::vector<Tensor> inputs,
                          std::function<void(TensorNode&)> backprop);

private:
    Tensor(Matrix v, bool requires_grad) : node_(std::make_shared<TensorNode>()) {
        if (!v.allFinite())
            throw std::runtime_error("non-finite values in tensor construction");
        node_->value = std::move(v);
        node_->requires_grad = requires_grad;
    }

    explicit Tensor(NodePtr n) : node_(std::move(n)) {}

    NodePtr node_;
};

/// Records an op result on the tape. The backprop closure receives the
/// finished node (grad populated) and must accumulate into parent grads via
/// accumulate_grad.
inline Tensor make_op(Matrix value, std::vector<Tensor> inputs,
                      std::function<void(TensorNode&)> backprop) {
    if (!value.allFinite())
        throw std::runtime_error("non-finite values produced by an operation");
    auto node = std::make_shared<TensorNode>();
    node->value = std::move(value);
    for (const auto& in : inputs) {
        node->parents.push_back(in.node());
        if (in.requires_grad()) node->requires_grad = true;
    }
    if (node->requires_grad) node->backprop = std::move(backprop);
    return Tensor(node);
}

inline void accumulate_grad(const NodePtr& parent, const Matrix& g) {
    if (!parent->requires_grad) return;
    parent->ensure_grad();
    parent->grad += g;
}

/// Reverse sweep from a scalar loss. The tape is discovered by a depth-first
/// walk over parent links, giving a topological order that visits every
/// recorded op exactly once.
void backward(const Tensor& loss);

void zero_grads(const std::vector<Tensor>& params);

}  // namespace arguing
