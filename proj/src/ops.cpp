#include "arguing/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace arguing {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                    std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + "x" +
                                    std::to_string(b.cols()) + ")");
}

Matrix sigmoid_values(const Matrix& x) {
    return x.unaryExpr([](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
    });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions disagree (" +
                                    std::to_string(a.cols()) + " vs " +
                                    std::to_string(b.rows()) + ")");
    return make_op(a.value() * b.value(), {a, b}, [](TensorNode& n) {
        const Matrix& g = n.grad;
        accumulate_grad(n.parents[0], g * n.parents[1]->value.transpose());
        accumulate_grad(n.parents[1], n.parents[0]->value.transpose() * g);
    });
}

Tensor transpose(const Tensor& a) {
    return make_op(a.value().transpose(), {a}, [](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad.transpose());
    });
}

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    return make_op(a.value() + b.value(), {a, b}, [](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad);
        accumulate_grad(n.parents[1], n.grad);
    });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    return make_op(a.value() - b.value(), {a, b}, [](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad);
        accumulate_grad(n.parents[1], -n.grad);
    });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "hadamard");
    return make_op(a.value().cwiseProduct(b.value()), {a, b}, [](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad.cwiseProduct(n.parents[1]->value));
        accumulate_grad(n.parents[1], n.grad.cwiseProduct(n.parents[0]->value));
    });
}

Tensor scale(const Tensor& a, double s) {
    return make_op(a.value() * s, {a}, [s](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad * s);
    });
}

Tensor relu(const Tensor& a) {
    // Subgradient at 0 is 0.
    return make_op(a.value().cwiseMax(0.0), {a}, [](TensorNode& n) {
        const Matrix mask = (n.parents[0]->value.array() > 0.0).cast<double>();
        accumulate_grad(n.parents[0], n.grad.cwiseProduct(mask));
    });
}

Tensor sigmoid(const Tensor& a) {
    Matrix s = sigmoid_values(a.value());
    return make_op(s, {a}, [s](TensorNode& n) {
        accumulate_grad(n.parents[0],
                        n.grad.cwiseProduct((s.array() * (1.0 - s.array())).matrix()));
    });
}

Tensor eabs(const Tensor& a) {
    return make_op(a.value().cwiseAbs(), {a}, [](TensorNode& n) {
        const Matrix sgn = n.parents[0]->value.unaryExpr(
            [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
        accumulate_grad(n.parents[0], n.grad.cwiseProduct(sgn));
    });
}

Tensor sum(const Tensor& a) {
    Matrix out(1, 1);
    out(0, 0) = a.value().sum();
    return make_op(out, {a}, [](TensorNode& n) {
        const double g = n.grad(0, 0);
        accumulate_grad(n.parents[0],
                        Matrix::Constant(n.parents[0]->value.rows(),
                                         n.parents[0]->value.cols(), g));
    });
}

Tensor mean(const Tensor& a) {
    const double inv = 1.0 / static_cast<double>(a.size());
    return scale(sum(a), inv);
}

Tensor emin(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "emin");
    return make_op(a.value().cwiseMin(b.value()), {a, b}, [](TensorNode& n) {
        // Ties route to the first argument.
        const Matrix first = (n.parents[0]->value.array() <= n.parents[1]->value.array())
                                 .cast<double>();
        accumulate_grad(n.parents[0], n.grad.cwiseProduct(first));
        accumulate_grad(n.parents[1],
                        n.grad.cwiseProduct((1.0 - first.array()).matrix()));
    });
}

Tensor emax(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "emax");
    return make_op(a.value().cwiseMax(b.value()), {a, b}, [](TensorNode& n) {
        const Matrix first = (n.parents[0]->value.array() >= n.parents[1]->value.array())
                                 .cast<double>();
        accumulate_grad(n.parents[0], n.grad.cwiseProduct(first));
        accumulate_grad(n.parents[1],
                        n.grad.cwiseProduct((1.0 - first.array()).matrix()));
    });
}

Tensor logsumexp_neg(const Tensor& a, double t) {
    if (t <= 0.0) throw std::invalid_argument("logsumexp_neg: temperature must be > 0");
    if (a.size() == 0) throw std::invalid_argument("logsumexp_neg: empty input");
    // -t log sum exp(-a_i/t) = m - t log sum exp(-(a_i - m)/t), m = min a_i.
    const double m = a.value().minCoeff();
    const Matrix e = ((m - a.value().array()) / t).exp().matrix();
    const double s = e.sum();
    Matrix out(1, 1);
    out(0, 0) = m - t * std::log(s);
    return make_op(out, {a}, [e, s](TensorNode& n) {
        accumulate_grad(n.parents[0], (n.grad(0, 0) / s) * e);
    });
}

Tensor softmin_stack(const std::vector<Tensor>& terms, const std::vector<Matrix>& masks,
                     double t) {
    if (t <= 0.0) throw std::invalid_argument("softmin_stack: temperature must be > 0");
    if (terms.empty()) throw std::invalid_argument("softmin_stack: empty stack");
    if (!masks.empty() && masks.size() != terms.size())
        throw std::invalid_argument("softmin_stack: mask count mismatch");
    const long r = terms[0].rows(), c = terms[0].cols();
    const size_t k = terms.size();
    for (size_t g = 0; g < k; ++g) {
        if (terms[g].rows() != r || terms[g].cols() != c)
            throw std::invalid_argument("softmin_stack: term shape mismatch");
        if (!masks.empty() && (masks[g].rows() != r || masks[g].cols() != c))
            throw std::invalid_argument("softmin_stack: mask shape mismatch");
    }

    const bool masked = !masks.empty();
    Matrix m = Matrix::Constant(r, c, std::numeric_limits<double>::infinity());
    for (size_t g = 0; g < k; ++g) {
        for (long j = 0; j < c; ++j)
            for (long i = 0; i < r; ++i)
                if (!masked || masks[g](i, j) != 0.0)
                    m(i, j) = std::min(m(i, j), terms[g].value()(i, j));
    }

    // Per-element exp((m - a_g)/t) with masked-out entries contributing 0.
    std::vector<Matrix> expw(k);
    Matrix denom = Matrix::Zero(r, c);
    for (size_t g = 0; g < k; ++g) {
        expw[g] = Matrix::Zero(r, c);
        for (long j = 0; j < c; ++j)
            for (long i = 0; i < r; ++i)
                if ((!masked || masks[g](i, j) != 0.0) && std::isfinite(m(i, j)))
                    expw[g](i, j) = std::exp((m(i, j) - terms[g].value()(i, j)) / t);
        denom += expw[g];
    }

    Matrix out(r, c);
    for (long j = 0; j < c; ++j)
        for (long i = 0; i < r; ++i)
            out(i, j) = std::isfinite(m(i, j)) ? m(i, j) - t * std::log(denom(i, j))
                                               : 1.0;  // empty aggregation

    return make_op(out, terms, [expw, denom](TensorNode& n) {
        for (size_t g = 0; g < expw.size(); ++g) {
            Matrix gg = n.grad.cwiseProduct(expw[g]);
            for (long j = 0; j < gg.cols(); ++j)
                for (long i = 0; i < gg.rows(); ++i)
                    if (denom(i, j) > 0.0) gg(i, j) /= denom(i, j);
            accumulate_grad(n.parents[g], gg);
        }
    });
}

namespace {

// Scaling-and-squaring matrix exponential: scale so the induced infinity
// norm is <= 0.5, sum Taylor terms until the term norm drops below 1e-12
// (30-term cap), then square back up.
Matrix expm(const Matrix& b) {
    const long n = b.rows();
    const double norm = b.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    while (norm / std::pow(2.0, s) > 0.5) ++s;
    const Matrix a = b / std::pow(2.0, s);

    Matrix result = Matrix::Identity(n, n);
    Matrix term = Matrix::Identity(n, n);
    for (int kk = 1; kk <= 30; ++kk) {
        term = (term * a) / static_cast<double>(kk);
        result += term;
        if (term.cwiseAbs().maxCoeff() < 1e-12) break;
    }
    for (int i = 0; i < s; ++i) result = result * result;
    return result;
}

}  // namespace

Tensor trace_expm(const Tensor& b) {
    if (b.rows() != b.cols())
        throw std::invalid_argument("trace_expm: matrix must be square");
    Matrix eb = expm(b.value());
    Matrix out(1, 1);
    out(0, 0) = eb.trace();
    return make_op(out, {b}, [eb](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad(0, 0) * eb.transpose());
    });
}

Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                             const std::vector<double>& class_weights) {
    const long batch = logits.rows(), classes = logits.cols();
    if (static_cast<long>(labels.size()) != batch)
        throw std::invalid_argument("softmax_cross_entropy: label count mismatch");
    if (static_cast<long>(class_weights.size()) != classes)
        throw std::invalid_argument("softmax_cross_entropy: weight count mismatch");
    for (double w : class_weights)
        if (w <= 0.0)
            throw std::invalid_argument("softmax_cross_entropy: weights must be positive");
    for (int y : labels)
        if (y < 0 || y >= classes)
            throw std::out_of_range("softmax_cross_entropy: label out of range");

    Matrix probs(batch, classes);
    double loss = 0.0;
    for (long i = 0; i < batch; ++i) {
        const double mx = logits.value().row(i).maxCoeff();
        Eigen::RowVectorXd e = (logits.value().row(i).array() - mx).exp();
        const double z = e.sum();
        probs.row(i) = e / z;
        const double logp = logits.value()(i, labels[i]) - mx - std::log(z);
        loss -= class_weights[labels[i]] * logp;
    }
    loss /= static_cast<double>(batch);

    Matrix out(1, 1);
    out(0, 0) = loss;
    return make_op(out, {logits}, [probs, labels, class_weights, batch](TensorNode& n) {
        Matrix g = probs;
        for (long i = 0; i < batch; ++i) {
            g(i, labels[i]) -= 1.0;
            g.row(i) *= class_weights[labels[i]] / static_cast<double>(batch);
        }
        accumulate_grad(n.parents[0], n.grad(0, 0) * g);
    });
}

Tensor broadcast_rows(const Tensor& rowv, long n_rows) {
    if (rowv.rows() != 1) throw std::invalid_argument("broadcast_rows: expected 1 x n");
    return make_op(rowv.value().replicate(n_rows, 1), {rowv}, [](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad.colwise().sum());
    });
}

Tensor broadcast_cols(const Tensor& colv, long n_cols) {
    if (colv.cols() != 1) throw std::invalid_argument("broadcast_cols: expected m x 1");
    return make_op(colv.value().replicate(1, n_cols), {colv}, [](TensorNode& n) {
        accumulate_grad(n.parents[0], n.grad.rowwise().sum());
    });
}

Tensor row(const Tensor& a, long i) {
    if (i < 0 || i >= a.rows()) throw std::out_of_range("row: index out of range");
    return make_op(a.value().row(i), {a}, [i](TensorNode& n) {
        Matrix g = Matrix::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
        g.row(i) = n.grad;
        accumulate_grad(n.parents[0], g);
    });
}

Tensor col(const Tensor& a, long j) {
    if (j < 0 || j >= a.cols()) throw std::out_of_range("col: index out of range");
    return make_op(a.value().col(j), {a}, [j](TensorNode& n) {
        Matrix g = Matrix::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
        g.col(j) = n.grad;
        accumulate_grad(n.parents[0], g);
    });
}

Tensor gather_cols(const Tensor& a, const std::vector<int>& indices) {
    Matrix out(a.rows(), static_cast<long>(indices.size()));
    for (size_t k = 0; k < indices.size(); ++k) {
        if (indices[k] < 0 || indices[k] >= a.cols())
            throw std::out_of_range("gather_cols: index out of range");
        out.col(static_cast<long>(k)) = a.value().col(indices[k]);
    }
    return make_op(out, {a}, [indices](TensorNode& n) {
        Matrix g = Matrix::Zero(n.parents[0]->value.rows(), n.parents[0]->value.cols());
        for (size_t k = 0; k < indices.size(); ++k)
            g.col(indices[k]) += n.grad.col(static_cast<long>(k));
        accumulate_grad(n.parents[0], g);
    });
}

Tensor soft_dominance(const Tensor& ea, const Tensor& eb, double alpha) {
    if (ea.cols() != eb.cols())
        throw std::invalid_argument("soft_dominance: embedding widths disagree");
    const long m = ea.rows(), q = eb.rows(), d = ea.cols();
    Matrix out = Matrix::Zero(m, q);
    for (long l = 0; l < d; ++l) {
        const Matrix z = ea.value().col(l).replicate(1, q) -
                         eb.value().col(l).transpose().replicate(m, 1);
        out += (2.0 * sigmoid_values(alpha * z).array() - 1.0).matrix();
    }
    out /= static_cast<double>(d);

    return make_op(out, {ea, eb}, [alpha, m, q, d](TensorNode& n) {
        const Matrix& va = n.parents[0]->value;
        const Matrix& vb = n.parents[1]->value;
        Matrix ga = Matrix::Zero(m, d);
        Matrix gb = Matrix::Zero(q, d);
        const double c = 2.0 * alpha / static_cast<double>(d);
        for (long l = 0; l < d; ++l) {
            const Matrix z = va.col(l).replicate(1, q) -
                             vb.col(l).transpose().replicate(m, 1);
            const Matrix s = sigmoid_values(alpha * z);
            const Matrix w =
                n.grad.cwiseProduct((c * s.array() * (1.0 - s.array())).matrix());
            ga.col(l) = w.rowwise().sum();
            gb.col(l) = -w.colwise().sum().transpose();
        }
        accumulate_grad(n.parents[0], ga);
        accumulate_grad(n.parents[1], gb);
    });
}

Tensor clamp01(const Tensor& a) {
    Tensor zero = Tensor::constant(Matrix::Zero(a.rows(), a.cols()));
    Tensor one = Tensor::constant(Matrix::Ones(a.rows(), a.cols()));
    return emin(emax(a, zero), one);
}

}  // namespace arguing
