#include "arguing/qbaf.hpp"

#include "arguing/fuzzy.hpp"

#include <ostream>
#include <stdexcept>

namespace arguing {

int FullCasebase::feature_width() const {
    if (cases.empty()) throw std::invalid_argument("FullCasebase: empty casebase");
    return static_cast<int>(cases.front().x.size());
}

Matrix FullCasebase::all_characterizations() const {
    const int p = feature_width();
    Matrix out(node_count(), p);
    long r = 0;
    for (const auto& c : cases) out.row(r++) = c.x.transpose();
    for (const auto& tgt : targets) out.row(r++) = tgt.x.transpose();
    return out;
}

std::vector<int> FullCasebase::node_labels() const {
    std::vector<int> labels;
    labels.reserve(node_count());
    for (const auto& c : cases) labels.push_back(c.label);
    for (const auto& tgt : targets) labels.push_back(tgt.label);
    return labels;
}

std::vector<int> FullCasebase::target_indices() const {
    std::vector<int> idx;
    for (size_t c = 0; c < targets.size(); ++c)
        idx.push_back(static_cast<int>(cases.size() + c));
    return idx;
}

std::vector<TargetArgument> make_targets(const std::vector<Case>& casebase, int num_classes) {
    if (casebase.empty()) throw std::invalid_argument("make_targets: empty casebase");
    if (num_classes < 2) throw std::invalid_argument("make_targets: need at least 2 classes");
    Vector mean = Vector::Zero(casebase.front().x.size());
    for (const auto& c : casebase) mean += c.x;
    mean /= static_cast<double>(casebase.size());

    std::vector<TargetArgument> targets;
    for (int c = 0; c < num_classes; ++c) targets.push_back({mean, c});
    return targets;
}

Tensor casebase_adjacency(const Tensor& w, const std::vector<int>& labels, double t) {
    if (t <= 0.0) throw std::invalid_argument("casebase_adjacency: temperature must be > 0");
    const long n = w.rows();
    if (w.cols() != n || static_cast<long>(labels.size()) != n)
        throw std::invalid_argument("casebase_adjacency: shape mismatch");

    // One minimality term per intervening node g:
    //   m_g[i][j] = 1 - min(W[i][g], W[g][j]).
    std::vector<Tensor> terms;
    std::vector<Matrix> attack_masks;
    Tensor ones = Tensor::constant(Matrix::Ones(n, n));
    terms.reserve(n);
    for (long g = 0; g < n; ++g) {
        Tensor wig = broadcast_cols(col(w, g), n);              // (i,j) -> W[i][g]
        Tensor wgj = broadcast_rows(row(w, g), n);              // (i,j) -> W[g][j]
        terms.push_back(sub(ones, tnorm(wig, wgj)));
        // Attack minimality only ranges over nodes sharing the attacker's label.
        Matrix mask(n, n);
        for (long i = 0; i < n; ++i)
            mask.row(i).setConstant(labels[g] == labels[i] ? 1.0 : 0.0);
        attack_masks.push_back(std::move(mask));
    }

    Tensor agg_support = clamp01(softmin_stack(terms, {}, t));
    Tensor agg_attack = clamp01(softmin_stack(terms, attack_masks, t));
    Tensor wmin_support = tnorm(w, agg_support);
    Tensor wmin_attack = tnorm(w, agg_attack);

    Matrix support_mask(n, n), attack_mask(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            const bool same = labels[i] == labels[j];
            support_mask(i, j) = (i != j && same) ? 1.0 : 0.0;
            attack_mask(i, j) = (i != j && !same) ? 1.0 : 0.0;
        }

    return sub(hadamard(wmin_support, Tensor::constant(support_mask)),
               hadamard(wmin_attack, Tensor::constant(attack_mask)));
}

std::pair<Tensor, Tensor> build_casebase_graph(const DeepArguingModel& model,
                                               const FullCasebase& fcb, double t) {
    if (fcb.feature_width() != model.input_width())
        throw std::invalid_argument("build_casebase_graph: feature width mismatch");
    Tensor x_all = Tensor::constant(fcb.all_characterizations());
    Tensor w = exceptionality(model, x_all, x_all);
    Tensor a_cb = casebase_adjacency(w, fcb.node_labels(), t);
    Tensor b_cb = base_score(model, x_all);
    return {a_cb, b_cb};
}

std::pair<Tensor, Tensor> build_newcase_edges(const DeepArguingModel& model,
                                              const FullCasebase& fcb,
                                              const Tensor& x_new) {
    if (x_new.cols() != model.input_width())
        throw std::invalid_argument("build_newcase_edges: feature width mismatch");
    Tensor x_all = Tensor::constant(fcb.all_characterizations());
    Tensor a_new = irrelevance(model, x_new, x_all);
    Tensor b_new = base_score(model, x_new);
    return {a_new, b_new};
}

QBAFBatch build_qbaf(const DeepArguingModel& model, const FullCasebase& fcb,
                     const Tensor& x_new, double t) {
    QBAFBatch batch;
    auto [a_cb, b_cb] = build_casebase_graph(model, fcb, t);
    auto [a_new, b_new] = build_newcase_edges(model, fcb, x_new);
    batch.a_cb = a_cb;
    batch.b_cb = b_cb;
    batch.a_new = a_new;
    batch.b_new = b_new;
    batch.target_indices = fcb.target_indices();
    return batch;
}

void write_qbaf_text(std::ostream& out, const FullCasebase& fcb, const Matrix& a_cb,
                     const Matrix& b_cb) {
    const auto labels = fcb.node_labels();
    const long n = a_cb.rows();
    out.precision(17);
    for (long i = 0; i < n; ++i) {
        const long src = i < static_cast<long>(fcb.cases.size()) ? fcb.cases[i].source_id : -1;
        out << "node " << i << " " << labels[i] + 1 << " " << b_cb(i, 0) << " " << src << "\n";
    }
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            if (a_cb(i, j) != 0.0)
                out << "edge " << i << " " << j << " " << a_cb(i, j) << "\n";
}

}  // namespace arguing
