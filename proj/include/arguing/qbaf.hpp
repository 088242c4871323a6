#pragma once

#include "arguing/model.hpp"

#include <iosfwd>
#include <vector>

namespace arguing {

/// A labelled example acting as an argument. Labels are 0-based internally;
/// the CLI maps 1-based class ids at the boundary.
struct Case {
    Vector x;
    int label = 0;
    long source_id = -1;  // row in the originating data file, -1 if synthetic
};

/// Per-class debate topic; all targets share the same default
/// characterization (the casebase mean).
struct TargetArgument {
    Vector x;
    int label = 0;
};

/// Clustered casebase plus targets, in the fixed node order used by every
/// matrix and explanation: casebase cases first, then one target per class.
struct FullCasebase {
    std::vector<Case> cases;
    std::vector<TargetArgument> targets;

    int node_count() const { return static_cast<int>(cases.size() + targets.size()); }
    int num_classes() const { return static_cast<int>(targets.size()); }
    int feature_width() const;
    Matrix all_characterizations() const;      // n x p
    std::vector<int> node_labels() const;      // length n
    std::vector<int> target_indices() const;   // the C trailing node indices
};

std::vector<TargetArgument> make_targets(const std::vector<Case>& casebase, int num_classes);

/// Mined argumentation graph for one mini-batch: casebase adjacency, base
/// scores and the new cases' irrelevance attacks.
struct QBAFBatch {
    Tensor a_cb;    // n x n, zero diagonal
    Tensor b_cb;    // n x 1
    Tensor a_new;   // B x n, entries in [-1, 0]
    Tensor b_new;   // B x 1
    std::vector<int> target_indices;
};

/// Signed adjacency from a pairwise exceptionality matrix: attacks between
/// opposite labels use the minimality set restricted to the attacker's label,
/// supports use all nodes. The minimality set keeps every node (self terms
/// contribute 1 and never suppress an edge).
Tensor casebase_adjacency(const Tensor& exceptionality_matrix,
                          const std::vector<int>& labels, double t);

std::pair<Tensor, Tensor> build_casebase_graph(const DeepArguingModel& model,
                                               const FullCasebase& fcb, double t);

std::pair<Tensor, Tensor> build_newcase_edges(const DeepArguingModel& model,
                                              const FullCasebase& fcb,
                                              const Tensor& x_new);

QBAFBatch build_qbaf(const DeepArguingModel& model, const FullCasebase& fcb,
                     const Tensor& x_new, double t);

/// Plain-text dump of a built graph: one "node" line per argument and one
/// "edge" line per nonzero weight.
void write_qbaf_text(std::ostream& out, const FullCasebase& fcb, const Matrix& a_cb,
                     const Matrix& b_cb);

}  // namespace arguing
