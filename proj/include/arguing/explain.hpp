#pragma once

#include "arguing/semantics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace arguing {

enum class RelationKind { Attack, Support, IrrelevanceAttack };

struct ExplanationNode {
    int index = 0;          // node index in the full graph; the new case is index n
    int label = -1;         // 0-based class, -1 for the new case
    double base_score = 0.0;
    long source_id = -1;
    double final_strength = 0.0;
};

struct ExplanationEdge {
    int from = 0, to = 0;
    double weight = 0.0;
    RelationKind kind = RelationKind::Attack;
};

struct ExplanationSubgraph {
    std::vector<ExplanationNode> nodes;
    std::vector<ExplanationEdge> edges;
    std::vector<int> class_filter;  // 0-based retained classes
    double threshold = 0.0;
};

/// Filters the mined graph for one batch row to the classes of interest plus
/// the new case, keeping edges whose |weight| exceeds the threshold. Edge
/// weights are copied from the built matrices, never recomputed.
ExplanationSubgraph extract_explanation(const QBAFBatch& qbaf, const StrengthTrace& trace,
                                        const FullCasebase& fcb, int batch_row,
                                        const std::vector<int>& class_filter,
                                        double threshold);

/// Graphviz output: attacks red, supports green, irrelevance attacks purple;
/// edge pen width and color intensity scale with |weight|, node border width
/// with the base score.
void export_dot(const ExplanationSubgraph& sub, std::ostream& out);
void export_dot(const ExplanationSubgraph& sub, const std::string& path);

void export_json(const ExplanationSubgraph& sub, std::ostream& out);
void export_json(const ExplanationSubgraph& sub, const std::string& path);
ExplanationSubgraph import_json(std::istream& in);

}  // namespace arguing
