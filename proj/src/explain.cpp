#include "arguing/explain.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace arguing {

namespace {

const char* kind_name(RelationKind k) {
    switch (k) {
        case RelationKind::Attack: return "attack";
        case RelationKind::Support: return "support";
        case RelationKind::IrrelevanceAttack: return "irrelevance-attack";
    }
    return "attack";
}

RelationKind kind_from_name(const std::string& s) {
    if (s == "attack") return RelationKind::Attack;
    if (s == "support") return RelationKind::Support;
    if (s == "irrelevance-attack") return RelationKind::IrrelevanceAttack;
    throw std::runtime_error("unknown relation kind: " + s);
}

}  // namespace

ExplanationSubgraph extract_explanation(const QBAFBatch& qbaf, const StrengthTrace& trace,
                                        const FullCasebase& fcb, int batch_row,
                                        const std::vector<int>& class_filter,
                                        double threshold) {
    if (class_filter.empty()) throw std::invalid_argument("extract_explanation: empty class filter");
    if (threshold < 0.0 || threshold > 1.0)
        throw std::invalid_argument("extract_explanation: threshold outside [0,1]");
    if (batch_row < 0 || batch_row >= qbaf.a_new.rows())
        throw std::out_of_range("extract_explanation: batch row out of range");

    const int n = fcb.node_count();
    const auto labels = fcb.node_labels();

    ExplanationSubgraph sub;
    sub.class_filter = class_filter;
    sub.threshold = threshold;

    auto in_filter = [&](int label) {
        return std::find(class_filter.begin(), class_filter.end(), label) != class_filter.end();
    };

    std::vector<bool> retained(n, false);
    for (int i = 0; i < n; ++i) {
        if (!in_filter(labels[i])) continue;
        retained[i] = true;
        ExplanationNode node;
        node.index = i;
        node.label = labels[i];
        node.base_score = qbaf.b_cb.value()(i, 0);
        node.source_id = i < static_cast<int>(fcb.cases.size()) ? fcb.cases[i].source_id : -1;
        node.final_strength = trace.strengths.value()(batch_row, i);
        sub.nodes.push_back(node);
    }

    // The new case, index n; its strength is its base score (nothing attacks it).
    ExplanationNode newcase;
    newcase.index = n;
    newcase.base_score = qbaf.b_new.value()(batch_row, 0);
    newcase.final_strength = newcase.base_score;
    sub.nodes.push_back(newcase);

    for (int i = 0; i < n; ++i) {
        if (!retained[i]) continue;
        for (int j = 0; j < n; ++j) {
            if (!retained[j]) continue;
            const double w = qbaf.a_cb.value()(i, j);
            if (std::abs(w) <= threshold || w == 0.0) continue;
            sub.edges.push_back(
                {i, j, w, w < 0.0 ? RelationKind::Attack : RelationKind::Support});
        }
    }
    for (int j = 0; j < n; ++j) {
        if (!retained[j]) continue;
        const double w = qbaf.a_new.value()(batch_row, j);
        if (std::abs(w) <= threshold || w == 0.0) continue;
        sub.edges.push_back({n, j, w, RelationKind::IrrelevanceAttack});
    }
    return sub;
}

void export_dot(const ExplanationSubgraph& sub, std::ostream& out) {
    out << "digraph explanation {\n";
    out << "  rankdir=LR;\n";
    for (const auto& node : sub.nodes) {
        char label[128];
        if (node.label >= 0)
            std::snprintf(label, sizeof(label), "a%d\\nclass %d\\nstr %.2f", node.index,
                          node.label + 1, node.final_strength);
        else
            std::snprintf(label, sizeof(label), "new case\\nstr %.2f", node.final_strength);
        // Border thickness carries the base score (displayed rounded to 2 dp).
        out << "  n" << node.index << " [label=\"" << label << "\", penwidth="
            << 1.0 + 3.0 * node.base_score << ", tooltip=\"base score "
            << static_cast<int>(node.base_score * 100.0 + 0.5) / 100.0 << "\"];\n";
    }
    for (const auto& edge : sub.edges) {
        const double mag = std::min(1.0, std::abs(edge.weight));
        const char* base = edge.kind == RelationKind::Support           ? "#00aa00"
                           : edge.kind == RelationKind::IrrelevanceAttack ? "#800080"
                                                                          : "#cc0000";
        const int alpha = 40 + static_cast<int>(215.0 * mag);
        char color[16];
        std::snprintf(color, sizeof(color), "%s%02x", base, alpha);
        out << "  n" << edge.from << " -> n" << edge.to << " [color=\"" << color
            << "\", penwidth=" << 0.5 + 3.0 * mag << ", label=\"";
        char wbuf[32];
        std::snprintf(wbuf, sizeof(wbuf), "%.2f", edge.weight);
        out << wbuf << "\"];\n";
    }
    out << "}\n";
}

void export_dot(const ExplanationSubgraph& sub, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    export_dot(sub, out);
}

void export_json(const ExplanationSubgraph& sub, std::ostream& out) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["threshold"] = sub.threshold;
    // Classes are 1-based on the wire.
    for (int c : sub.class_filter) j["class_filter"].push_back(c + 1);
    j["nodes"] = nlohmann::json::array();
    for (const auto& node : sub.nodes)
        j["nodes"].push_back({{"index", node.index},
                              {"class", node.label >= 0 ? node.label + 1 : 0},
                              {"base_score", node.base_score},
                              {"source_id", node.source_id},
                              {"final_strength", node.final_strength}});
    j["edges"] = nlohmann::json::array();
    for (const auto& edge : sub.edges)
        j["edges"].push_back({{"from", edge.from},
                              {"to", edge.to},
                              {"weight", edge.weight},
                              {"kind", kind_name(edge.kind)}});
    out << j.dump(2) << "\n";
}

void export_json(const ExplanationSubgraph& sub, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    export_json(sub, out);
}

ExplanationSubgraph import_json(std::istream& in) {
    nlohmann::json j;
    in >> j;
    if (j.at("schema_version").get<int>() != 1)
        throw std::runtime_error("unsupported explanation schema version");
    ExplanationSubgraph sub;
    sub.threshold = j.at("threshold").get<double>();
    for (const auto& c : j.at("class_filter")) sub.class_filter.push_back(c.get<int>() - 1);
    for (const auto& nj : j.at("nodes")) {
        ExplanationNode node;
        node.index = nj.at("index").get<int>();
        node.label = nj.at("class").get<int>() - 1;
        node.base_score = nj.at("base_score").get<double>();
        node.source_id = nj.at("source_id").get<long>();
        node.final_strength = nj.at("final_strength").get<double>();
        sub.nodes.push_back(node);
    }
    for (const auto& ej : j.at("edges")) {
        ExplanationEdge edge;
        edge.from = ej.at("from").get<int>();
        edge.to = ej.at("to").get<int>();
        edge.weight = ej.at("weight").get<double>();
        edge.kind = kind_from_name(ej.at("kind").get<std::string>());
        sub.edges.push_back(edge);
    }
    return sub;
}

}  // namespace arguing
