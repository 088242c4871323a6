#pragma once

#include "arguing/ops.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace arguing {

/// Layer widths for a ReLU MLP, input width first, output width last.
struct MLPSpec {
    std::vector<int> widths;

    void validate() const;
    int input_width() const { return widths.front(); }
    int output_width() const { return widths.back(); }
};

/// Per-layer weights (in x out) and biases (1 x out), all leaf parameters.
struct MLPParams {
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;
};

MLPParams init_mlp(const MLPSpec& spec, std::mt19937_64& rng);

/// Forward pass with ReLU between layers; no activation after the last layer.
Tensor mlp_forward(const MLPParams& params, const Tensor& x);

/// Shared feature extractor plus base-score and edge-weight heads. The heads
/// consume the extractor output; alpha is the dominance sigmoid temperature
/// and embedding_dim the width of the edge-head output.
struct DeepArguingModel {
    MLPSpec extractor_spec, base_spec, edge_spec;
    MLPParams extractor, base_head, edge_head;
    double alpha = 1.0;
    int embedding_dim = 0;

    std::vector<Tensor> parameters() const;
    int input_width() const { return extractor_spec.input_width(); }
};

/// Builds a model from the extractor widths and head hidden widths; the base
/// head always ends in a width-1 layer and the edge head in a width-d layer.
DeepArguingModel make_model(const std::vector<int>& extractor_widths,
                            const std::vector<int>& head_hidden_widths,
                            int embedding_dim, double alpha, std::uint64_t seed);

Tensor features(const DeepArguingModel& model, const Tensor& x);
Tensor base_score(const DeepArguingModel& model, const Tensor& x);
Tensor edge_embeddings(const DeepArguingModel& model, const Tensor& x);

/// Pairwise one-way soft coordinate domination in the edge-embedding space,
/// in [0,1]; 0 whenever the first argument does not dominate the second.
Tensor exceptionality(const DeepArguingModel& model, const Tensor& xa, const Tensor& xb);

/// -(1 - exceptionality(x_new, x_cb)), in [-1,0]; the attack weight a new
/// case places on a stored case.
Tensor irrelevance(const DeepArguingModel& model, const Tensor& x_new, const Tensor& x_cb);

// Versioned little-endian serialization: magic header, specs, alpha, d, then
// per-tensor shape records and raw doubles.
void save_model(std::ostream& out, const DeepArguingModel& model);
DeepArguingModel load_model(std::istream& in);

}  // namespace arguing
