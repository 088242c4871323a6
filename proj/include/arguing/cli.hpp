#pragma once

#include "arguing/checkpoint.hpp"
#include "arguing/explain.hpp"

#include <optional>
#include <string>
#include <vector>

namespace arguing::cli {

/// Parsed flat key=value config file: training hyperparameters plus the data
/// schema. Unknown keys are rejected.
struct RunConfig {
    TrainConfig train;
    DatasetSchema schema;  // label_vocab may be empty (discovered from data)
    SplitConfig split;
};

RunConfig parse_config_file(const std::string& path);

struct TrainResult {
    Checkpoint checkpoint;
    TrainReport report;
};

TrainResult run_train(const RunConfig& config, const std::string& data_path);

void write_report_jsonl(const TrainReport& report, const std::string& path);

Metrics run_eval(const Checkpoint& ckpt, const std::string& data_path);

struct RowPrediction {
    int label = 0;                         // 0-based class index
    std::string label_name;
    std::vector<double> target_strengths;  // length C
};

std::vector<RowPrediction> run_predict(const Checkpoint& ckpt, const std::string& rows_path);

/// Builds the full QBAF for one row and writes the filtered subgraph.
ExplanationSubgraph run_explain(const Checkpoint& ckpt, const std::string& rows_path,
                                int row, const std::vector<int>& class_filter,
                                double threshold);

std::string metrics_to_json(const Metrics& m, const std::vector<std::string>& label_vocab);
std::string predictions_to_json(const std::vector<RowPrediction>& preds);

}  // namespace arguing::cli
