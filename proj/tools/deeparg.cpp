#include "arguing/cli.hpp"
#include "arguing/explain.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

namespace {

int fail(const std::string& message) {
    std::cerr << nlohmann::json{{"error", message}}.dump() << "\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deep Arguing: case-based argumentative classification"};
    app.require_subcommand(1);

    std::string config_path, data_path, model_path, report_path = "report.jsonl";
    std::string out_model = "model.ckpt", rows_path, dot_path, json_path;
    std::string classes_arg;
    double threshold = 0.25;
    int row = 0;
    long seed = -1;

    auto* train_cmd = app.add_subcommand("train", "Train a model from a config and a CSV file");
    train_cmd->add_option("config", config_path, "key=value config file")->required();
    train_cmd->add_option("data", data_path, "training CSV")->required();
    train_cmd->add_option("--model", out_model, "output checkpoint path");
    train_cmd->add_option("--report", report_path, "training report (JSON lines)");
    train_cmd->add_option("--seed", seed, "override the config seed");

    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on labelled data");
    eval_cmd->add_option("model", model_path, "checkpoint path")->required();
    eval_cmd->add_option("data", data_path, "labelled CSV")->required();

    auto* predict_cmd = app.add_subcommand("predict", "Predict labels for CSV rows");
    predict_cmd->add_option("model", model_path, "checkpoint path")->required();
    predict_cmd->add_option("rows", rows_path, "CSV of rows to classify")->required();

    auto* explain_cmd = app.add_subcommand("explain", "Export a case-based explanation subgraph");
    explain_cmd->add_option("model", model_path, "checkpoint path")->required();
    explain_cmd->add_option("row_file", rows_path, "CSV holding the row to explain")->required();
    explain_cmd->add_option("--row", row, "0-based row index in the file");
    explain_cmd->add_option("--classes", classes_arg, "comma list of 1-based classes (default: all)");
    explain_cmd->add_option("--threshold", threshold, "minimum |edge weight| to keep");
    explain_cmd->add_option("--dot", dot_path, "DOT output path");
    explain_cmd->add_option("--json", json_path, "JSON output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_cmd) {
            auto cfg = arguing::cli::parse_config_file(config_path);
            if (seed >= 0) cfg.train.seed = static_cast<std::uint64_t>(seed);
            auto result = arguing::cli::run_train(cfg, data_path);
            arguing::save_checkpoint(out_model, result.checkpoint);
            arguing::cli::write_report_jsonl(result.report, report_path);
            std::cout << nlohmann::json{{"model", out_model},
                                        {"report", report_path},
                                        {"test_macro_f1", result.report.test.macro_f1},
                                        {"test_accuracy", result.report.test.accuracy}}
                             .dump(2)
                      << "\n";
        } else if (*eval_cmd) {
            auto ckpt = arguing::load_checkpoint(model_path);
            auto metrics = arguing::cli::run_eval(ckpt, data_path);
            std::cout << arguing::cli::metrics_to_json(metrics, ckpt.schema.label_vocab) << "\n";
        } else if (*predict_cmd) {
            auto ckpt = arguing::load_checkpoint(model_path);
            auto preds = arguing::cli::run_predict(ckpt, rows_path);
            std::cout << arguing::cli::predictions_to_json(preds) << "\n";
        } else if (*explain_cmd) {
            auto ckpt = arguing::load_checkpoint(model_path);
            std::vector<int> class_filter;
            if (classes_arg.empty()) {
                for (int c = 0; c < ckpt.schema.num_classes(); ++c) class_filter.push_back(c);
            } else {
                std::stringstream ss(classes_arg);
                std::string item;
                while (std::getline(ss, item, ',')) class_filter.push_back(std::stoi(item) - 1);
            }
            auto sub = arguing::cli::run_explain(ckpt, rows_path, row, class_filter, threshold);
            if (!dot_path.empty()) arguing::export_dot(sub, dot_path);
            if (!json_path.empty()) arguing::export_json(sub, json_path);
            if (dot_path.empty() && json_path.empty()) arguing::export_dot(sub, std::cout);
        }
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return 0;
}
