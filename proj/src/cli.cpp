#include "arguing/cli.hpp"

#include "arguing/explain.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace arguing::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> split_ints(const std::string& s, const std::string& key) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw std::runtime_error("config: bad integer '" + item + "' in " + key);
        }
    }
    return out;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad number '" + s + "' for " + key);
    }
}

int parse_int(const std::string& s, const std::string& key) {
    try {
        size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad integer '" + s + "' for " + key);
    }
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (kv.count(key))
            throw std::runtime_error("config: duplicate key '" + key + "'");
        kv[key] = trim(line.substr(eq + 1));
    }

    RunConfig cfg;
    auto take = [&](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("lr")) cfg.train.lr = parse_double(*v, "lr");
    if (auto v = take("weight_decay")) cfg.train.weight_decay = parse_double(*v, "weight_decay");
    if (auto v = take("epochs")) cfg.train.epochs = parse_int(*v, "epochs");
    if (auto v = take("batch_size")) cfg.train.batch_size = parse_int(*v, "batch_size");
    if (auto v = take("grad_max_norm")) cfg.train.grad_max_norm = parse_double(*v, "grad_max_norm");
    if (auto v = take("lambda_delta")) cfg.train.lambda_delta = parse_double(*v, "lambda_delta");
    if (auto v = take("lambda_dag")) cfg.train.lambda_dag = parse_double(*v, "lambda_dag");
    if (auto v = take("lambda_sp")) cfg.train.lambda_sp = parse_double(*v, "lambda_sp");
    if (auto v = take("lambda_sp_prime"))
        cfg.train.lambda_sp_prime = parse_double(*v, "lambda_sp_prime");
    if (auto v = take("alpha")) cfg.train.alpha = parse_double(*v, "alpha");
    if (auto v = take("clusters_per_class"))
        cfg.train.clusters_per_class = parse_int(*v, "clusters_per_class");
    if (auto v = take("iterations")) cfg.train.iterations = parse_int(*v, "iterations");
    if (auto v = take("lse_temperature"))
        cfg.train.lse_temperature = parse_double(*v, "lse_temperature");
    if (auto v = take("embedding_dim")) cfg.train.embedding_dim = parse_int(*v, "embedding_dim");
    if (auto v = take("extractor_hidden"))
        cfg.train.extractor_hidden = split_ints(*v, "extractor_hidden");
    if (auto v = take("head_hidden")) cfg.train.head_hidden = split_ints(*v, "head_hidden");
    if (auto v = take("seed")) cfg.train.seed = static_cast<std::uint64_t>(parse_int(*v, "seed"));

    if (auto v = take("label_column")) cfg.schema.label_column = *v;
    if (auto v = take("label_values")) cfg.schema.label_vocab = split_list(*v);
    if (auto v = take("numeric_columns"))
        for (const auto& name : split_list(*v))
            cfg.schema.features.push_back({name, ColumnSpec::Kind::Numeric});
    if (auto v = take("categorical_columns"))
        for (const auto& name : split_list(*v))
            cfg.schema.features.push_back({name, ColumnSpec::Kind::Categorical});

    if (auto v = take("test_path")) cfg.split.test_path = *v;
    if (auto v = take("test_fraction")) cfg.split.test_fraction = parse_double(*v, "test_fraction");
    if (auto v = take("val_fraction")) cfg.split.val_fraction = parse_double(*v, "val_fraction");

    if (!kv.empty())
        throw std::runtime_error("config: unknown key '" + kv.begin()->first + "'");
    if (cfg.schema.label_column.empty())
        throw std::runtime_error("config: label_column is required");
    if (cfg.schema.features.empty())
        throw std::runtime_error("config: numeric_columns or categorical_columns required");
    return cfg;
}

TrainResult run_train(const RunConfig& config, const std::string& data_path) {
    RunConfig cfg = config;
    if (cfg.schema.label_vocab.empty()) {
        RawTable table = read_csv(data_path);
        cfg.schema.label_vocab = discover_label_vocab(table, cfg.schema.label_column);
    }
    auto [splits, prep] = load_and_preprocess(data_path, cfg.schema, cfg.split, cfg.train.seed);
    auto [trained, report] = train(cfg.train, splits.train, splits.val,
                                   cfg.schema.num_classes());
    report.test = evaluate(trained.model, trained.casebase, splits.test,
                           cfg.train.iterations, cfg.train.lse_temperature);
    report.has_test = true;

    TrainResult result;
    result.checkpoint.model = std::move(trained.model);
    result.checkpoint.casebase = std::move(trained.casebase);
    result.checkpoint.preprocessor = std::move(prep);
    result.checkpoint.schema = cfg.schema;
    result.checkpoint.iterations = cfg.train.iterations;
    result.checkpoint.lse_temperature = cfg.train.lse_temperature;
    result.report = std::move(report);
    return result;
}

void write_report_jsonl(const TrainReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (const auto& e : report.epochs) {
        nlohmann::json j{{"record", "epoch"},
                         {"epoch", e.epoch},
                         {"train_loss", e.train_loss},
                         {"val_loss", e.val_loss},
                         {"train_macro_f1", e.train_macro_f1},
                         {"val_macro_f1", e.val_macro_f1},
                         {"loss_task", e.loss_task},
                         {"loss_delta", e.loss_delta},
                         {"loss_dag", e.loss_dag},
                         {"loss_sp_cb", e.loss_sp_cb},
                         {"loss_sp_new", e.loss_sp_new}};
        out << j.dump() << "\n";
    }
    if (report.has_test) {
        nlohmann::json j{{"record", "test"},
                         {"macro_f1", report.test.macro_f1},
                         {"accuracy", report.test.accuracy}};
        out << j.dump() << "\n";
    }
}

namespace {

Matrix transform_rows(const Checkpoint& ckpt, const RawTable& table,
                      const std::vector<int>& rows) {
    Matrix x(rows.size(), ckpt.preprocessor.width());
    for (size_t i = 0; i < rows.size(); ++i)
        x.row(i) = ckpt.preprocessor.transform(table.rows[rows[i]], table, ckpt.schema)
                       .transpose();
    return x;
}

}  // namespace

Metrics run_eval(const Checkpoint& ckpt, const std::string& data_path) {
    RawTable table = read_csv(data_path);
    const auto labels = table_labels(table, ckpt.schema);
    std::vector<Case> cases;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        Case c;
        c.x = ckpt.preprocessor.transform(table.rows[r], table, ckpt.schema);
        c.label = labels[r];
        c.source_id = static_cast<long>(r);
        cases.push_back(std::move(c));
    }
    return evaluate(ckpt.model, ckpt.casebase, cases, ckpt.iterations, ckpt.lse_temperature);
}

std::vector<RowPrediction> run_predict(const Checkpoint& ckpt, const std::string& rows_path) {
    RawTable table = read_csv(rows_path);
    std::vector<int> rows(table.rows.size());
    for (size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<int>(i);
    if (rows.empty()) throw std::runtime_error(rows_path + ": no data rows");
    Matrix x = transform_rows(ckpt, table, rows);

    QBAFBatch qbaf = build_qbaf(ckpt.model, ckpt.casebase, Tensor::constant(x),
                                ckpt.lse_temperature);
    StrengthTrace trace = final_strengths(qbaf, ckpt.iterations);
    Prediction pred = predict(trace, qbaf.target_indices);

    std::vector<RowPrediction> out;
    for (long b = 0; b < x.rows(); ++b) {
        RowPrediction rp;
        rp.label = pred.labels[b];
        rp.label_name = ckpt.schema.label_vocab[rp.label];
        for (long c = 0; c < pred.logits.cols(); ++c)
            rp.target_strengths.push_back(pred.logits.value()(b, c));
        out.push_back(std::move(rp));
    }
    return out;
}

ExplanationSubgraph run_explain(const Checkpoint& ckpt, const std::string& rows_path, int row,
                                const std::vector<int>& class_filter, double threshold) {
    RawTable table = read_csv(rows_path);
    if (row < 0 || row >= static_cast<int>(table.rows.size()))
        throw std::runtime_error("explain: row " + std::to_string(row) + " out of range");
    Matrix x = transform_rows(ckpt, table, {row});

    QBAFBatch qbaf = build_qbaf(ckpt.model, ckpt.casebase, Tensor::constant(x),
                                ckpt.lse_temperature);
    StrengthTrace trace = final_strengths(qbaf, ckpt.iterations);
    return extract_explanation(qbaf, trace, ckpt.casebase, 0, class_filter, threshold);
}

std::string metrics_to_json(const Metrics& m, const std::vector<std::string>& label_vocab) {
    nlohmann::json j;
    j["macro_f1"] = m.macro_f1;
    j["accuracy"] = m.accuracy;
    for (size_t c = 0; c < m.f1.size(); ++c) {
        nlohmann::json cj{{"class", label_vocab.size() > c ? label_vocab[c] : std::to_string(c + 1)},
                          {"precision", m.precision[c]},
                          {"recall", m.recall[c]},
                          {"f1", m.f1[c]}};
        j["per_class"].push_back(cj);
    }
    j["confusion"] = m.confusion;
    return j.dump(2);
}

std::string predictions_to_json(const std::vector<RowPrediction>& preds) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : preds)
        j.push_back({{"class_index", p.label + 1},
                     {"label", p.label_name},
                     {"target_strengths", p.target_strengths}});
    return j.dump(2);
}

}  // namespace arguing::cli
