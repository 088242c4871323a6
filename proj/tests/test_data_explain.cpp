#include "arguing/checkpoint.hpp"
#include "arguing/cli.hpp"
#include "arguing/explain.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace arguing;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

DatasetSchema iris_like_schema() {
    DatasetSchema schema;
    schema.features = {{"len", ColumnSpec::Kind::Numeric},
                       {"wid", ColumnSpec::Kind::Numeric},
                       {"color", ColumnSpec::Kind::Categorical}};
    schema.label_column = "species";
    schema.label_vocab = {"a", "b"};
    return schema;
}

std::string make_numeric_csv(int rows_per_class) {
    std::ostringstream ss;
    ss << "len,wid,color,species\n";
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < rows_per_class; ++i) {
        ss << 1.0 + u(rng) << "," << 2.0 + u(rng) << ",red,a\n";
        ss << 5.0 + u(rng) << "," << 6.0 + u(rng) << ",blue,b\n";
    }
    return ss.str();
}

}  // namespace

// --- CSV ------------------------------------------------------------------

TEST_CASE("read_csv handles quoted fields, embedded commas and doubled quotes") {
    const auto path = write_temp("quoting.csv",
                                 "name,note,label\n"
                                 "plain,simple,x\n"
                                 "\"quoted,comma\",\"say \"\"hi\"\"\",y\n"
                                 "crlf,ok,z\r\n");
    RawTable t = read_csv(path);
    REQUIRE(t.header.size() == 3);
    REQUIRE(t.rows.size() == 3);
    CHECK(t.rows[1][0] == "quoted,comma");
    CHECK(t.rows[1][1] == "say \"hi\"");
    CHECK(t.rows[2][2] == "z");
    CHECK(t.column_index("note") == 1);
    CHECK(t.column_index("absent") == -1);
}

TEST_CASE("read_csv rejects ragged rows with the offending row number") {
    const auto path = write_temp("ragged.csv", "a,b\n1,2\n3\n");
    CHECK_THROWS_WITH_AS(read_csv(path), doctest::Contains("row 2"), std::runtime_error);
    CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), std::runtime_error);
}

// --- splits ---------------------------------------------------------------

TEST_CASE("stratified_split keeps per-class proportions exactly") {
    std::vector<int> labels;
    for (int i = 0; i < 60; ++i) labels.push_back(0);
    for (int i = 0; i < 40; ++i) labels.push_back(1);
    auto [first, second] = stratified_split(labels, 0.2, 5);
    CHECK(first.size() == 80);
    CHECK(second.size() == 20);
    int c0 = 0, c1 = 0;
    for (int i : second) (labels[i] == 0 ? c0 : c1)++;
    CHECK(c0 == 12);
    CHECK(c1 == 8);

    // Disjoint cover of all indices.
    std::vector<int> all = first;
    all.insert(all.end(), second.begin(), second.end());
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 100; ++i) CHECK(all[i] == i);

    // Seeded determinism, and a different seed shuffles differently.
    auto [f2, s2] = stratified_split(labels, 0.2, 5);
    CHECK(s2 == second);
    auto [f3, s3] = stratified_split(labels, 0.2, 6);
    CHECK(s3 != second);
}

// --- preprocessor ---------------------------------------------------------

TEST_CASE("preprocessor z-scores numerics and one-hot encodes categoricals") {
    const auto path = write_temp("prep.csv", make_numeric_csv(50));
    DatasetSchema schema = iris_like_schema();
    RawTable t = read_csv(path);
    std::vector<int> idx(t.rows.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);

    Preprocessor prep;
    CHECK_THROWS_AS(prep.transform(t.rows[0], t, schema), std::logic_error);
    prep.fit(t, schema, idx);
    CHECK(prep.width() == 2 + 2);  // two numerics + {blue, red}

    // Transformed training columns have mean 0, stddev 1.
    Vector mean = Vector::Zero(prep.width());
    Vector sq = Vector::Zero(prep.width());
    for (int r : idx) {
        Vector v = prep.transform(t.rows[r], t, schema);
        mean += v;
        sq += v.cwiseProduct(v);
    }
    mean /= static_cast<double>(idx.size());
    sq /= static_cast<double>(idx.size());
    for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(mean[c]) < 1e-9);
        CHECK(std::abs(std::sqrt(sq[c] - mean[c] * mean[c]) - 1.0) < 1e-9);
    }

    // One-hot block: categories are sorted, so blue then red.
    Vector red_row = prep.transform(t.rows[0], t, schema);
    CHECK(red_row[2] == 0.0);
    CHECK(red_row[3] == 1.0);

    // Unseen category maps to an all-zero block.
    auto row = t.rows[0];
    row[2] = "green";
    Vector unseen = prep.transform(row, t, schema);
    CHECK(unseen[2] == 0.0);
    CHECK(unseen[3] == 0.0);

    // Wrong field count is rejected.
    row.push_back("extra");
    CHECK_THROWS_AS(prep.transform(row, t, schema), std::invalid_argument);
}

TEST_CASE("constant numeric columns transform to zero instead of dividing by zero") {
    const auto path = write_temp("const.csv", "x,species\n3.5,a\n3.5,b\n3.5,a\n3.5,b\n");
    DatasetSchema schema;
    schema.features = {{"x", ColumnSpec::Kind::Numeric}};
    schema.label_column = "species";
    schema.label_vocab = {"a", "b"};
    RawTable t = read_csv(path);
    Preprocessor prep;
    prep.fit(t, schema, {0, 1, 2, 3});
    for (int r = 0; r < 4; ++r) CHECK(prep.transform(t.rows[r], t, schema)[0] == 0.0);
}

TEST_CASE("load_and_preprocess carves a 64/16/20 split from 100 rows") {
    const auto path = write_temp("full.csv", make_numeric_csv(50));
    auto [splits, prep] = load_and_preprocess(path, iris_like_schema(), SplitConfig{}, 1);
    CHECK(splits.train.size() == 64);
    CHECK(splits.val.size() == 16);
    CHECK(splits.test.size() == 20);
    // Stratification: each split is half class a, half class b.
    for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
        int c0 = 0;
        for (const auto& c : *part) c0 += (c.label == 0);
        CHECK(c0 * 2 == static_cast<int>(part->size()));
    }
    // Source ids refer to distinct data rows.
    std::vector<long> ids;
    for (const auto* part : {&splits.train, &splits.val, &splits.test})
        for (const auto& c : *part) ids.push_back(c.source_id);
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("an external test file switches to an 80/20 train/val split") {
    const auto train_path = write_temp("tr.csv", make_numeric_csv(50));
    const auto test_path = write_temp("te.csv", make_numeric_csv(10));
    SplitConfig split;
    split.test_path = test_path;
    auto [splits, prep] = load_and_preprocess(train_path, iris_like_schema(), split, 1);
    CHECK(splits.train.size() == 80);
    CHECK(splits.val.size() == 20);
    CHECK(splits.test.size() == 20);
}

TEST_CASE("label handling: vocabulary discovery and unknown-label errors") {
    const auto path = write_temp("labels.csv", "x,species\n1,c\n2,a\n3,b\n4,a\n");
    RawTable t = read_csv(path);
    CHECK(discover_label_vocab(t, "species") == std::vector<std::string>{"a", "b", "c"});

    DatasetSchema schema;
    schema.features = {{"x", ColumnSpec::Kind::Numeric}};
    schema.label_column = "species";
    schema.label_vocab = {"a", "b"};
    CHECK_THROWS_WITH_AS(table_labels(t, schema), doctest::Contains("row 1"),
                         std::runtime_error);
}

// --- explanation ----------------------------------------------------------

namespace {

/// 2 cases (classes 0/1), 2 targets, one batch row, hand-picked weights.
std::pair<QBAFBatch, FullCasebase> handmade_graph() {
    FullCasebase fcb;
    for (int i = 0; i < 2; ++i) {
        Case c;
        c.x = Vector::Zero(2);
        c.label = i;
        c.source_id = 100 + i;
        fcb.cases.push_back(c);
    }
    fcb.targets = make_targets(fcb.cases, 2);

    Matrix a_cb = Matrix::Zero(4, 4);
    a_cb(0, 1) = -0.8;  // attack, above threshold
    a_cb(1, 0) = -0.2;  // attack, below threshold 0.25
    a_cb(0, 2) = 0.6;   // support of target 0
    a_cb(1, 3) = -0.3;  // attack on target 1
    Matrix b_cb(4, 1);
    b_cb << 0.9, 0.8, 0.5, 0.5;
    Matrix a_new(1, 4);
    a_new << -0.7, -0.1, 0.0, -0.9;
    Matrix b_new = Matrix::Constant(1, 1, 0.6);

    QBAFBatch q;
    q.a_cb = Tensor::constant(a_cb);
    q.b_cb = Tensor::constant(b_cb);
    q.a_new = Tensor::constant(a_new);
    q.b_new = Tensor::constant(b_new);
    q.target_indices = {2, 3};
    return {q, fcb};
}

}  // namespace

TEST_CASE("extract_explanation keeps filtered nodes, thresholded edges and the new case") {
    auto [q, fcb] = handmade_graph();
    StrengthTrace trace = final_strengths(q, 3);

    ExplanationSubgraph sub = extract_explanation(q, trace, fcb, 0, {0, 1}, 0.25);
    REQUIRE(sub.nodes.size() == 5);  // 4 graph nodes + the new case
    CHECK(sub.nodes.back().index == 4);
    CHECK(sub.nodes.back().label == -1);
    CHECK(sub.nodes.back().base_score == 0.6);
    CHECK(sub.nodes.back().final_strength == 0.6);
    CHECK(sub.nodes[0].source_id == 100);
    CHECK(sub.nodes[2].source_id == -1);  // target
    CHECK(sub.nodes[0].final_strength == trace.strengths.value()(0, 0));

    // Edges: (0,1) -0.8, (0,2) 0.6, (1,3) -0.3 from the casebase, plus the
    // new case's -0.7 and -0.9; the -0.2, -0.1 and 0.0 weights are dropped.
    REQUIRE(sub.edges.size() == 5);
    int attacks = 0, supports = 0, irrelevance = 0;
    for (const auto& e : sub.edges) {
        CHECK(std::abs(e.weight) > 0.25);
        if (e.kind == RelationKind::Attack) ++attacks;
        if (e.kind == RelationKind::Support) ++supports;
        if (e.kind == RelationKind::IrrelevanceAttack) {
            ++irrelevance;
            CHECK(e.from == 4);
        }
    }
    CHECK(attacks == 2);
    CHECK(supports == 1);
    CHECK(irrelevance == 2);
}

TEST_CASE("class filtering drops nodes and their incident edges") {
    auto [q, fcb] = handmade_graph();
    StrengthTrace trace = final_strengths(q, 3);

    ExplanationSubgraph sub = extract_explanation(q, trace, fcb, 0, {0}, 0.25);
    // Retained: case 0, target 0, new case.
    REQUIRE(sub.nodes.size() == 3);
    REQUIRE(sub.edges.size() == 2);  // (0,2) support and new->0 irrelevance
    CHECK(sub.edges[0].from == 0);
    CHECK(sub.edges[0].to == 2);
    CHECK(sub.edges[1].from == 4);
    CHECK(sub.edges[1].to == 0);
}

TEST_CASE("a threshold of 1.0 leaves only nodes") {
    auto [q, fcb] = handmade_graph();
    StrengthTrace trace = final_strengths(q, 3);
    ExplanationSubgraph sub = extract_explanation(q, trace, fcb, 0, {0, 1}, 1.0);
    CHECK(sub.nodes.size() == 5);
    CHECK(sub.edges.empty());
    CHECK_THROWS_AS(extract_explanation(q, trace, fcb, 0, {}, 0.25), std::invalid_argument);
    CHECK_THROWS_AS(extract_explanation(q, trace, fcb, 0, {0}, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(extract_explanation(q, trace, fcb, 5, {0}, 0.5), std::out_of_range);
}

TEST_CASE("export_dot emits a well-formed digraph with relation colors") {
    auto [q, fcb] = handmade_graph();
    StrengthTrace trace = final_strengths(q, 3);
    ExplanationSubgraph sub = extract_explanation(q, trace, fcb, 0, {0, 1}, 0.25);

    std::stringstream ss;
    export_dot(sub, ss);
    const std::string dot = ss.str();
    CHECK(dot.find("digraph explanation {") == 0);
    CHECK(dot.rfind("}\n") == dot.size() - 2);
    CHECK(dot.find("#cc0000") != std::string::npos);  // attack
    CHECK(dot.find("#00aa00") != std::string::npos);  // support
    CHECK(dot.find("#800080") != std::string::npos);  // irrelevance
    CHECK(dot.find("new case") != std::string::npos);
    CHECK(dot.find("n4 -> n0") != std::string::npos);
    // One node statement per retained node.
    size_t nodes = 0;
    for (size_t p = dot.find("[label="); p != std::string::npos; p = dot.find("[label=", p + 1))
        ++nodes;
    CHECK(nodes == sub.nodes.size());
}

TEST_CASE("explanation JSON round-trips exactly") {
    auto [q, fcb] = handmade_graph();
    StrengthTrace trace = final_strengths(q, 3);
    ExplanationSubgraph sub = extract_explanation(q, trace, fcb, 0, {0, 1}, 0.25);

    std::stringstream ss;
    export_json(sub, ss);
    ExplanationSubgraph back = import_json(ss);

    CHECK(back.threshold == sub.threshold);
    CHECK(back.class_filter == sub.class_filter);
    REQUIRE(back.nodes.size() == sub.nodes.size());
    for (size_t i = 0; i < sub.nodes.size(); ++i) {
        CHECK(back.nodes[i].index == sub.nodes[i].index);
        CHECK(back.nodes[i].label == sub.nodes[i].label);
        CHECK(back.nodes[i].base_score == sub.nodes[i].base_score);
        CHECK(back.nodes[i].source_id == sub.nodes[i].source_id);
        CHECK(back.nodes[i].final_strength == sub.nodes[i].final_strength);
    }
    REQUIRE(back.edges.size() == sub.edges.size());
    for (size_t i = 0; i < sub.edges.size(); ++i) {
        CHECK(back.edges[i].from == sub.edges[i].from);
        CHECK(back.edges[i].to == sub.edges[i].to);
        CHECK(back.edges[i].weight == sub.edges[i].weight);
        CHECK(back.edges[i].kind == sub.edges[i].kind);
    }
}

// --- checkpoint -----------------------------------------------------------

TEST_CASE("checkpoint round-trip preserves predictions bitwise") {
    const auto path = write_temp("ck.csv", make_numeric_csv(40));
    cli::RunConfig cfg;
    cfg.schema = iris_like_schema();
    cfg.train.epochs = 2;
    cfg.train.batch_size = 16;
    cfg.train.clusters_per_class = 2;
    cfg.train.embedding_dim = 8;
    cfg.train.extractor_hidden = {8};
    cfg.train.head_hidden = {8};
    cfg.train.seed = 2;
    cli::TrainResult result = cli::run_train(cfg, path);

    const auto ckpt_path =
        (std::filesystem::temp_directory_path() / "model.ckpt").string();
    save_checkpoint(ckpt_path, result.checkpoint);
    Checkpoint loaded = load_checkpoint(ckpt_path);

    CHECK(loaded.iterations == result.checkpoint.iterations);
    CHECK(loaded.lse_temperature == result.checkpoint.lse_temperature);
    CHECK(loaded.schema.label_vocab == result.checkpoint.schema.label_vocab);
    CHECK(loaded.casebase.cases.size() == result.checkpoint.casebase.cases.size());
    CHECK(loaded.preprocessor.width() == result.checkpoint.preprocessor.width());

    auto before = cli::run_predict(result.checkpoint, path);
    auto after = cli::run_predict(loaded, path);
    REQUIRE(before.size() == after.size());
    for (size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].label == after[i].label);
        CHECK(before[i].target_strengths == after[i].target_strengths);
    }
    std::remove(ckpt_path.c_str());
}

// --- config parsing -------------------------------------------------------

TEST_CASE("parse_config_file reads every key and applies defaults") {
    const auto path = write_temp("good.conf",
                                 "# training\n"
                                 "lr = 0.01\n"
                                 "epochs = 3\n"
                                 "extractor_hidden = 32, 16\n"
                                 "label_column = species\n"
                                 "label_values = a, b\n"
                                 "numeric_columns = len, wid\n"
                                 "categorical_columns = color\n"
                                 "test_fraction = 0.25\n");
    cli::RunConfig cfg = cli::parse_config_file(path);
    CHECK(cfg.train.lr == 0.01);
    CHECK(cfg.train.epochs == 3);
    CHECK(cfg.train.extractor_hidden == std::vector<int>{32, 16});
    CHECK(cfg.train.batch_size == 64);        // default
    CHECK(cfg.train.lse_temperature == 0.025);  // default
    CHECK(cfg.schema.label_column == "species");
    CHECK(cfg.schema.label_vocab == std::vector<std::string>{"a", "b"});
    REQUIRE(cfg.schema.features.size() == 3);
    CHECK(cfg.schema.features[2].kind == ColumnSpec::Kind::Categorical);
    CHECK(cfg.split.test_fraction == 0.25);
}

TEST_CASE("parse_config_file rejects malformed input") {
    const auto unknown = write_temp("unk.conf",
                                    "label_column = y\nnumeric_columns = x\nbogus_key = 1\n");
    CHECK_THROWS_WITH_AS(cli::parse_config_file(unknown), doctest::Contains("bogus_key"),
                         std::runtime_error);

    const auto dup = write_temp("dup.conf",
                                "label_column = y\nnumeric_columns = x\nlr = 1\nlr = 2\n");
    CHECK_THROWS_WITH_AS(cli::parse_config_file(dup), doctest::Contains("duplicate"),
                         std::runtime_error);

    const auto nolabel = write_temp("nolabel.conf", "numeric_columns = x\n");
    CHECK_THROWS_AS(cli::parse_config_file(nolabel), std::runtime_error);

    const auto badnum = write_temp("badnum.conf",
                                   "label_column = y\nnumeric_columns = x\nlr = fast\n");
    CHECK_THROWS_AS(cli::parse_config_file(badnum), std::runtime_error);
}
