#include "arguing/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace arguing {

void DatasetSchema::validate() const {
    if (features.empty()) throw std::invalid_argument("schema: no feature columns");
    if (label_column.empty()) throw std::invalid_argument("schema: no label column");
    for (const auto& f : features)
        if (f.name == label_column)
            throw std::invalid_argument("schema: label column listed as a feature");
    if (label_vocab.size() < 2) throw std::invalid_argument("schema: need at least 2 classes");
}

int RawTable::column_index(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

namespace {

std::vector<std::string> parse_csv_line(const std::string& line, size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (in_quotes)
        throw std::runtime_error("CSV line " + std::to_string(line_no) +
                                 ": unterminated quoted field");
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

RawTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    RawTable table;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() && in.eof()) break;
        auto fields = parse_csv_line(line, line_no);
        if (line_no == 1) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                throw std::runtime_error(path + " row " + std::to_string(line_no - 1) + ": " +
                                         std::to_string(fields.size()) + " fields, expected " +
                                         std::to_string(table.header.size()));
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) throw std::runtime_error(path + ": missing header row");
    return table;
}

void Preprocessor::fit(const RawTable& table, const DatasetSchema& schema,
                       const std::vector<int>& row_indices) {
    numeric_stats.clear();
    categories.clear();
    for (const auto& colspec : schema.features) {
        const int ci = table.column_index(colspec.name);
        if (ci < 0) throw std::runtime_error("column not found: " + colspec.name);
        if (colspec.kind == ColumnSpec::Kind::Numeric) {
            double sum = 0.0, sq = 0.0;
            for (int r : row_indices) {
                const std::string& s = table.rows[r][ci];
                char* end = nullptr;
                const double v = std::strtod(s.c_str(), &end);
                if (end == s.c_str() || *end != '\0')
                    throw std::runtime_error("row " + std::to_string(r + 1) +
                                             ": non-numeric value '" + s + "' in column " +
                                             colspec.name);
                sum += v;
                sq += v * v;
            }
            const double n = static_cast<double>(row_indices.size());
            NumericStats st;
            st.mean = sum / n;
            const double var = std::max(0.0, sq / n - st.mean * st.mean);
            st.stddev = var > 0.0 ? std::sqrt(var) : 1.0;  // constant column maps to 0
            numeric_stats.push_back(st);
        } else {
            std::set<std::string> seen;
            for (int r : row_indices) seen.insert(table.rows[r][ci]);
            categories.emplace_back(seen.begin(), seen.end());
        }
    }
    fitted_ = true;
}

int Preprocessor::width() const {
    if (!fitted_) throw std::logic_error("preprocessor not fitted");
    int w = static_cast<int>(numeric_stats.size());
    for (const auto& cats : categories) w += static_cast<int>(cats.size());
    return w;
}

Vector Preprocessor::transform(const std::vector<std::string>& row, const RawTable& table,
                               const DatasetSchema& schema) const {
    if (!fitted_) throw std::logic_error("preprocessor not fitted");
    if (row.size() != table.header.size())
        throw std::invalid_argument("transform: field count does not match the schema header");
    Vector out(width());
    long pos = 0;
    size_t num_i = 0, cat_i = 0;
    for (const auto& colspec : schema.features) {
        const int ci = table.column_index(colspec.name);
        if (ci < 0) throw std::runtime_error("column not found: " + colspec.name);
        if (colspec.kind == ColumnSpec::Kind::Numeric) {
            char* end = nullptr;
            const double v = std::strtod(row[ci].c_str(), &end);
            if (end == row[ci].c_str() || *end != '\0')
                throw std::runtime_error("non-numeric value '" + row[ci] + "' in column " +
                                         colspec.name);
            const auto& st = numeric_stats[num_i++];
            out[pos++] = (v - st.mean) / st.stddev;
        } else {
            const auto& cats = categories[cat_i++];
            for (const auto& cat : cats) out[pos++] = (row[ci] == cat) ? 1.0 : 0.0;
            // unseen category: the whole block stays zero
        }
    }
    return out;
}

std::vector<std::string> discover_label_vocab(const RawTable& table,
                                              const std::string& label_column) {
    const int ci = table.column_index(label_column);
    if (ci < 0) throw std::runtime_error("label column not found: " + label_column);
    std::set<std::string> seen;
    for (const auto& row : table.rows) seen.insert(row[ci]);
    return {seen.begin(), seen.end()};
}

std::vector<int> table_labels(const RawTable& table, const DatasetSchema& schema) {
    const int ci = table.column_index(schema.label_column);
    if (ci < 0) throw std::runtime_error("label column not found: " + schema.label_column);
    std::vector<int> labels;
    labels.reserve(table.rows.size());
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const std::string& v = table.rows[r][ci];
        const auto it = std::find(schema.label_vocab.begin(), schema.label_vocab.end(), v);
        if (it == schema.label_vocab.end())
            throw std::runtime_error("row " + std::to_string(r + 1) + ": unknown label '" + v +
                                     "'");
        labels.push_back(static_cast<int>(it - schema.label_vocab.begin()));
    }
    return labels;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(const std::vector<int>& labels,
                                                               double fraction,
                                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int num_classes = 0;
    for (int l : labels) num_classes = std::max(num_classes, l + 1);

    std::vector<int> first, second;
    for (int c = 0; c < num_classes; ++c) {
        std::vector<int> members;
        for (size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == c) members.push_back(static_cast<int>(i));
        std::shuffle(members.begin(), members.end(), rng);
        const size_t take = static_cast<size_t>(
            std::llround(fraction * static_cast<double>(members.size())));
        for (size_t i = 0; i < members.size(); ++i)
            (i < take ? second : first).push_back(members[i]);
    }
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    return {first, second};
}

std::vector<Case> make_cases(const RawTable& table, const std::vector<int>& row_indices,
                             const DatasetSchema& schema, const Preprocessor& prep) {
    const auto labels = table_labels(table, schema);
    std::vector<Case> cases;
    cases.reserve(row_indices.size());
    for (int r : row_indices) {
        Case c;
        c.x = prep.transform(table.rows[r], table, schema);
        c.label = labels[r];
        c.source_id = r;
        cases.push_back(std::move(c));
    }
    return cases;
}

std::pair<DataSplits, Preprocessor> load_and_preprocess(const std::string& path,
                                                        const DatasetSchema& schema,
                                                        const SplitConfig& split,
                                                        std::uint64_t seed) {
    schema.validate();
    RawTable table = read_csv(path);
    const auto labels = table_labels(table, schema);

    std::vector<int> all(table.rows.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);

    std::vector<int> trainval_idx, test_idx;
    RawTable test_table;
    bool external_test = split.test_path.has_value();
    if (external_test) {
        trainval_idx = all;
        test_table = read_csv(*split.test_path);
        (void)table_labels(test_table, schema);  // validate early
    } else {
        std::vector<int> l_all;
        for (int i : all) l_all.push_back(labels[i]);
        std::tie(trainval_idx, test_idx) = stratified_split(l_all, split.test_fraction, seed);
    }

    std::vector<int> tv_labels;
    for (int i : trainval_idx) tv_labels.push_back(labels[i]);
    auto [train_rel, val_rel] = stratified_split(tv_labels, split.val_fraction, seed + 1);
    std::vector<int> train_idx, val_idx;
    for (int i : train_rel) train_idx.push_back(trainval_idx[i]);
    for (int i : val_rel) val_idx.push_back(trainval_idx[i]);

    if (train_idx.empty() || val_idx.empty() || (!external_test && test_idx.empty()))
        throw std::runtime_error("split produced an empty partition; dataset too small");

    Preprocessor prep;
    prep.fit(table, schema, train_idx);

    DataSplits splits;
    splits.train = make_cases(table, train_idx, schema, prep);
    splits.val = make_cases(table, val_idx, schema, prep);
    if (external_test) {
        std::vector<int> test_all(test_table.rows.size());
        for (size_t i = 0; i < test_all.size(); ++i) test_all[i] = static_cast<int>(i);
        splits.test = make_cases(test_table, test_all, schema, prep);
    } else {
        splits.test = make_cases(table, test_idx, schema, prep);
    }
    return {std::move(splits), std::move(prep)};
}

}  // namespace arguing
