#pragma once

#include "arguing/qbaf.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace arguing {

struct ColumnSpec {
    enum class Kind { Numeric, Categorical };
    std::string name;
    Kind kind = Kind::Numeric;
};

struct DatasetSchema {
    std::vector<ColumnSpec> features;
    std::string label_column;
    std::vector<std::string> label_vocab;  // ordered; position defines the class index

    int num_classes() const { return static_cast<int>(label_vocab.size()); }
    void validate() const;
};

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;  // -1 if absent
};

/// Reads a comma-separated UTF-8 file with a required header row; quoted
/// fields (including embedded commas and doubled quotes) are supported.
RawTable read_csv(const std::string& path);

/// Z-scores numeric columns and one-hot encodes categoricals, fitted on the
/// training split only. Unseen categories at transform time map to an
/// all-zero block.
class Preprocessor {
public:
    void fit(const RawTable& table, const DatasetSchema& schema,
             const std::vector<int>& row_indices);
    Vector transform(const std::vector<std::string>& row, const RawTable& table,
                     const DatasetSchema& schema) const;
    bool fitted() const { return fitted_; }
    void mark_fitted() { fitted_ = true; }  // for checkpoint restore
    int width() const;

    // Exposed for serialization.
    struct NumericStats { double mean = 0.0, stddev = 1.0; };
    std::vector<NumericStats> numeric_stats;                  // per numeric column
    std::vector<std::vector<std::string>> categories;         // per categorical column

private:
    bool fitted_ = false;
};

struct SplitConfig {
    std::optional<std::string> test_path;  // external test file, if any
    double test_fraction = 0.2;            // carved out when no external file
    double val_fraction = 0.2;             // of the remaining training data
};

struct DataSplits {
    std::vector<Case> train, val, test;
};

/// Stratified, seeded split of the row indices; fractions refer to the
/// second returned part.
std::pair<std::vector<int>, std::vector<int>> stratified_split(
    const std::vector<int>& labels, double fraction, std::uint64_t seed);

std::pair<DataSplits, Preprocessor> load_and_preprocess(const std::string& path,
                                                        const DatasetSchema& schema,
                                                        const SplitConfig& split,
                                                        std::uint64_t seed);

/// Labels for every row of a table, validated against the schema vocabulary.
/// Errors carry 1-based data row numbers.
std::vector<int> table_labels(const RawTable& table, const DatasetSchema& schema);

std::vector<Case> make_cases(const RawTable& table, const std::vector<int>& row_indices,
                             const DatasetSchema& schema, const Preprocessor& prep);

/// Infers an ordered label vocabulary (sorted, first occurrence order is not
/// used) when the config does not pin one.
std::vector<std::string> discover_label_vocab(const RawTable& table,
                                              const std::string& label_column);

}  // namespace arguing
