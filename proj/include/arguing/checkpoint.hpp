#pragma once

#include "arguing/data.hpp"
#include "arguing/trainer.hpp"

#include <string>

namespace arguing {

/// Everything prediction needs: the trained model, the frozen casebase and
/// targets, the fitted preprocessor, the schema and the semantics
/// hyperparameters. Binary little-endian, magic "DARGCKP1".
struct Checkpoint {
    DeepArguingModel model;
    FullCasebase casebase;
    Preprocessor preprocessor;
    DatasetSchema schema;
    int iterations = 5;
    double lse_temperature = 0.025;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace arguing
