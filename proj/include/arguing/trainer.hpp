#pragma once

#include "arguing/semantics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace arguing {

/// All training hyperparameters plus architecture and seed.
struct TrainConfig {
    double lr = 0.003;
    double weight_decay = 1e-4;
    int epochs = 32;
    int batch_size = 64;
    double grad_max_norm = 3.0;
    double lambda_delta = 1.0;
    double lambda_dag = 1e-4;
    double lambda_sp = 1e-4;
    double lambda_sp_prime = 1e-4;
    double alpha = 10.0;
    int clusters_per_class = 5;
    int iterations = 5;
    double lse_temperature = 0.025;
    int embedding_dim = 64;
    std::vector<int> extractor_hidden = {64, 64};  // widths after the input layer
    std::vector<int> head_hidden = {64};
    std::uint64_t seed = 0;

    void validate() const;
};

struct EpochRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double train_macro_f1 = 0.0;
    double val_macro_f1 = 0.0;
    // Mean per-batch loss-term breakdown.
    double loss_task = 0.0, loss_delta = 0.0, loss_dag = 0.0, loss_sp_cb = 0.0,
           loss_sp_new = 0.0;
};

struct Metrics {
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    std::vector<double> precision, recall, f1;  // per class
    std::vector<std::vector<long>> confusion;   // [true][pred]
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    Metrics test;
    bool has_test = false;
};

/// Per-class k-means (k-means++ seeding, Lloyd iterations), emitting the
/// actual data point nearest each centroid, deduplicated.
std::vector<Case> kmeans_casebase(const std::vector<Case>& train_data, int k,
                                  std::uint64_t seed);

/// w_c = sqrt(|D| / (C * n_c)).
std::vector<double> class_weights(const std::vector<Case>& train_data, int num_classes);

Tensor loss_delta(const DeepArguingModel& model, const Tensor& x_cb, const Tensor& x_delta);
Tensor loss_dag(const Tensor& a_cb);
Tensor loss_sparsity(const Tensor& a, int casebase_size);

struct LossBreakdown {
    Tensor total;
    double task = 0.0, delta = 0.0, dag = 0.0, sp_cb = 0.0, sp_new = 0.0;
};

LossBreakdown total_loss(const Tensor& logits, const std::vector<int>& labels,
                         const std::vector<double>& weights, const DeepArguingModel& model,
                         const QBAFBatch& qbaf, const FullCasebase& fcb,
                         const TrainConfig& config);

struct TrainedModel {
    DeepArguingModel model;
    FullCasebase casebase;
    TrainConfig config;
};

std::pair<TrainedModel, TrainReport> train(const TrainConfig& config,
                                           const std::vector<Case>& train_data,
                                           const std::vector<Case>& val_data,
                                           int num_classes);

Metrics evaluate(const DeepArguingModel& model, const FullCasebase& fcb,
                 const std::vector<Case>& data, int iterations, double t,
                 int batch_size = 256);

std::vector<int> predict_labels(const DeepArguingModel& model, const FullCasebase& fcb,
                                const Matrix& x, int iterations, double t);

Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted,
                        int num_classes);

}  // namespace arguing
