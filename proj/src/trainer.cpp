#include "arguing/trainer.hpp"

#include "arguing/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace arguing {

void TrainConfig::validate() const {
    if (lr <= 0.0 || weight_decay < 0.0) throw std::invalid_argument("config: bad optimizer rates");
    if (epochs < 1 || batch_size < 1) throw std::invalid_argument("config: bad epoch/batch counts");
    if (grad_max_norm <= 0.0) throw std::invalid_argument("config: grad_max_norm must be > 0");
    if (alpha <= 0.0 || lse_temperature <= 0.0)
        throw std::invalid_argument("config: temperatures must be > 0");
    if (clusters_per_class < 1) throw std::invalid_argument("config: clusters_per_class must be >= 1");
    if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
    if (embedding_dim < 1) throw std::invalid_argument("config: embedding_dim must be >= 1");
    if (extractor_hidden.empty()) throw std::invalid_argument("config: extractor needs layers");
}

namespace {

std::vector<Vector> lloyd_kmeans(const std::vector<Vector>& points, int k,
                                 std::mt19937_64& rng) {
    const int n = static_cast<int>(points.size());
    k = std::min(k, n);

    // k-means++ seeding.
    std::vector<Vector> centroids;
    std::uniform_int_distribution<int> first(0, n - 1);
    centroids.push_back(points[first(rng)]);
    std::vector<double> dist2(n, 0.0);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids)
                best = std::min(best, (points[i] - c).squaredNorm());
            dist2[i] = best;
            total += best;
        }
        int chosen = 0;
        if (total > 0.0) {
            std::uniform_real_distribution<double> u(0.0, total);
            double r = u(rng), acc = 0.0;
            for (int i = 0; i < n; ++i) {
                acc += dist2[i];
                if (acc >= r) { chosen = i; break; }
            }
        } else {
            chosen = first(rng);
        }
        centroids.push_back(points[chosen]);
    }

    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (points[i] - centroids[c]).squaredNorm();
                if (d < best) { best = d; assign[i] = c; }
            }
        }
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            Vector sum = Vector::Zero(points[0].size());
            int count = 0;
            for (int i = 0; i < n; ++i)
                if (assign[i] == c) { sum += points[i]; ++count; }
            if (count == 0) continue;  // empty cluster keeps its centroid
            sum /= static_cast<double>(count);
            shift = std::max(shift, (sum - centroids[c]).norm());
            centroids[c] = sum;
        }
        if (shift < 1e-6) break;
    }
    return centroids;
}

}  // namespace

std::vector<Case> kmeans_casebase(const std::vector<Case>& train_data, int k,
                                  std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("kmeans_casebase: k must be >= 1");
    int num_classes = 0;
    for (const auto& c : train_data) num_classes = std::max(num_classes, c.label + 1);

    std::mt19937_64 rng(seed);
    std::vector<Case> casebase;
    for (int cls = 0; cls < num_classes; ++cls) {
        std::vector<const Case*> members;
        std::vector<Vector> points;
        for (const auto& c : train_data)
            if (c.label == cls) { members.push_back(&c); points.push_back(c.x); }
        if (members.empty())
            throw std::invalid_argument("kmeans_casebase: class " + std::to_string(cls + 1) +
                                        " has no samples");

        auto centroids = lloyd_kmeans(points, k, rng);
        std::vector<bool> taken(members.size(), false);
        for (const auto& centroid : centroids) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < members.size(); ++i) {
                const double d = (points[i] - centroid).squaredNorm();
                if (d < best_d) { best_d = d; best = static_cast<int>(i); }
            }
            if (best >= 0 && !taken[best]) {  // dedup centroids mapping to one point
                taken[best] = true;
                casebase.push_back(*members[best]);
            }
        }
    }
    return casebase;
}

std::vector<double> class_weights(const std::vector<Case>& train_data, int num_classes) {
    std::vector<long> counts(num_classes, 0);
    for (const auto& c : train_data) {
        if (c.label < 0 || c.label >= num_classes)
            throw std::out_of_range("class_weights: label out of range");
        ++counts[c.label];
    }
    std::vector<double> weights(num_classes);
    const double total = static_cast<double>(train_data.size());
    for (int c = 0; c < num_classes; ++c) {
        if (counts[c] == 0)
            throw std::invalid_argument("class_weights: class " + std::to_string(c + 1) +
                                        " has no samples");
        weights[c] = std::sqrt(total / (num_classes * static_cast<double>(counts[c])));
    }
    return weights;
}

namespace {

Tensor mse_to(const Tensor& x, double target) {
    Tensor d = sub(x, Tensor::constant(Matrix::Constant(x.rows(), x.cols(), target)));
    return mean(hadamard(d, d));
}

}  // namespace

Tensor loss_delta(const DeepArguingModel& model, const Tensor& x_cb, const Tensor& x_delta) {
    Tensor forward = exceptionality(model, x_cb, x_delta);
    Tensor reverse = exceptionality(model, x_delta, x_cb);
    return add(mse_to(forward, 1.0), mse_to(reverse, 0.0));
}

Tensor loss_dag(const Tensor& a_cb) {
    if (a_cb.rows() != a_cb.cols())
        throw std::invalid_argument("loss_dag: matrix must be square");
    const double n = static_cast<double>(a_cb.rows());
    return sub(trace_expm(hadamard(a_cb, a_cb)), Tensor::scalar(n));
}

Tensor loss_sparsity(const Tensor& a, int casebase_size) {
    if (casebase_size < 1) throw std::invalid_argument("loss_sparsity: n must be >= 1");
    return scale(sum(eabs(a)), 1.0 / static_cast<double>(casebase_size));
}

LossBreakdown total_loss(const Tensor& logits, const std::vector<int>& labels,
                         const std::vector<double>& weights, const DeepArguingModel& model,
                         const QBAFBatch& qbaf, const FullCasebase& fcb,
                         const TrainConfig& config) {
    const int n = fcb.node_count();
    Tensor x_cb = Tensor::constant([&] {
        Matrix m(fcb.cases.size(), fcb.feature_width());
        for (size_t i = 0; i < fcb.cases.size(); ++i) m.row(i) = fcb.cases[i].x.transpose();
        return m;
    }());
    Tensor x_delta = Tensor::constant([&] {
        Matrix m(fcb.targets.size(), fcb.feature_width());
        for (size_t i = 0; i < fcb.targets.size(); ++i) m.row(i) = fcb.targets[i].x.transpose();
        return m;
    }());

    Tensor task = softmax_cross_entropy(logits, labels, weights);
    Tensor delta = loss_delta(model, x_cb, x_delta);
    Tensor dag = loss_dag(qbaf.a_cb);
    Tensor sp_cb = loss_sparsity(qbaf.a_cb, n);
    Tensor sp_new = loss_sparsity(qbaf.a_new, n);

    LossBreakdown out;
    out.task = task.item();
    out.delta = delta.item();
    out.dag = dag.item();
    out.sp_cb = sp_cb.item();
    out.sp_new = sp_new.item();
    out.total = add(task, add(scale(delta, config.lambda_delta),
                              add(scale(dag, config.lambda_dag),
                                  add(scale(sp_cb, config.lambda_sp),
                                      scale(sp_new, config.lambda_sp_prime)))));
    return out;
}

namespace {

Matrix rows_of(const std::vector<Case>& data, const std::vector<int>& idx, size_t begin,
               size_t end) {
    Matrix m(end - begin, data.front().x.size());
    for (size_t i = begin; i < end; ++i) m.row(i - begin) = data[idx[i]].x.transpose();
    return m;
}

/// Mean loss over a dataset without touching parameters.
double dataset_loss(const DeepArguingModel& model, const FullCasebase& fcb,
                    const std::vector<Case>& data, const std::vector<double>& weights,
                    const TrainConfig& config) {
    if (data.empty()) return 0.0;
    std::vector<int> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    double total = 0.0;
    size_t count = 0;
    for (size_t start = 0; start < data.size(); start += config.batch_size) {
        const size_t stop = std::min(data.size(), start + config.batch_size);
        Tensor x = Tensor::constant(rows_of(data, idx, start, stop));
        QBAFBatch qbaf = build_qbaf(model, fcb, x, config.lse_temperature);
        StrengthTrace trace = final_strengths(qbaf, config.iterations);
        Prediction pred = predict(trace, qbaf.target_indices);
        std::vector<int> labels;
        for (size_t i = start; i < stop; ++i) labels.push_back(data[idx[i]].label);
        LossBreakdown lb = total_loss(pred.logits, labels, weights, model, qbaf, fcb, config);
        total += lb.total.item() * static_cast<double>(stop - start);
        count += stop - start;
    }
    return total / static_cast<double>(count);
}

}  // namespace

std::pair<TrainedModel, TrainReport> train(const TrainConfig& config,
                                           const std::vector<Case>& train_data,
                                           const std::vector<Case>& val_data,
                                           int num_classes) {
    config.validate();
    if (train_data.empty()) throw std::invalid_argument("train: empty training split");

    TrainedModel result;
    result.config = config;
    result.casebase.cases = kmeans_casebase(train_data, config.clusters_per_class, config.seed);
    result.casebase.targets = make_targets(result.casebase.cases, num_classes);
    const FullCasebase& fcb = result.casebase;

    const int p = static_cast<int>(train_data.front().x.size());
    std::vector<int> extractor_widths = {p};
    extractor_widths.insert(extractor_widths.end(), config.extractor_hidden.begin(),
                            config.extractor_hidden.end());
    result.model = make_model(extractor_widths, config.head_hidden, config.embedding_dim,
                              config.alpha, config.seed);
    DeepArguingModel& model = result.model;

    const std::vector<double> weights = class_weights(train_data, num_classes);
    auto params = model.parameters();
    AdamW optimizer(params, config.lr, config.weight_decay);
    std::mt19937_64 shuffle_rng(config.seed + 1);

    TrainReport report;
    std::vector<int> idx(train_data.size());
    std::iota(idx.begin(), idx.end(), 0);

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(idx.begin(), idx.end(), shuffle_rng);
        EpochRecord rec;
        rec.epoch = epoch;
        size_t batches = 0;
        double epoch_loss = 0.0;
        std::vector<int> train_truth, train_pred;

        for (size_t start = 0; start < idx.size(); start += config.batch_size) {
            const size_t stop = std::min(idx.size(), start + config.batch_size);
            Tensor x = Tensor::constant(rows_of(train_data, idx, start, stop));
            std::vector<int> labels;
            for (size_t i = start; i < stop; ++i) labels.push_back(train_data[idx[i]].label);

            zero_grads(params);
            QBAFBatch qbaf = build_qbaf(model, fcb, x, config.lse_temperature);
            StrengthTrace trace = final_strengths(qbaf, config.iterations);
            Prediction pred = predict(trace, qbaf.target_indices);
            LossBreakdown lb = total_loss(pred.logits, labels, weights, model, qbaf, fcb, config);

            if (!std::isfinite(lb.total.item()))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + " (task=" +
                                         std::to_string(lb.task) + ", dag=" +
                                         std::to_string(lb.dag) + ")");

            backward(lb.total);
            clip_global_norm(params, config.grad_max_norm);
            optimizer.step();

            epoch_loss += lb.total.item();
            rec.loss_task += lb.task;
            rec.loss_delta += lb.delta;
            rec.loss_dag += lb.dag;
            rec.loss_sp_cb += lb.sp_cb;
            rec.loss_sp_new += lb.sp_new;
            ++batches;
            for (size_t i = start; i < stop; ++i) train_truth.push_back(train_data[idx[i]].label);
            train_pred.insert(train_pred.end(), pred.labels.begin(), pred.labels.end());
        }

        const double nb = static_cast<double>(batches);
        rec.train_loss = epoch_loss / nb;
        rec.loss_task /= nb;
        rec.loss_delta /= nb;
        rec.loss_dag /= nb;
        rec.loss_sp_cb /= nb;
        rec.loss_sp_new /= nb;
        rec.train_macro_f1 = compute_metrics(train_truth, train_pred, num_classes).macro_f1;
        if (!val_data.empty()) {
            rec.val_loss = dataset_loss(model, fcb, val_data, weights, config);
            rec.val_macro_f1 = evaluate(model, fcb, val_data, config.iterations,
                                        config.lse_temperature, config.batch_size)
                                   .macro_f1;
        }
        report.epochs.push_back(rec);
    }
    return {std::move(result), std::move(report)};
}

std::vector<int> predict_labels(const DeepArguingModel& model, const FullCasebase& fcb,
                                const Matrix& x, int iterations, double t) {
    QBAFBatch qbaf = build_qbaf(model, fcb, Tensor::constant(x), t);
    StrengthTrace trace = final_strengths(qbaf, iterations);
    return predict(trace, qbaf.target_indices).labels;
}

Metrics evaluate(const DeepArguingModel& model, const FullCasebase& fcb,
                 const std::vector<Case>& data, int iterations, double t, int batch_size) {
    std::vector<int> truth, predicted;
    for (size_t start = 0; start < data.size(); start += batch_size) {
        const size_t stop = std::min(data.size(), start + batch_size);
        Matrix x(stop - start, data.front().x.size());
        for (size_t i = start; i < stop; ++i) x.row(i - start) = data[i].x.transpose();
        auto labels = predict_labels(model, fcb, x, iterations, t);
        predicted.insert(predicted.end(), labels.begin(), labels.end());
        for (size_t i = start; i < stop; ++i) truth.push_back(data[i].label);
    }
    return compute_metrics(truth, predicted, fcb.num_classes());
}

Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& predicted,
                        int num_classes) {
    if (truth.size() != predicted.size())
        throw std::invalid_argument("compute_metrics: size mismatch");
    Metrics m;
    m.confusion.assign(num_classes, std::vector<long>(num_classes, 0));
    long correct = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        ++m.confusion[truth[i]][predicted[i]];
        if (truth[i] == predicted[i]) ++correct;
    }
    m.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / truth.size();

    for (int c = 0; c < num_classes; ++c) {
        long tp = m.confusion[c][c], fp = 0, fn = 0;
        for (int o = 0; o < num_classes; ++o) {
            if (o == c) continue;
            fp += m.confusion[o][c];
            fn += m.confusion[c][o];
        }
        // Absent or never-predicted classes score 0.
        const double prec = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        const double rec = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        const double f1 = (prec + rec) > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        m.precision.push_back(prec);
        m.recall.push_back(rec);
        m.f1.push_back(f1);
        m.macro_f1 += f1;
    }
    m.macro_f1 /= static_cast<double>(num_classes);
    return m;
}

}  // namespace arguing
