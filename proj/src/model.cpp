#include "arguing/model.hpp"

#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace arguing {

void MLPSpec::validate() const {
    if (widths.size() < 2) throw std::invalid_argument("MLPSpec: need at least two widths");
    for (int w : widths)
        if (w <= 0) throw std::invalid_argument("MLPSpec: widths must be positive");
}

MLPParams init_mlp(const MLPSpec& spec, std::mt19937_64& rng) {
    spec.validate();
    MLPParams params;
    for (size_t l = 0; l + 1 < spec.widths.size(); ++l) {
        const int fan_in = spec.widths[l], fan_out = spec.widths[l + 1];
        // Kaiming-uniform with fan-in scaling; biases start at zero.
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(fan_in, fan_out);
        for (long i = 0; i < w.rows(); ++i)
            for (long j = 0; j < w.cols(); ++j) w(i, j) = dist(rng);
        params.weights.push_back(Tensor::param(std::move(w)));
        params.biases.push_back(Tensor::param(Matrix::Zero(1, fan_out)));
    }
    return params;
}

Tensor mlp_forward(const MLPParams& params, const Tensor& x) {
    Tensor h = x;
    for (size_t l = 0; l < params.weights.size(); ++l) {
        h = add(matmul(h, params.weights[l]),
                broadcast_rows(params.biases[l], h.rows()));
        if (l + 1 < params.weights.size()) h = relu(h);
    }
    return h;
}

std::vector<Tensor> DeepArguingModel::parameters() const {
    std::vector<Tensor> out;
    for (const auto* p : {&extractor, &base_head, &edge_head}) {
        out.insert(out.end(), p->weights.begin(), p->weights.end());
        out.insert(out.end(), p->biases.begin(), p->biases.end());
    }
    return out;
}

DeepArguingModel make_model(const std::vector<int>& extractor_widths,
                            const std::vector<int>& head_hidden_widths,
                            int embedding_dim, double alpha, std::uint64_t seed) {
    if (embedding_dim <= 0)
        throw std::invalid_argument("make_model: embedding_dim must be positive");
    if (alpha <= 0.0) throw std::invalid_argument("make_model: alpha must be positive");

    DeepArguingModel model;
    model.alpha = alpha;
    model.embedding_dim = embedding_dim;
    model.extractor_spec.widths = extractor_widths;

    const int h = extractor_widths.back();
    model.base_spec.widths = {h};
    model.base_spec.widths.insert(model.base_spec.widths.end(), head_hidden_widths.begin(),
                                  head_hidden_widths.end());
    model.base_spec.widths.push_back(1);
    model.edge_spec.widths = {h};
    model.edge_spec.widths.insert(model.edge_spec.widths.end(), head_hidden_widths.begin(),
                                  head_hidden_widths.end());
    model.edge_spec.widths.push_back(embedding_dim);

    std::mt19937_64 rng(seed);
    model.extractor = init_mlp(model.extractor_spec, rng);
    model.base_head = init_mlp(model.base_spec, rng);
    model.edge_head = init_mlp(model.edge_spec, rng);
    return model;
}

Tensor features(const DeepArguingModel& model, const Tensor& x) {
    if (x.cols() != model.extractor_spec.input_width())
        throw std::invalid_argument("features: input width mismatch");
    return mlp_forward(model.extractor, x);
}

Tensor base_score(const DeepArguingModel& model, const Tensor& x) {
    return sigmoid(mlp_forward(model.base_head, features(model, x)));
}

Tensor edge_embeddings(const DeepArguingModel& model, const Tensor& x) {
    return mlp_forward(model.edge_head, features(model, x));
}

Tensor exceptionality(const DeepArguingModel& model, const Tensor& xa, const Tensor& xb) {
    Tensor ea = edge_embeddings(model, xa);
    Tensor eb = edge_embeddings(model, xb);
    return relu(soft_dominance(ea, eb, model.alpha));
}

Tensor irrelevance(const DeepArguingModel& model, const Tensor& x_new, const Tensor& x_cb) {
    Tensor w = exceptionality(model, x_new, x_cb);
    return sub(w, Tensor::constant(Matrix::Ones(w.rows(), w.cols())));
}

// --- serialization ---------------------------------------------------------

namespace {

constexpr char kModelMagic[8] = {'D', 'A', 'M', 'O', 'D', 'E', 'L', '1'};

static_assert(sizeof(double) == 8);

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("model deserialization: unexpected end of stream");
    return v;
}

void write_spec(std::ostream& out, const MLPSpec& spec) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(spec.widths.size()));
    for (int w : spec.widths) write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(w));
}

MLPSpec read_spec(std::istream& in) {
    MLPSpec spec;
    const auto n = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < n; ++i)
        spec.widths.push_back(static_cast<int>(read_pod<std::uint32_t>(in)));
    spec.validate();
    return spec;
}

void write_tensor(std::ostream& out, const Tensor& t) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.rows()));
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.cols()));
    // Row-major on the wire.
    for (long i = 0; i < t.rows(); ++i)
        for (long j = 0; j < t.cols(); ++j) write_pod<double>(out, t.value()(i, j));
}

Tensor read_tensor(std::istream& in) {
    const auto rows = read_pod<std::uint32_t>(in);
    const auto cols = read_pod<std::uint32_t>(in);
    Matrix m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i)
        for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = read_pod<double>(in);
    return Tensor::param(std::move(m));
}

void write_mlp(std::ostream& out, const MLPParams& p) {
    for (size_t l = 0; l < p.weights.size(); ++l) {
        write_tensor(out, p.weights[l]);
        write_tensor(out, p.biases[l]);
    }
}

MLPParams read_mlp(std::istream& in, const MLPSpec& spec) {
    MLPParams p;
    for (size_t l = 0; l + 1 < spec.widths.size(); ++l) {
        p.weights.push_back(read_tensor(in));
        p.biases.push_back(read_tensor(in));
        if (p.weights.back().rows() != spec.widths[l] ||
            p.weights.back().cols() != spec.widths[l + 1])
            throw std::runtime_error("model deserialization: tensor shape mismatch");
    }
    return p;
}

}  // namespace

void save_model(std::ostream& out, const DeepArguingModel& model) {
    out.write(kModelMagic, sizeof(kModelMagic));
    write_pod<std::uint32_t>(out, 1);  // version
    write_pod<double>(out, model.alpha);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.embedding_dim));
    write_spec(out, model.extractor_spec);
    write_spec(out, model.base_spec);
    write_spec(out, model.edge_spec);
    write_mlp(out, model.extractor);
    write_mlp(out, model.base_head);
    write_mlp(out, model.edge_head);
}

DeepArguingModel load_model(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
        throw std::runtime_error("model deserialization: bad magic header");
    const auto version = read_pod<std::uint32_t>(in);
    if (version != 1) throw std::runtime_error("model deserialization: unsupported version");

    DeepArguingModel model;
    model.alpha = read_pod<double>(in);
    model.embedding_dim = static_cast<int>(read_pod<std::uint32_t>(in));
    model.extractor_spec = read_spec(in);
    model.base_spec = read_spec(in);
    model.edge_spec = read_spec(in);
    model.extractor = read_mlp(in, model.extractor_spec);
    model.base_head = read_mlp(in, model.base_spec);
    model.edge_head = read_mlp(in, model.edge_spec);
    if (model.base_spec.output_width() != 1 ||
        model.edge_spec.output_width() != model.embedding_dim)
        throw std::runtime_error("model deserialization: inconsistent head widths");
    return model;
}

}  // namespace arguing
