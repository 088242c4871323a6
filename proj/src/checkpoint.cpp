#include "arguing/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace arguing {

namespace {

constexpr char kMagic[8] = {'D', 'A', 'R', 'G', 'C', 'K', 'P', '1'};

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint: unexpected end of stream");
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const auto n = read_pod<std::uint32_t>(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw std::runtime_error("checkpoint: unexpected end of stream");
    return s;
}

void write_vector(std::ostream& out, const Vector& v) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(v.size()));
    for (long i = 0; i < v.size(); ++i) write_pod<double>(out, v[i]);
}

Vector read_vector(std::istream& in) {
    const auto n = read_pod<std::uint32_t>(in);
    Vector v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = read_pod<double>(in);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_pod<std::uint32_t>(out, 1);

    // schema
    write_string(out, ckpt.schema.label_column);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.schema.features.size()));
    for (const auto& f : ckpt.schema.features) {
        write_string(out, f.name);
        write_pod<std::uint8_t>(out, f.kind == ColumnSpec::Kind::Numeric ? 0 : 1);
    }
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.schema.label_vocab.size()));
    for (const auto& s : ckpt.schema.label_vocab) write_string(out, s);

    // preprocessor
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.preprocessor.numeric_stats.size()));
    for (const auto& st : ckpt.preprocessor.numeric_stats) {
        write_pod<double>(out, st.mean);
        write_pod<double>(out, st.stddev);
    }
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.preprocessor.categories.size()));
    for (const auto& cats : ckpt.preprocessor.categories) {
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(cats.size()));
        for (const auto& c : cats) write_string(out, c);
    }

    // casebase
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.casebase.cases.size()));
    for (const auto& c : ckpt.casebase.cases) {
        write_pod<std::int64_t>(out, c.source_id);
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(c.label));
        write_vector(out, c.x);
    }
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.casebase.targets.size()));
    for (const auto& t : ckpt.casebase.targets) {
        write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(t.label));
        write_vector(out, t.x);
    }

    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.iterations));
    write_pod<double>(out, ckpt.lse_temperature);

    save_model(out, ckpt.model);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
        throw std::runtime_error("checkpoint: bad magic header in " + path);
    if (read_pod<std::uint32_t>(in) != 1)
        throw std::runtime_error("checkpoint: unsupported version");

    Checkpoint ckpt;
    ckpt.schema.label_column = read_string(in);
    const auto nfeat = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nfeat; ++i) {
        ColumnSpec f;
        f.name = read_string(in);
        f.kind = read_pod<std::uint8_t>(in) == 0 ? ColumnSpec::Kind::Numeric
                                                 : ColumnSpec::Kind::Categorical;
        ckpt.schema.features.push_back(std::move(f));
    }
    const auto nvocab = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nvocab; ++i)
        ckpt.schema.label_vocab.push_back(read_string(in));

    const auto nnum = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < nnum; ++i) {
        Preprocessor::NumericStats st;
        st.mean = read_pod<double>(in);
        st.stddev = read_pod<double>(in);
        ckpt.preprocessor.numeric_stats.push_back(st);
    }
    const auto ncat = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < ncat; ++i) {
        const auto k = read_pod<std::uint32_t>(in);
        std::vector<std::string> cats;
        for (std::uint32_t c = 0; c < k; ++c) cats.push_back(read_string(in));
        ckpt.preprocessor.categories.push_back(std::move(cats));
    }
    ckpt.preprocessor.mark_fitted();

    const auto ncases = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < ncases; ++i) {
        Case c;
        c.source_id = read_pod<std::int64_t>(in);
        c.label = static_cast<int>(read_pod<std::uint32_t>(in));
        c.x = read_vector(in);
        ckpt.casebase.cases.push_back(std::move(c));
    }
    const auto ntargets = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < ntargets; ++i) {
        TargetArgument t;
        t.label = static_cast<int>(read_pod<std::uint32_t>(in));
        t.x = read_vector(in);
        ckpt.casebase.targets.push_back(std::move(t));
    }

    ckpt.iterations = static_cast<int>(read_pod<std::uint32_t>(in));
    ckpt.lse_temperature = read_pod<double>(in);
    ckpt.model = load_model(in);
    return ckpt;
}

}  // namespace arguing
