#include "arguing/model.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace arguing;
using testutil::max_grad_error;
using testutil::random_matrix;

namespace {

DeepArguingModel tiny_model(std::uint64_t seed = 3, double alpha = 10.0) {
    return make_model({4, 8, 8}, {8}, /*embedding_dim=*/6, alpha, seed);
}

}  // namespace

TEST_CASE("make_model shapes and validation") {
    DeepArguingModel m = tiny_model();
    CHECK(m.input_width() == 4);
    CHECK(m.base_spec.widths == std::vector<int>{8, 8, 1});
    CHECK(m.edge_spec.widths == std::vector<int>{8, 8, 6});
    CHECK(m.parameters().size() == 2 * (2 + 2 + 2));
    CHECK_THROWS_AS(make_model({4, 8}, {}, 0, 10.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_model({4, 8}, {}, 6, -1.0, 0), std::invalid_argument);
}

TEST_CASE("init_mlp biases start at zero, weights within the Kaiming bound") {
    std::mt19937_64 rng(5);
    MLPSpec spec{{16, 32, 4}};
    MLPParams p = init_mlp(spec, rng);
    REQUIRE(p.weights.size() == 2);
    for (const auto& b : p.biases) CHECK(b.value().isZero(0.0));
    CHECK(p.weights[0].value().cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 16.0));
    CHECK(p.weights[1].value().cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 32.0));
    // Not degenerate.
    CHECK(p.weights[0].value().cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("zeroed base head gives base score exactly 0.5") {
    DeepArguingModel m = tiny_model();
    for (auto& w : m.base_head.weights) w.mutable_value().setZero();
    std::mt19937_64 rng(6);
    Tensor x = Tensor::constant(random_matrix(5, 4, rng));
    Matrix s = base_score(m, x).value();
    REQUIRE(s.rows() == 5);
    REQUIRE(s.cols() == 1);
    for (long i = 0; i < 5; ++i) CHECK(s(i, 0) == 0.5);
}

TEST_CASE("base score saturates with a large final bias and stays in (0,1)") {
    DeepArguingModel m = tiny_model();
    std::mt19937_64 rng(7);
    Tensor x = Tensor::constant(random_matrix(8, 4, rng));
    Matrix s = base_score(m, x).value();
    CHECK((s.array() > 0.0).all());
    CHECK((s.array() < 1.0).all());

    m.base_head.biases.back().mutable_value()(0, 0) = 50.0;
    for (auto& w : m.base_head.weights) w.mutable_value().setZero();
    CHECK(base_score(m, x).value()(3, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("soft dominance hand example at high temperature") {
    Matrix ea(1, 2), eb(1, 2);
    ea << 1.0, 0.0;
    eb << 0.0, 0.0;
    const double w = soft_dominance(Tensor::constant(ea), Tensor::constant(eb), 1000.0).item();
    // One coordinate fully dominates, the other ties: (1 + 0) / 2.
    CHECK(w == doctest::Approx(0.5).epsilon(1e-9));
    const double rev =
        soft_dominance(Tensor::constant(eb), Tensor::constant(ea), 1000.0).item();
    CHECK(rev == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("exceptionality is zero on the diagonal and lives in [0,1)") {
    DeepArguingModel m = tiny_model();
    std::mt19937_64 rng(8);
    Tensor x = Tensor::constant(random_matrix(6, 4, rng));
    Matrix w = exceptionality(m, x, x).value();
    REQUIRE(w.rows() == 6);
    REQUIRE(w.cols() == 6);
    for (long i = 0; i < 6; ++i) CHECK(w(i, i) == 0.0);
    CHECK((w.array() >= 0.0).all());
    CHECK((w.array() < 1.0).all());
}

TEST_CASE("no pair is mutually exceptional") {
    DeepArguingModel m = tiny_model(11);
    std::mt19937_64 rng(9);
    Tensor xa = Tensor::constant(random_matrix(40, 4, rng, -2.0, 2.0));
    Tensor xb = Tensor::constant(random_matrix(25, 4, rng, -2.0, 2.0));
    Matrix fwd = exceptionality(m, xa, xb).value();
    Matrix bwd = exceptionality(m, xb, xa).value();
    for (long i = 0; i < fwd.rows(); ++i)
        for (long j = 0; j < fwd.cols(); ++j)
            CHECK(std::min(fwd(i, j), bwd(j, i)) < 1e-12);
}

TEST_CASE("irrelevance equals exceptionality minus one") {
    DeepArguingModel m = tiny_model(12);
    std::mt19937_64 rng(10);
    Tensor xn = Tensor::constant(random_matrix(3, 4, rng));
    Tensor xc = Tensor::constant(random_matrix(7, 4, rng));
    Matrix irr = irrelevance(m, xn, xc).value();
    Matrix exc = exceptionality(m, xn, xc).value();
    CHECK((irr - (exc.array() - 1.0).matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((irr.array() >= -1.0).all());
    CHECK((irr.array() <= 0.0).all());
}

TEST_CASE("gradients flow through both heads and the shared extractor") {
    DeepArguingModel m = tiny_model(13);
    std::mt19937_64 rng(11);
    Tensor xa = Tensor::constant(random_matrix(3, 4, rng));
    Tensor xb = Tensor::constant(random_matrix(4, 4, rng));
    std::vector<Tensor> leaves = m.parameters();
    auto forward = [&] {
        return add(sum(base_score(m, xa)), sum(exceptionality(m, xa, xb)));
    };
    CHECK(max_grad_error(leaves, forward) < 1e-4);
    // Every parameter actually receives a gradient.
    zero_grads(leaves);
    backward(forward());
    for (const auto& p : leaves) CHECK(p.has_grad());
}

TEST_CASE("serialization round-trip is bitwise and behavior-preserving") {
    DeepArguingModel m = tiny_model(14, 7.5);
    std::stringstream ss;
    save_model(ss, m);
    DeepArguingModel m2 = load_model(ss);

    CHECK(m2.alpha == m.alpha);
    CHECK(m2.embedding_dim == m.embedding_dim);
    auto pa = m.parameters(), pb = m2.parameters();
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i)
        CHECK((pa[i].value() - pb[i].value()).cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 rng(12);
    Tensor x = Tensor::constant(random_matrix(5, 4, rng));
    CHECK((base_score(m, x).value() - base_score(m2, x).value())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((edge_embeddings(m, x).value() - edge_embeddings(m2, x).value())
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("load_model rejects a corrupted header") {
    std::stringstream ss;
    ss << "NOTMAGIC garbage";
    CHECK_THROWS_AS(load_model(ss), std::runtime_error);
}
