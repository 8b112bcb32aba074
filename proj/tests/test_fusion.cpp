#include <doctest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "semhier/diagnostics.hpp"
#include "semhier/error.hpp"
#include "semhier/fusion.hpp"

using namespace semhier;

namespace {

SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    SymMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i; j < rows.size(); ++j) m.set(i, j, rows[i][j]);
    }
    return m;
}

SymMatrix random_matrix(Rng& rng, std::size_t n, double scale) {
    SymMatrix m(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) m.set(i, j, scale * semhier::testing::uniform(rng));
    }
    return m;
}

}  // namespace

TEST_CASE("min-max of {2,4,6}") {
    const auto m = from_rows({{9, 2, 4}, {2, 9, 6}, {4, 6, 9}});
    const auto r = min_max_normalize(m);
    CHECK(r(0, 1) == 0.0);
    CHECK(r(0, 2) == 0.5);
    CHECK(r(1, 2) == 1.0);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r(i, i) == 1.0);
}

TEST_CASE("constant matrix maps off-diagonal to zero and warns") {
    const SymMatrix m(4, 0.7);
    WarningCapture cap;
    const auto r = min_max_normalize(m);
    CHECK(cap.messages().size() == 1);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) CHECK(r(i, j) == (i == j ? 1.0 : 0.0));
    }
    CHECK(min_max_scale(m).constant);
}

TEST_CASE("full-range input is unchanged") {
    Rng rng(3);
    auto m = random_matrix(rng, 6, 1.0);
    m.set(0, 1, 0.0);
    m.set(2, 3, 1.0);
    CHECK(min_max_normalize(m) == m);
}

TEST_CASE("NaN input is rejected") {
    auto m = from_rows({{1, 0.2, 0.3}, {0.2, 1, 0.4}, {0.3, 0.4, 1}});
    m.set(0, 2, std::numeric_limits<double>::quiet_NaN());
    CHECK_THROWS_AS(min_max_normalize(m), ValidationError);
}

TEST_CASE("scaling a raw channel leaves its normalization unchanged") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + rng.index(9);
        const auto m = random_matrix(rng, n, 3.0);
        const double k = 0.01 + 100 * semhier::testing::uniform(rng);
        SymMatrix scaled(n, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) scaled.set(i, j, k * m(i, j));
        }
        const auto a = min_max_normalize(m);
        const auto b = min_max_normalize(scaled);
        for (std::size_t i = 0; i < n * n; ++i) CHECK(std::abs(a.data()[i] - b.data()[i]) <= 1e-12);
    }
}

TEST_CASE("fuse examples") {
    const auto v = from_rows({{1, 0.5}, {0.5, 1}});
    const auto p = from_rows({{1, 1.0}, {1.0, 1}});
    const auto g = from_rows({{1, 0.0}, {0.0, 1}});
    SUBCASE("projection onto visual") {
        CHECK(fuse(v, p, g, Weights::make(1, 0, 0)) == v);
    }
    SUBCASE("default weights") {
        CHECK(std::abs(fuse(v, p, g, Weights{})(0, 1) - 0.5) < 1e-12);
    }
    SUBCASE("identical channels") {
        Rng rng(9);
        const auto m = random_matrix(rng, 5, 1.0);
        const auto f = fuse(m, m, m, Weights::make(0.2, 0.5, 0.3));
        for (std::size_t i = 0; i < 25; ++i) CHECK(std::abs(f.data()[i] - m.data()[i]) < 1e-15);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(fuse(v, SymMatrix(3), g, Weights{}), DimensionError);
    }
}

TEST_CASE("fuse is linear in each channel") {
    Rng rng(21);
    const auto a = random_matrix(rng, 4, 1.0);
    const auto b = random_matrix(rng, 4, 1.0);
    const auto c = random_matrix(rng, 4, 1.0);
    const auto w = Weights::make(0.5, 0.25, 0.25);
    const auto base = fuse(a, b, c, w);
    const auto zero = fuse(SymMatrix(4, 0.0), b, c, w);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(std::abs(base.data()[i] - zero.data()[i] - 0.5 * a.data()[i]) < 1e-12);
    }
}

TEST_CASE("weight validation") {
    CHECK_NOTHROW(Weights::make(0.4, 0.3, 0.3));
    CHECK_NOTHROW(Weights::make(1, 0, 0));
    CHECK_THROWS_AS(Weights::make(0.5, 0.5, 0.5), ValidationError);
    CHECK_THROWS_AS(Weights::make(-0.2, 0.6, 0.6), ValidationError);
    CHECK_THROWS_AS(Weights::make(0.4, 0.3, 0.3 + 1e-6), ValidationError);
}

TEST_CASE("compute_similarity on the six-leaf fixture") {
    const auto fx = semhier::testing::six_leaf_fixture();
    const auto sm = compute_similarity(fx.leaves, fx.image_count, fx.lexicon, SimilarityOptions{});
    const std::size_t n = sm.size();
    REQUIRE(n == 6);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(sm.fused(i, i) == 1.0);
        for (std::size_t j = 0; j < n; ++j) {
            CHECK(sm.fused(i, j) == sm.fused(j, i));
            CHECK(sm.fused(i, j) >= 0.0);
            CHECK(sm.fused(i, j) <= 1.0);
            for (std::size_t ch = 0; ch < kChannels; ++ch) {
                CHECK(sm.normalized[ch](i, j) == sm.normalized[ch](j, i));
                CHECK(sm.normalized[ch](i, j) >= 0.0);
                CHECK(sm.normalized[ch](i, j) <= 1.0);
            }
            const double want = 0.4 * sm.normalized[0](i, j) + 0.3 * sm.normalized[1](i, j) +
                                0.3 * sm.normalized[2](i, j);
            CHECK(std::abs(sm.fused(i, j) - want) < 1e-12);
        }
    }
    // within-group pairs beat cross-group pairs
    const auto dog = sm.index_of("dog");
    CHECK(sm.phi(dog, sm.index_of("wolf")) > sm.phi(dog, sm.index_of("car")));
    CHECK_THROWS_AS(sm.index_of("zebra"), UnknownConceptError);
}

TEST_CASE("visual projection preserves raw ordering") {
    const auto fx = semhier::testing::six_leaf_fixture();
    SimilarityOptions opt;
    opt.weights = Weights::make(1, 0, 0);
    const auto sm = compute_similarity(fx.leaves, fx.image_count, fx.lexicon, opt);
    CHECK(sm.fused == sm.normalized[static_cast<std::size_t>(Channel::visual)]);
    const auto& raw = sm.raw[static_cast<std::size_t>(Channel::visual)];
    for (std::size_t a = 0; a < 6; ++a) {
        for (std::size_t b = a + 1; b < 6; ++b) {
            for (std::size_t c = 0; c < 6; ++c) {
                for (std::size_t d = c + 1; d < 6; ++d) {
                    if (raw(a, b) < raw(c, d)) CHECK(sm.fused(a, b) < sm.fused(c, d));
                }
            }
        }
    }
}
