#include <doctest.h>

#include <cmath>
#include <random>

#include "splinetok/error.hpp"
#include "splinetok/quantize.hpp"
#include "test_support.hpp"

using namespace splinetok;

TEST_CASE("quantize examples") {
    const QuantizationScheme s;
    CHECK(s.index(-1.0) == 0);
    CHECK(s.index(1.0) == 255);
    CHECK(s.index(0.0) == 128);
    CHECK(s.index(-7.0) == 0);
    CHECK(s.index(7.0) == 255);
    CHECK(s.clipped(1.0001));
    CHECK_FALSE(s.clipped(1.0));

    CHECK(s.center(0) == -0.99609375);
    CHECK(s.center(255) == 0.99609375);
    CHECK(s.center(128) == 0.00390625);
    const QuantizationScheme two{2, -1.0, 1.0};
    CHECK(two.center(1) == 0.5);

    try {
        (void)s.center(256);
        FAIL("expected out of vocabulary");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::out_of_vocabulary);
    }
    CHECK_THROWS_AS((void)s.center(-1), Error);
    CHECK_THROWS_AS((QuantizationScheme{1, -1, 1}.validate()), Error);
    CHECK_THROWS_AS((QuantizationScheme{8, 1, 1}.validate()), Error);
}

TEST_CASE("quantize properties") {
    const QuantizationScheme s;
    std::mt19937_64 rng(13);
    const Eigen::MatrixXd x = test::random_matrix(rng, 7, 10);
    const IndexMatrix idx = quantize(s, x);
    const Eigen::MatrixXd back = dequantize(s, idx);
    CHECK((back - x).cwiseAbs().maxCoeff() <= 1.0 / 256 + 1e-15);
    CHECK(idx.minCoeff() >= 0);
    CHECK(idx.maxCoeff() <= 255);

    // Bin centers are fixed points.
    for (int i = 0; i < 256; ++i) CHECK(s.index(s.center(i)) == i);

    // Monotone in x.
    int prev = -1;
    for (int i = 0; i <= 10000; ++i) {
        const int k = s.index(-1.2 + 2.4 * i / 10000.0);
        CHECK(k >= prev);
        prev = k;
    }
}

TEST_CASE("flatten and unflatten") {
    IndexMatrix m(2, 3);
    m << 1, 2, 3, 4, 5, 6;
    const auto seq = flatten(m);
    CHECK(seq.tokens == std::vector<int>{1, 4, 2, 5, 3, 6});
    CHECK(seq.dof == 2);
    CHECK(seq.basis_count == 3);
    CHECK(unflatten(seq) == m);

    IndexMatrix row(1, 4);
    row << 9, 8, 7, 6;
    CHECK(flatten(row).tokens == std::vector<int>{9, 8, 7, 6});

    IndexMatrix col(3, 1);
    col << 5, 6, 7;
    CHECK(flatten(col).tokens == std::vector<int>{5, 6, 7});

    TokenSequence one;
    one.tokens = {42};
    IndexMatrix expected(1, 1);
    expected << 42;
    CHECK(unflatten(one) == expected);

    SUBCASE("conditioned sequences record the full basis count") {
        const auto c = flatten(m, true);
        CHECK(c.conditioned);
        CHECK(c.basis_count == 4);
        CHECK(c.expected_size() == 6);
        CHECK(unflatten(c) == m);
    }
    SUBCASE("random shapes round trip") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 200; ++trial) {
            IndexMatrix r(test::random_int(rng, 1, 9), test::random_int(rng, 1, 20));
            for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = test::random_int(rng, 0, 255);
            CHECK(unflatten(flatten(r, trial % 2 == 1)) == r);
        }
    }
    SUBCASE("layout mismatch") {
        TokenSequence bad = seq;
        bad.tokens.pop_back();
        try {
            (void)unflatten(bad);
            FAIL("expected layout mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::layout_mismatch);
        }
    }
}
