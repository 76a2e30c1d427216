#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "splinetok/bspline.hpp"
#include "splinetok/error.hpp"
#include "test_support.hpp"

using namespace splinetok;

namespace {

// Direct Cox-de Boor table: all degree-q basis values for q = 0..P over the
// whole knot vector, following the piecewise-constant start and the
// two-term recursion with 0/0 := 0. Independent of the library's triangular
// evaluation. Level q holds knots.size() - 1 - q functions.
std::vector<std::vector<double>> cox_de_boor_table(std::span<const double> k, int degree, double u) {
    const int m = static_cast<int>(k.size()) - 1;
    std::vector<std::vector<double>> levels;
    std::vector<double> level0(static_cast<std::size_t>(m), 0.0);
    // Half-open intervals; u at the right end belongs to the last non-empty interval.
    int last_nonempty = -1;
    for (int n = 0; n < m; ++n) {
        if (k[n] < k[n + 1]) last_nonempty = n;
    }
    for (int n = 0; n < m; ++n) {
        if ((k[n] <= u && u < k[n + 1]) || (u == k[m] && n == last_nonempty)) level0[n] = 1.0;
    }
    levels.push_back(level0);
    for (int q = 1; q <= degree; ++q) {
        const auto& prev = levels.back();
        std::vector<double> cur(static_cast<std::size_t>(m - q), 0.0);
        for (int n = 0; n < m - q; ++n) {
            const double d1 = k[n + q] - k[n];
            const double d2 = k[n + q + 1] - k[n + 1];
            const double w1 = d1 == 0.0 ? 0.0 : (u - k[n]) / d1;
            const double w2 = d2 == 0.0 ? 0.0 : (u - k[n + 1]) / d2;
            cur[n] = w1 * prev[n] + (1.0 - w2) * prev[n + 1];
        }
        levels.push_back(std::move(cur));
    }
    return levels;
}

}  // namespace

TEST_CASE("clamped knot vectors") {
    SUBCASE("degree 0 is a uniform partition") {
        const auto kv = make_clamped_knots(5, 0);
        const std::vector<double> expected{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
        REQUIRE(kv.knots().size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) CHECK(kv.knots()[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    }
    SUBCASE("linear with no interior knots") {
        const auto kv = make_clamped_knots(2, 1);
        CHECK(std::vector<double>(kv.knots().begin(), kv.knots().end()) == std::vector<double>{0, 0, 1, 1});
    }
    SUBCASE("quadratic N=4") {
        const auto kv = make_clamped_knots(4, 2);
        CHECK(std::vector<double>(kv.knots().begin(), kv.knots().end()) ==
              std::vector<double>{0, 0, 0, 0.5, 1, 1, 1});
    }
    SUBCASE("invariants over a range of (N, P)") {
        for (int p = 0; p <= 5; ++p) {
            for (int n = p + 1; n <= 20; ++n) {
                const auto kv = make_clamped_knots(n, p);
                const auto k = kv.knots();
                REQUIRE(k.size() == static_cast<std::size_t>(n + p + 1));
                CHECK(k.front() == 0.0);
                CHECK(k.back() == 1.0);
                for (std::size_t i = 1; i < k.size(); ++i) CHECK(k[i] >= k[i - 1]);
                for (int i = 0; i <= p; ++i) {
                    CHECK(k[i] == 0.0);
                    CHECK(k[n + i] == 1.0);
                }
                const double step = 1.0 / (n - p);
                for (int j = 1; j < n - p; ++j) CHECK(k[p + j] == doctest::Approx(j * step).epsilon(1e-15));
            }
        }
    }
    SUBCASE("degree out of range") {
        CHECK_THROWS_AS(make_clamped_knots(5, 5), Error);
        CHECK_THROWS_AS(make_clamped_knots(3, -1), Error);
        try {
            make_clamped_knots(4, 7);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::degree_out_of_range);
        }
    }
}

TEST_CASE("eval_basis examples") {
    const auto lin = eval_basis(make_clamped_knots(2, 1), 0.5);
    CHECK(lin[0] == doctest::Approx(0.5));
    CHECK(lin[1] == doctest::Approx(0.5));

    CHECK(eval_basis(make_clamped_knots(5, 0), 0.3) == std::vector<double>{0, 1, 0, 0, 0});
    CHECK(eval_basis(make_clamped_knots(4, 2), 1.0) == std::vector<double>{0, 0, 0, 1});

    CHECK_THROWS_AS(eval_basis(make_clamped_knots(4, 2), 1.0000001), Error);
    CHECK_THROWS_AS(eval_basis(make_clamped_knots(4, 2), -1e-9), Error);
    CHECK_THROWS_AS(eval_basis(make_clamped_knots(4, 2), std::nan("")), Error);
}

TEST_CASE("eval_basis matches a reference spline library") {
    // Frozen from scipy.interpolate.BSpline on the same clamped uniform knots.
    struct Case {
        int n, p;
        double u;
        std::vector<double> expected;
    };
    const std::vector<Case> cases{
        {5, 3, 0.1, {0.5120000000000001, 0.43400000000000016, 0.05200000000000002, 0.0020000000000000005, 0.0}},
        {5, 3, 0.37, {0.017576, 0.4649420000000001, 0.416176, 0.101306, 0.0}},
        {5, 3, 0.5, {0.0, 0.25, 0.5, 0.25, 0.0}},
        {5, 3, 0.81, {0.0, 0.013717999999999989, 0.16172799999999993, 0.5862259999999999, 0.23832800000000012}},
        {5, 3, 1.0, {0.0, 0.0, 0.0, 0.0, 1.0}},
        {4, 2, 0.25, {0.25, 0.625, 0.125, 0.0}},
        {4, 2, 0.6, {0.0, 0.32000000000000006, 0.6399999999999999, 0.03999999999999998}},
        {7, 4, 0.05, {0.5220062500000001, 0.4201757812500001, 0.055722656250000016, 0.0020671875000000004,
                      2.812500000000001e-05, 0.0, 0.0}},
        {7, 4, 0.333, {9.999999999995595e-13, 0.12550075049812495, 0.514165748945625, 0.30499983411075005,
                       0.05533366644450001, 0.0, 0.0}},
        {7, 4, 0.9, {0.0, 0.0, 0.0004499999999999995, 0.015074999999999988, 0.1805624999999999, 0.5638124999999998,
                     0.24010000000000015}},
    };
    for (const auto& c : cases) {
        const auto got = eval_basis(make_clamped_knots(c.n, c.p), c.u);
        REQUIRE(got.size() == c.expected.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            INFO("N=" << c.n << " P=" << c.p << " u=" << c.u << " i=" << i);
            CHECK(std::abs(got[i] - c.expected[i]) < 1e-14);
        }
    }
}

TEST_CASE("recursion consistency against the direct Cox-de Boor table") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int p = 1; p <= 4; ++p) {
        for (int n = p + 1; n <= 12; ++n) {
            const auto kv = make_clamped_knots(n, p);
            for (int s = 0; s < 50; ++s) {
                const double u = s == 0 ? 0.0 : (s == 1 ? 1.0 : unit(rng));
                const auto table = cox_de_boor_table(kv.knots(), p, u);
                const auto got = eval_basis(kv, u);
                const auto& lower = table[p - 1];
                const auto k = kv.knots();
                for (int i = 0; i < n; ++i) {
                    // Degree P from the degree P-1 values of the same knot vector.
                    const double d1 = k[i + p] - k[i];
                    const double d2 = k[i + p + 1] - k[i + 1];
                    const double w1 = d1 == 0.0 ? 0.0 : (u - k[i]) / d1;
                    const double w2 = d2 == 0.0 ? 0.0 : (u - k[i + 1]) / d2;
                    const double from_lower = w1 * lower[i] + (1.0 - w2) * lower[i + 1];
                    CHECK(std::abs(got[i] - from_lower) < 1e-13);
                    CHECK(std::abs(got[i] - table[p][i]) < 1e-13);
                }
            }
        }
    }
}

TEST_CASE("basis matrix examples") {
    SUBCASE("degree 0 on interval midpoints is the identity") {
        const int n = 7;
        std::vector<double> grid;
        for (int i = 0; i < n; ++i) grid.push_back((i + 0.5) / n);
        const auto basis = build_basis_matrix(make_clamped_knots(n, 0), grid);
        CHECK(basis.matrix() == Eigen::MatrixXd::Identity(n, n));
    }
    SUBCASE("linear") {
        const auto basis = build_basis_matrix(make_clamped_knots(2, 1), {0.0, 0.5, 1.0});
        Eigen::MatrixXd expected(3, 2);
        expected << 1, 0, 0.5, 0.5, 0, 1;
        CHECK(basis.matrix().isApprox(expected));
    }
    SUBCASE("cubic rows sum to one") {
        const auto basis = build_basis_matrix(make_clamped_knots(5, 3), make_grid(100, GridRule::inclusive));
        CHECK((basis.matrix().rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(build_basis_matrix(make_clamped_knots(5, 3), {0.0, 1.5}), Error);
        CHECK_THROWS_AS(build_basis_matrix(make_clamped_knots(5, 3), {0.5, 0.2}), Error);
    }
}

TEST_CASE("partition of unity, non-negativity and local support") {
    const auto grid = make_grid(1000, GridRule::inclusive);
    for (int p = 0; p <= 4; ++p) {
        for (int n = p + 1; n <= 16; ++n) {
            const auto kv = make_clamped_knots(n, p);
            const auto basis = build_basis_matrix(kv, grid);
            const auto& phi = basis.matrix();
            CHECK((phi.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
            CHECK(phi.minCoeff() >= 0.0);
            CHECK(phi.maxCoeff() <= 1.0);
            CHECK(phi(0, 0) == 1.0);
            CHECK(phi(phi.rows() - 1, n - 1) == 1.0);
            const auto k = kv.knots();
            for (Eigen::Index t = 0; t < phi.rows(); ++t) {
                for (int j = 0; j < n; ++j) {
                    if (grid[t] < k[j] || grid[t] > k[j + p + 1]) CHECK(phi(t, j) == 0.0);
                }
            }
        }
    }
}

TEST_CASE("eval_curve") {
    std::mt19937_64 rng(3);
    SUBCASE("constant control points give a constant curve") {
        const auto basis = build_basis_matrix(make_clamped_knots(9, 3), make_grid(40, GridRule::t_over_T));
        const Eigen::VectorXd y = eval_curve(basis, Eigen::VectorXd::Constant(9, 0.7));
        CHECK((y.array() - 0.7).abs().maxCoeff() < 1e-15);
    }
    SUBCASE("degree 0 aligned grid reproduces the control points") {
        const int n = 12;
        const auto basis = build_basis_matrix(make_clamped_knots(n, 0), make_grid(n, GridRule::inclusive));
        const Eigen::VectorXd c = test::random_matrix(rng, n, 1);
        CHECK(eval_curve(basis, c) == c);
    }
    SUBCASE("linear interpolation") {
        const auto basis = build_basis_matrix(make_clamped_knots(2, 1), {0.0, 0.5, 1.0});
        const Eigen::VectorXd y = eval_curve(basis, Eigen::Vector2d(0.0, 1.0));
        CHECK(y(0) == 0.0);
        CHECK(y(1) == doctest::Approx(0.5));
        CHECK(y(2) == 1.0);
    }
    SUBCASE("clamped endpoints") {
        for (int trial = 0; trial < 100; ++trial) {
            const int p = test::random_int(rng, 0, 5);
            const int n = test::random_int(rng, p + 1, 20);
            const auto basis = build_basis_matrix(make_clamped_knots(n, p), {0.0, 1.0});
            const Eigen::VectorXd c = test::random_matrix(rng, n, 1, -5, 5);
            const Eigen::VectorXd y = eval_curve(basis, c);
            CHECK(std::abs(y(0) - c(0)) < 1e-12);
            CHECK(std::abs(y(1) - c(n - 1)) < 1e-12);
        }
    }
    SUBCASE("perturbing one control point changes the curve only on its support") {
        const int n = 10, p = 3;
        const auto kv = make_clamped_knots(n, p);
        const auto grid = make_grid(500, GridRule::inclusive);
        const auto basis = build_basis_matrix(kv, grid);
        const Eigen::VectorXd c = test::random_matrix(rng, n, 1);
        for (int j = 0; j < n; ++j) {
            Eigen::VectorXd bumped = c;
            bumped(j) += 0.25;
            const Eigen::VectorXd diff = eval_curve(basis, bumped) - eval_curve(basis, c);
            for (std::size_t t = 0; t < grid.size(); ++t) {
                if (grid[t] < kv.knots()[j] || grid[t] > kv.knots()[j + p + 1]) CHECK(diff(t) == 0.0);
            }
        }
    }
    SUBCASE("dimension mismatch") {
        const auto basis = build_basis_matrix(make_clamped_knots(4, 2), {0.0, 1.0});
        CHECK_THROWS_AS(eval_curve(basis, Eigen::VectorXd::Zero(5)), Error);
        CHECK_THROWS_AS(eval_curves(basis, Eigen::MatrixXd::Zero(2, 3)), Error);
    }
}

TEST_CASE("grid rules and the basis cache") {
    const auto t_over = make_grid(4, GridRule::t_over_T);
    CHECK(t_over == std::vector<double>{0.25, 0.5, 0.75, 1.0});
    const auto incl = make_grid(5, GridRule::inclusive);
    CHECK(incl == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK_THROWS_AS(make_grid(0, GridRule::inclusive), Error);

    const auto a = cached_basis(10, 3, make_grid(20, GridRule::t_over_T));
    const auto b = cached_basis(10, 3, make_grid(20, GridRule::t_over_T));
    const auto c = cached_basis(10, 3, make_grid(20, GridRule::inclusive));
    CHECK(a.get() == b.get());
    CHECK(a.get() != c.get());
    CHECK(a->matrix() == build_basis_matrix(make_clamped_knots(10, 3), make_grid(20, GridRule::t_over_T)).matrix());
}
