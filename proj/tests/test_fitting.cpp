#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "splinetok/bspline.hpp"
#include "splinetok/error.hpp"
#include "splinetok/fitting.hpp"
#include "test_support.hpp"

using namespace splinetok;

namespace {

FitSolver make_solver(int n, int p, int t, double lambda, GridRule rule = GridRule::t_over_T) {
    return FitSolver(cached_basis(n, p, make_grid(t, rule)), lambda);
}

// Ridge objective sum ||Phi c_d - a_d||^2 + lambda ||c_d||^2 over dimensions.
double objective(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& a, const Eigen::MatrixXd& c, double lambda) {
    return (phi * c.transpose() - a).squaredNorm() + lambda * c.squaredNorm();
}

}  // namespace

TEST_CASE("fit examples") {
    std::mt19937_64 rng(21);

    SUBCASE("degree 0 with N = T and lambda 0 reproduces the samples") {
        const int t = 16;
        const auto solver = make_solver(t, 0, t, 0.0, GridRule::inclusive);
        const Eigen::MatrixXd a = test::random_matrix(rng, t, 3);
        const auto c = fit(solver, a);
        CHECK((c.values - a.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        CHECK_FALSE(c.conditioned);
    }
    SUBCASE("constant actions give constant control points") {
        const auto solver = make_solver(10, 3, 20, 0.0);
        const auto c = fit(solver, Eigen::MatrixXd::Constant(20, 2, 0.7));
        CHECK((c.values.array() - 0.7).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("exact recovery T=100 N=8 P=3") {
        const auto solver = make_solver(8, 3, 100, 0.0);
        const Eigen::MatrixXd truth = test::random_matrix(rng, 4, 8);
        const Eigen::MatrixXd a = solver.basis().matrix() * truth.transpose();
        const auto c = fit(solver, a);
        CHECK((c.values - truth).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(residual_mse(solver, a, c) < 1e-12);
    }
    SUBCASE("zero input gives zero control points") {
        const auto solver = make_solver(10, 3, 20, 1e-6);
        CHECK(fit(solver, Eigen::MatrixXd::Zero(20, 7)).values.isZero(0.0));
    }
    SUBCASE("refitting the decoded curve is a fixed point") {
        const auto solver = make_solver(10, 3, 20, 0.0);
        const Eigen::MatrixXd a = test::random_matrix(rng, 20, 2);
        const auto c1 = fit(solver, a);
        const auto c2 = fit(solver, eval_curves(solver.basis(), c1.values));
        CHECK((c1.values - c2.values).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("solver matrix") {
    const auto solver = make_solver(10, 3, 20, 0.0);
    const Eigen::MatrixXd prod = solver.solver_matrix() * solver.basis().matrix();
    CHECK((prod - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(solver.conditioned_solver_matrix().rows() == 9);
    CHECK(solver.conditioned_solver_matrix().cols() == 20);

    const auto single = make_solver(1, 0, 5, 0.0);
    CHECK(single.conditioned_solver_matrix().size() == 0);
}

TEST_CASE("closed form zeroes the objective gradient") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int problem = 0; problem < 20; ++problem) {
        const int p = test::random_int(rng, 0, 4);
        const int n = test::random_int(rng, p + 1, 15);
        // Inclusive grid with T > N puts a sample in every knot interval.
        const int t = test::random_int(rng, n + 1, 60);
        const double lambda = problem % 2 == 0 ? 0.0 : 1e-3;
        const auto solver = make_solver(n, p, t, lambda, GridRule::inclusive);
        const Eigen::MatrixXd a = test::random_matrix(rng, t, 2);
        const auto c = fit(solver, a);
        const Eigen::MatrixXd& phi = solver.basis().matrix();
        for (int dir = 0; dir < 10; ++dir) {
            Eigen::MatrixXd v(2, n);
            for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = gauss(rng);
            v /= v.norm();
            const double h = 1e-4;
            const double g = (objective(phi, a, c.values + h * v, lambda) - objective(phi, a, c.values - h * v, lambda)) /
                             (2 * h);
            CHECK(std::abs(g) < 1e-6);
        }
    }
}

TEST_CASE("fit_conditioned") {
    std::mt19937_64 rng(8);

    SUBCASE("constant equal to the pinned value") {
        const auto solver = make_solver(10, 3, 20, 0.0);
        const auto c = fit_conditioned(solver, Eigen::MatrixXd::Constant(20, 1, 0.5), Eigen::VectorXd::Constant(1, 0.5));
        CHECK(c.conditioned);
        CHECK((c.values.array() - 0.5).abs().maxCoeff() < 1e-12);
        CHECK(c.fitted_columns().cols() == 9);
    }
    SUBCASE("decoded curve starts at the pinned value") {
        const auto solver = make_solver(10, 3, 20, 1e-6);
        const Eigen::MatrixXd a = test::random_matrix(rng, 20, 3);
        const Eigen::Vector3d prev(0.5, -0.25, 0.9);
        const auto c = fit_conditioned(solver, a, prev);
        const auto at0 = build_basis_matrix(make_clamped_knots(10, 3), {0.0});
        const Eigen::MatrixXd y0 = eval_curves(at0, c.values);
        CHECK((y0.row(0).transpose() - prev).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("conditioned exact recovery") {
        const auto solver = make_solver(8, 3, 100, 0.0);
        Eigen::MatrixXd truth = test::random_matrix(rng, 2, 8);
        const Eigen::MatrixXd a = solver.basis().matrix() * truth.transpose();
        const auto c = fit_conditioned(solver, a, truth.col(0));
        CHECK((c.values - truth).cwiseAbs().maxCoeff() < 1e-8);
    }
    SUBCASE("errors") {
        const auto solver = make_solver(10, 3, 20, 0.0);
        CHECK_THROWS_AS(fit_conditioned(solver, Eigen::MatrixXd::Zero(20, 2), Eigen::VectorXd::Zero(3)), Error);
        const auto single = make_solver(1, 0, 5, 0.0);
        CHECK_THROWS_AS(fit_conditioned(single, Eigen::MatrixXd::Zero(5, 1), Eigen::VectorXd::Zero(1)), Error);
    }
}

TEST_CASE("residual_mse") {
    SUBCASE("single basis function on two samples") {
        const auto solver = make_solver(1, 0, 2, 0.0, GridRule::inclusive);
        Eigen::MatrixXd a(2, 1);
        a << 0.0, 1.0;
        const auto c = fit(solver, a);
        CHECK(c.values(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(residual_mse(solver, a, c) == doctest::Approx(0.25).epsilon(1e-14));
    }
    SUBCASE("non-decreasing in lambda") {
        std::mt19937_64 rng(2);
        const Eigen::MatrixXd constant = Eigen::MatrixXd::Constant(20, 1, 0.8);
        const Eigen::MatrixXd noisy = test::random_matrix(rng, 20, 1);
        for (const auto* a : {&constant, &noisy}) {
            double prev = -1.0;
            for (double lambda : {0.0, 1e-6, 1e-3, 1e-1}) {
                const auto solver = make_solver(10, 3, 20, lambda);
                const double mse = residual_mse(solver, *a, fit(solver, *a));
                CHECK(mse >= 0.0);
                CHECK(mse >= prev - 1e-15);
                prev = mse;
            }
        }
    }
    SUBCASE("continuous in lambda at zero") {
        std::mt19937_64 rng(4);
        const Eigen::MatrixXd a = test::random_matrix(rng, 20, 2);
        const auto s0 = make_solver(10, 3, 20, 0.0);
        const auto s1 = make_solver(10, 3, 20, 1e-12);
        CHECK((fit(s0, a).values - fit(s1, a).values).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("fit errors") {
    CHECK_THROWS_AS(make_solver(10, 3, 20, -1.0), Error);
    try {
        make_solver(10, 3, 5, 0.0);
        FAIL("expected under-determined error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_argument);
    }
    // With u = t/T the first degree-0 interval holds no sample: singular normal matrix.
    try {
        make_solver(10, 0, 10, 0.0);
        FAIL("expected rank deficiency");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::rank_deficient);
    }
    // Ridge term restores definiteness.
    CHECK_NOTHROW(make_solver(10, 0, 10, 1e-6));

    const auto solver = make_solver(10, 3, 20, 0.0);
    CHECK_THROWS_AS(fit(solver, Eigen::MatrixXd::Zero(19, 2)), Error);
    CHECK_THROWS_AS(fit(solver, Eigen::MatrixXd::Zero(20, 0)), Error);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(20, 1);
    bad(3, 0) = std::nan("");
    try {
        (void)fit(solver, bad);
        FAIL("expected non-finite error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_finite);
    }
}
