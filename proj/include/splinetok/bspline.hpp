/**
 * @file bspline.hpp
 * @brief Clamped uniform B-spline knots, Cox-de Boor basis evaluation and
 *        precomputed basis matrices.
 *
 * The knot vector for N basis functions of degree P has N+P+1 knots on [0,1].
 * The first and last P+1 knots are repeated (clamped), interior knots are
 * uniform at j/(N-P). A curve y(u) = sum_n Phi_n(u) c_n therefore starts at
 * c_0 and ends at c_{N-1}.
 *
 * Interval convention: basis functions of degree 0 are indicators of the
 * half-open interval [k_n, k_{n+1}); u = 1 is assigned to the last
 * non-degenerate interval so that the clamped right endpoint is evaluated.
 */

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace splinetok {

class KnotVector {
public:
    /// Clamped uniform knots for `basis_count` functions of degree `degree`.
    /// Throws Error(degree_out_of_range) unless 0 <= degree < basis_count.
    static KnotVector clamped_uniform(int basis_count, int degree);

    [[nodiscard]] int degree() const noexcept { return degree_; }
    [[nodiscard]] int basis_count() const noexcept { return basis_count_; }
    [[nodiscard]] std::span<const double> knots() const noexcept { return knots_; }

    /// Index s of the knot span [k_s, k_{s+1}) holding u, with degree <= s < basis_count.
    [[nodiscard]] int find_span(double u) const;

    friend bool operator==(const KnotVector&, const KnotVector&) = default;

private:
    KnotVector(std::vector<double> knots, int degree, int basis_count)
        : knots_(std::move(knots)), degree_(degree), basis_count_(basis_count) {}

    std::vector<double> knots_;
    int degree_ = 0;
    int basis_count_ = 1;
};

inline KnotVector make_clamped_knots(int basis_count, int degree) {
    return KnotVector::clamped_uniform(basis_count, degree);
}

/// All N basis values at u in [0,1]. Throws Error(domain) outside [0,1].
std::vector<double> eval_basis(const KnotVector& kv, double u);

/// Precomputed T x N basis matrix over a parameter grid.
class BSplineBasis {
public:
    BSplineBasis(KnotVector kv, std::vector<double> grid);

    [[nodiscard]] const KnotVector& knot_vector() const noexcept { return kv_; }
    [[nodiscard]] std::span<const double> grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return phi_; }
    [[nodiscard]] int basis_count() const noexcept { return kv_.basis_count(); }
    [[nodiscard]] int degree() const noexcept { return kv_.degree(); }
    [[nodiscard]] Eigen::Index samples() const noexcept { return phi_.rows(); }

private:
    KnotVector kv_;
    std::vector<double> grid_;
    Eigen::MatrixXd phi_;
};

/// Builds the basis matrix for `grid` (values in [0,1], non-decreasing).
BSplineBasis build_basis_matrix(const KnotVector& kv, std::vector<double> grid);

/// Shared, cached basis for (N, P, grid). Safe to call concurrently.
std::shared_ptr<const BSplineBasis> cached_basis(int basis_count, int degree,
                                                 const std::vector<double>& grid);

/// Phi * c for a single control point vector of length N.
Eigen::VectorXd eval_curve(const BSplineBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& c);

/// Phi * C^T for a D x N control point matrix; returns T x D.
Eigen::MatrixXd eval_curves(const BSplineBasis& basis, const Eigen::Ref<const Eigen::MatrixXd>& c);

/// How chunk timesteps map onto the spline parameter.
enum class GridRule {
    t_over_T,   ///< u_t = t/T for t = 1..T (first sample after u = 0, last at u = 1)
    inclusive,  ///< u_t = (t-1)/(T-1) for t = 1..T (both endpoints sampled)
};

std::vector<double> make_grid(int samples, GridRule rule);

}  // namespace splinetok
