#pragma once

#include <memory>

#include <Eigen/Dense>

#include "splinetok/bspline.hpp"

namespace splinetok {

/// D x N control points, one row per degree of freedom.
///
/// In conditioned form the first column is the pinned c_0 (taken from the
/// previous chunk) and `conditioned` is set; only columns 1..N-1 were fitted.
struct ControlPointMatrix {
    Eigen::MatrixXd values;
    bool conditioned = false;

    [[nodiscard]] Eigen::Index dof() const noexcept { return values.rows(); }
    [[nodiscard]] Eigen::Index basis_count() const noexcept { return values.cols(); }
    /// Columns that carry fitted (tokenizable) values.
    [[nodiscard]] Eigen::MatrixXd fitted_columns() const {
        return conditioned ? Eigen::MatrixXd(values.rightCols(values.cols() - 1)) : values;
    }
};

/// Closed-form ridge solver (Phi^T Phi + lambda I)^{-1} Phi^T for a fixed basis.
///
/// Both the full solver and the conditioned one (columns 1..N-1 of Phi, used
/// when c_0 is pinned) are factored once at construction through a Cholesky
/// decomposition. Throws Error(rank_deficient) if the normal matrix is not
/// positive definite, Error(invalid_argument) for lambda < 0 or T < N.
class FitSolver {
public:
    FitSolver(std::shared_ptr<const BSplineBasis> basis, double lambda);

    [[nodiscard]] const BSplineBasis& basis() const noexcept { return *basis_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] const Eigen::MatrixXd& solver_matrix() const noexcept { return solver_; }
    /// Empty when N == 1 (nothing left to fit once c_0 is pinned).
    [[nodiscard]] const Eigen::MatrixXd& conditioned_solver_matrix() const noexcept {
        return conditioned_solver_;
    }

private:
    std::shared_ptr<const BSplineBasis> basis_;
    double lambda_;
    Eigen::MatrixXd solver_;
    Eigen::MatrixXd conditioned_solver_;
};

/// Fits every column of `actions` (T x D, normalized units) independently.
ControlPointMatrix fit(const FitSolver& solver, const Eigen::Ref<const Eigen::MatrixXd>& actions);

/// Fit with c_0 pinned to `prev_last_action` (length D) per dimension.
ControlPointMatrix fit_conditioned(const FitSolver& solver,
                                   const Eigen::Ref<const Eigen::MatrixXd>& actions,
                                   const Eigen::Ref<const Eigen::VectorXd>& prev_last_action);

/// Mean over T*D of the squared residual Phi C^T - actions.
double residual_mse(const FitSolver& solver, const Eigen::Ref<const Eigen::MatrixXd>& actions,
                    const ControlPointMatrix& c);

}  // namespace splinetok
