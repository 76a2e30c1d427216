#include "splinetok/fitting.hpp"

#include <cmath>
#include <string>

#include "splinetok/error.hpp"

namespace splinetok {

namespace {

Eigen::MatrixXd ridge_solver(const Eigen::Ref<const Eigen::MatrixXd>& phi, double lambda) {
    const Eigen::Index n = phi.cols();
    Eigen::MatrixXd normal = phi.transpose() * phi;
    normal.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(normal);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::rank_deficient,
                    "normal matrix is not positive definite (N=" + std::to_string(n) +
                        "); use lambda > 0 or more samples");
    }
    return llt.solve(phi.transpose());
}

void check_actions(const FitSolver& solver, const Eigen::Ref<const Eigen::MatrixXd>& actions) {
    if (actions.rows() != solver.basis().samples()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "action rows " + std::to_string(actions.rows()) + " != grid length " +
                        std::to_string(solver.basis().samples()));
    }
    if (actions.cols() < 1) throw Error(ErrorCode::dimension_mismatch, "actions need at least one dof");
    if (!actions.allFinite()) throw Error(ErrorCode::non_finite, "actions contain non-finite values");
}

}  // namespace

FitSolver::FitSolver(std::shared_ptr<const BSplineBasis> basis, double lambda)
    : basis_(std::move(basis)), lambda_(lambda) {
    if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
        throw Error(ErrorCode::invalid_argument, "lambda must be finite and >= 0");
    }
    const auto& phi = basis_->matrix();
    if (phi.rows() < phi.cols()) {
        throw Error(ErrorCode::invalid_argument,
                    "under-determined fit: " + std::to_string(phi.rows()) + " samples < " +
                        std::to_string(phi.cols()) + " basis functions");
    }
    solver_ = ridge_solver(phi, lambda_);
    if (phi.cols() > 1) conditioned_solver_ = ridge_solver(phi.rightCols(phi.cols() - 1), lambda_);
}

ControlPointMatrix fit(const FitSolver& solver, const Eigen::Ref<const Eigen::MatrixXd>& actions) {
    check_actions(solver, actions);
    return ControlPointMatrix{(solver.solver_matrix() * actions).transpose(), false};
}

ControlPointMatrix fit_conditioned(const FitSolver& solver,
                                   const Eigen::Ref<const Eigen::MatrixXd>& actions,
                                   const Eigen::Ref<const Eigen::VectorXd>& prev_last_action) {
    check_actions(solver, actions);
    const Eigen::Index n = solver.basis().basis_count();
    if (n < 2) throw Error(ErrorCode::invalid_argument, "conditioned fit needs at least two basis functions");
    if (prev_last_action.size() != actions.cols()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "previous action has " + std::to_string(prev_last_action.size()) + " dofs, actions have " +
                        std::to_string(actions.cols()));
    }
    if (!prev_last_action.allFinite()) throw Error(ErrorCode::non_finite, "previous action is not finite");

    const auto phi0 = solver.basis().matrix().col(0);
    // Residual after removing the pinned first basis contribution, one column per dof.
    const Eigen::MatrixXd residual = actions - phi0 * prev_last_action.transpose();

    ControlPointMatrix out;
    out.conditioned = true;
    out.values.resize(actions.cols(), n);
    out.values.col(0) = prev_last_action;
    out.values.rightCols(n - 1) = (solver.conditioned_solver_matrix() * residual).transpose();
    return out;
}

double residual_mse(const FitSolver& solver, const Eigen::Ref<const Eigen::MatrixXd>& actions,
                    const ControlPointMatrix& c) {
    const auto& phi = solver.basis().matrix();
    if (c.values.cols() != phi.cols() || actions.rows() != phi.rows() || c.values.rows() != actions.cols()) {
        throw Error(ErrorCode::dimension_mismatch, "residual_mse: inconsistent shapes");
    }
    const Eigen::MatrixXd diff = phi * c.values.transpose() - actions;
    return diff.squaredNorm() / static_cast<double>(diff.size());
}

}  // namespace splinetok
