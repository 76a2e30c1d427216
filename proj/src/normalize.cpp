#include "splinetok/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splinetok/error.hpp"

namespace splinetok {

NormalizationStats NormalizationStats::identity(int dof) {
    NormalizationStats s;
    s.q_low.assign(static_cast<std::size_t>(dof), -1.0);
    s.q_high.assign(static_cast<std::size_t>(dof), 1.0);
    return s;
}

void NormalizationStats::validate() const {
    if (q_low.empty() || q_low.size() != q_high.size()) {
        throw Error(ErrorCode::invalid_argument, "stats: q_low/q_high must be non-empty and equal length");
    }
    for (std::size_t d = 0; d < q_low.size(); ++d) {
        if (!std::isfinite(q_low[d]) || !std::isfinite(q_high[d]) || q_low[d] > q_high[d]) {
            throw Error(ErrorCode::invalid_argument, "stats: invalid band in dimension " + std::to_string(d));
        }
    }
}

double linear_percentile(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorCode::empty_dataset, "percentile of empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

NormalizationStats compute_stats(std::span<const Eigen::MatrixXd> dataset) {
    if (dataset.empty()) throw Error(ErrorCode::empty_dataset, "empty dataset");
    const Eigen::Index dof = dataset.front().cols();
    std::size_t rows = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (dataset[i].cols() != dof) {
            throw Error(ErrorCode::inconsistent_dimension,
                        "trajectory " + std::to_string(i) + " has " + std::to_string(dataset[i].cols()) +
                            " dims, expected " + std::to_string(dof));
        }
        if (!dataset[i].allFinite()) {
            throw Error(ErrorCode::non_finite, "trajectory " + std::to_string(i) + " has non-finite values");
        }
        rows += static_cast<std::size_t>(dataset[i].rows());
    }
    if (dof < 1 || rows == 0) throw Error(ErrorCode::empty_dataset, "empty dataset");
    if (rows < 2) throw Error(ErrorCode::empty_dataset, "need at least 2 samples per dimension");

    NormalizationStats stats;
    stats.q_low.resize(static_cast<std::size_t>(dof));
    stats.q_high.resize(static_cast<std::size_t>(dof));
    std::vector<double> pooled;
    pooled.reserve(rows);
    for (Eigen::Index d = 0; d < dof; ++d) {
        pooled.clear();
        for (const auto& traj : dataset) {
            for (Eigen::Index t = 0; t < traj.rows(); ++t) pooled.push_back(traj(t, d));
        }
        std::sort(pooled.begin(), pooled.end());
        stats.q_low[d] = linear_percentile(pooled, stats.quantile_low);
        stats.q_high[d] = linear_percentile(pooled, stats.quantile_high);
    }
    return stats;
}

namespace {

void check_dof(const NormalizationStats& stats, Eigen::Index cols) {
    if (cols != stats.dof()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "actions have " + std::to_string(cols) + " dims, stats have " + std::to_string(stats.dof()));
    }
}

}  // namespace

Eigen::MatrixXd normalize(const NormalizationStats& stats, const Eigen::Ref<const Eigen::MatrixXd>& actions) {
    check_dof(stats, actions.cols());
    Eigen::MatrixXd out(actions.rows(), actions.cols());
    for (Eigen::Index d = 0; d < actions.cols(); ++d) {
        if (stats.degenerate(static_cast<int>(d))) {
            out.col(d).setZero();
            continue;
        }
        const double lo = stats.q_low[d];
        const double width = stats.q_high[d] - lo;
        out.col(d) = 2.0 * (actions.col(d).array() - lo) / width - 1.0;
    }
    return out;
}

Eigen::MatrixXd denormalize(const NormalizationStats& stats, const Eigen::Ref<const Eigen::MatrixXd>& normalized) {
    check_dof(stats, normalized.cols());
    Eigen::MatrixXd out(normalized.rows(), normalized.cols());
    for (Eigen::Index d = 0; d < normalized.cols(); ++d) {
        const double lo = stats.q_low[d];
        if (stats.degenerate(static_cast<int>(d))) {
            out.col(d).setConstant(lo);
            continue;
        }
        const double width = stats.q_high[d] - lo;
        out.col(d) = (normalized.col(d).array() + 1.0) * 0.5 * width + lo;
    }
    return out;
}

}  // namespace splinetok
