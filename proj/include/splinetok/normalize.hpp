#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace splinetok {

/// Per-dimension quantile band mapping raw units onto [-1, 1].
struct NormalizationStats {
    std::vector<double> q_low;
    std::vector<double> q_high;
    double quantile_low = 0.01;
    double quantile_high = 0.99;

    [[nodiscard]] int dof() const noexcept { return static_cast<int>(q_low.size()); }
    /// q_high - q_low below this (raw units) marks a constant dimension.
    static constexpr double degenerate_width = 1e-12;
    [[nodiscard]] bool degenerate(int d) const { return q_high[d] - q_low[d] < degenerate_width; }

    /// Band [-1, 1] in every dimension, so raw and normalized units coincide.
    static NormalizationStats identity(int dof);
    /// Throws Error(invalid_argument) on non-finite bounds or q_low > q_high.
    void validate() const;

    friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

/// Quantile of `sorted` (ascending) by linear interpolation between order
/// statistics: position h = (n-1) q.
double linear_percentile(std::span<const double> sorted, double q);

/// Pools every value of each dimension across all trajectories (rows are
/// timesteps, columns dimensions) and records the 1st/99th percentiles.
NormalizationStats compute_stats(std::span<const Eigen::MatrixXd> dataset);

/// x' = 2 (x - q_low) / (q_high - q_low) - 1, no clipping. Degenerate dims map to 0.
Eigen::MatrixXd normalize(const NormalizationStats& stats, const Eigen::Ref<const Eigen::MatrixXd>& actions);

/// Inverse of normalize; degenerate dims map back to their constant.
Eigen::MatrixXd denormalize(const NormalizationStats& stats, const Eigen::Ref<const Eigen::MatrixXd>& normalized);

}  // namespace splinetok
