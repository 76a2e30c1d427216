#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "splinetok/bspline.hpp"

namespace splinetok {

enum class SyntheticGenerator { cubic_spline, sum_of_sinusoids };

/// Seeded synthetic trajectory family.
///
/// Each trajectory covers `chunks_per_trajectory` consecutive windows of
/// T = duration_s * rate_hz samples. The cubic generator draws
/// `control_points * chunks_per_trajectory` control points uniformly in
/// [-1, 1] and samples one clamped cubic B-spline over the whole
/// trajectory; with a single window and control_points == N of a tokenizer
/// sharing the grid rule, every trajectory lies in that tokenizer's spline
/// space. The sinusoid generator sums three random (amplitude, frequency
/// <= 5 Hz, phase) terms and rescales each trajectory to [-1, 1].
struct SyntheticSpec {
    int count = 2000;
    double duration_s = 1.0;
    double rate_hz = 100.0;
    SyntheticGenerator generator = SyntheticGenerator::cubic_spline;
    int control_points = 3;
    int dof = 1;
    int chunks_per_trajectory = 1;
    GridRule grid_rule = GridRule::t_over_T;
    std::uint64_t seed = 0;

    /// Samples per window; throws Error(invalid_argument) unless a positive integer.
    [[nodiscard]] int chunk_samples() const;
    void validate() const;
};

std::vector<Eigen::MatrixXd> generate_synthetic(const SyntheticSpec& spec);

}  // namespace splinetok
