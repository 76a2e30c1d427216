#include "splinetok/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "splinetok/error.hpp"

namespace splinetok {

namespace {

// 53-bit uniform in [0, 1); independent of the standard library's distributions
// so datasets are identical across toolchains.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

}  // namespace

int SyntheticSpec::chunk_samples() const {
    const double t = duration_s * rate_hz;
    const double rounded = std::round(t);
    if (!(t > 0.0) || std::abs(t - rounded) > 1e-9 || rounded > 1e9) {
        throw Error(ErrorCode::invalid_argument, "duration_s * rate_hz must be a positive integer");
    }
    return static_cast<int>(rounded);
}

void SyntheticSpec::validate() const {
    if (count < 1) throw Error(ErrorCode::invalid_argument, "synthetic count must be >= 1");
    if (dof < 1) throw Error(ErrorCode::invalid_argument, "synthetic dof must be >= 1");
    if (chunks_per_trajectory < 1) throw Error(ErrorCode::invalid_argument, "chunks_per_trajectory must be >= 1");
    if (generator == SyntheticGenerator::cubic_spline && control_points < 1) {
        throw Error(ErrorCode::invalid_argument, "cubic generator needs at least one control point");
    }
    (void)chunk_samples();
}

std::vector<Eigen::MatrixXd> generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const int samples = spec.chunk_samples() * spec.chunks_per_trajectory;
    std::mt19937_64 rng(spec.seed);
    std::vector<Eigen::MatrixXd> dataset;
    dataset.reserve(static_cast<std::size_t>(spec.count));

    if (spec.generator == SyntheticGenerator::cubic_spline) {
        const int n = spec.control_points * spec.chunks_per_trajectory;
        const int degree = std::min(3, n - 1);
        const auto basis = cached_basis(n, degree, make_grid(samples, spec.grid_rule));
        for (int i = 0; i < spec.count; ++i) {
            Eigen::MatrixXd c(spec.dof, n);
            for (Eigen::Index d = 0; d < c.rows(); ++d) {
                for (Eigen::Index k = 0; k < c.cols(); ++k) c(d, k) = uniform(rng, -1.0, 1.0);
            }
            dataset.push_back(eval_curves(*basis, c));
        }
        return dataset;
    }

    constexpr int kTerms = 3;
    constexpr double kMaxFrequencyHz = 5.0;
    for (int i = 0; i < spec.count; ++i) {
        Eigen::MatrixXd traj(samples, spec.dof);
        for (int d = 0; d < spec.dof; ++d) {
            double amplitude[kTerms], frequency[kTerms], phase[kTerms];
            for (int k = 0; k < kTerms; ++k) {
                amplitude[k] = uniform(rng, 0.1, 1.0);
                frequency[k] = kMaxFrequencyHz * (1.0 - uniform01(rng));  // (0, 5]
                phase[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            }
            for (int t = 0; t < samples; ++t) {
                const double time = t / spec.rate_hz;
                double v = 0.0;
                for (int k = 0; k < kTerms; ++k) {
                    v += amplitude[k] * std::sin(2.0 * std::numbers::pi * frequency[k] * time + phase[k]);
                }
                traj(t, d) = v;
            }
            auto col = traj.col(d);
            const double lo = col.minCoeff();
            const double hi = col.maxCoeff();
            if (hi - lo > 0.0) {
                col = (2.0 * (col.array() - lo) / (hi - lo) - 1.0).matrix();
            } else {
                col.setZero();
            }
        }
        dataset.push_back(std::move(traj));
    }
    return dataset;
}

}  // namespace splinetok
