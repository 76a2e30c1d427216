#include "splinetok/bspline.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>

#include "splinetok/error.hpp"

namespace splinetok {

KnotVector KnotVector::clamped_uniform(int basis_count, int degree) {
    if (degree < 0 || degree >= basis_count) {
        throw Error(ErrorCode::degree_out_of_range,
                    "degree out of range: need 0 <= P < N, got N=" + std::to_string(basis_count) +
                        " P=" + std::to_string(degree));
    }
    const int intervals = basis_count - degree;
    std::vector<double> knots(static_cast<std::size_t>(basis_count + degree + 1));
    for (int i = 0; i <= degree; ++i) knots[i] = 0.0;
    for (int j = 1; j < intervals; ++j) {
        knots[degree + j] = static_cast<double>(j) / static_cast<double>(intervals);
    }
    for (int i = basis_count; i <= basis_count + degree; ++i) knots[i] = 1.0;
    return KnotVector(std::move(knots), degree, basis_count);
}

int KnotVector::find_span(double u) const {
    // Right end of the domain belongs to the last non-degenerate span.
    if (u >= knots_[basis_count_]) return basis_count_ - 1;
    const auto first = knots_.begin() + degree_;
    const auto last = knots_.begin() + basis_count_ + 1;
    const auto it = std::upper_bound(first, last, u);
    return static_cast<int>(it - knots_.begin()) - 1;
}

namespace {

// Nonzero basis values N_{span-P..span} at u (triangular Cox-de Boor table).
void nonzero_basis(const KnotVector& kv, int span, double u, std::span<double> out) {
    const int p = kv.degree();
    const auto k = kv.knots();
    std::vector<double> left(static_cast<std::size_t>(p + 1));
    std::vector<double> right(static_cast<std::size_t>(p + 1));
    out[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - k[span + 1 - j];
        right[j] = k[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom == 0.0 ? 0.0 : out[r] / denom;
            out[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        out[j] = saved;
    }
}

void check_domain(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        throw Error(ErrorCode::domain, "parameter outside [0,1]: u=" + std::to_string(u));
    }
}

}  // namespace

std::vector<double> eval_basis(const KnotVector& kv, double u) {
    check_domain(u);
    std::vector<double> values(static_cast<std::size_t>(kv.basis_count()), 0.0);
    std::vector<double> local(static_cast<std::size_t>(kv.degree() + 1));
    const int span = kv.find_span(u);
    nonzero_basis(kv, span, u, local);
    for (int j = 0; j <= kv.degree(); ++j) values[span - kv.degree() + j] = local[j];
    return values;
}

BSplineBasis::BSplineBasis(KnotVector kv, std::vector<double> grid)
    : kv_(std::move(kv)), grid_(std::move(grid)) {
    const auto rows = static_cast<Eigen::Index>(grid_.size());
    phi_ = Eigen::MatrixXd::Zero(rows, kv_.basis_count());
    std::vector<double> local(static_cast<std::size_t>(kv_.degree() + 1));
    for (Eigen::Index t = 0; t < rows; ++t) {
        const double u = grid_[t];
        check_domain(u);
        if (t > 0 && u < grid_[t - 1]) {
            throw Error(ErrorCode::invalid_argument, "basis grid must be non-decreasing");
        }
        const int span = kv_.find_span(u);
        nonzero_basis(kv_, span, u, local);
        for (int j = 0; j <= kv_.degree(); ++j) phi_(t, span - kv_.degree() + j) = local[j];
    }
}

BSplineBasis build_basis_matrix(const KnotVector& kv, std::vector<double> grid) {
    return BSplineBasis(kv, std::move(grid));
}

namespace {

struct BasisKey {
    int basis_count;
    int degree;
    std::vector<double> grid;
    bool operator==(const BasisKey&) const = default;
};

struct BasisKeyHash {
    std::size_t operator()(const BasisKey& key) const noexcept {
        std::size_t h = std::hash<int>{}(key.basis_count) * 31u + std::hash<int>{}(key.degree);
        for (double u : key.grid) {
            h ^= std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(u)) + 0x9e3779b97f4a7c15ull +
                 (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace

std::shared_ptr<const BSplineBasis> cached_basis(int basis_count, int degree,
                                                 const std::vector<double>& grid) {
    static std::mutex mutex;
    static std::unordered_map<BasisKey, std::shared_ptr<const BSplineBasis>, BasisKeyHash> cache;

    BasisKey key{basis_count, degree, grid};
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto basis = std::make_shared<const BSplineBasis>(KnotVector::clamped_uniform(basis_count, degree), grid);
    std::lock_guard lock(mutex);
    return cache.try_emplace(std::move(key), std::move(basis)).first->second;
}

Eigen::VectorXd eval_curve(const BSplineBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& c) {
    if (c.size() != basis.basis_count()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "control point count " + std::to_string(c.size()) + " != basis count " +
                        std::to_string(basis.basis_count()));
    }
    return basis.matrix() * c;
}

Eigen::MatrixXd eval_curves(const BSplineBasis& basis, const Eigen::Ref<const Eigen::MatrixXd>& c) {
    if (c.cols() != basis.basis_count()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "control point columns " + std::to_string(c.cols()) + " != basis count " +
                        std::to_string(basis.basis_count()));
    }
    return basis.matrix() * c.transpose();
}

std::vector<double> make_grid(int samples, GridRule rule) {
    if (samples < 1) throw Error(ErrorCode::invalid_argument, "grid needs at least one sample");
    std::vector<double> grid(static_cast<std::size_t>(samples));
    for (int i = 0; i < samples; ++i) {
        if (rule == GridRule::t_over_T) {
            grid[i] = static_cast<double>(i + 1) / samples;
        } else {
            grid[i] = samples == 1 ? 1.0 : static_cast<double>(i) / (samples - 1);
        }
    }
    return grid;
}

}  // namespace splinetok
