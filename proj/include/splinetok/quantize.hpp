#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace splinetok {

using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Uniform scalar quantizer with V bins over [range_low, range_high].
///
/// Binning is floor-based; the right edge joins the top bin and anything
/// outside the band saturates to 0 or V-1. Decoding returns bin centers.
struct QuantizationScheme {
    int vocab_size = 256;
    double range_low = -1.0;
    double range_high = 1.0;

    /// Throws Error(invalid_argument) unless V >= 2 and range_low < range_high.
    void validate() const;
    [[nodiscard]] double bin_width() const noexcept { return (range_high - range_low) / vocab_size; }

    [[nodiscard]] int index(double x) const noexcept;
    /// Throws Error(out_of_vocabulary) for indices outside [0, V-1].
    [[nodiscard]] double center(int index) const;
    [[nodiscard]] bool clipped(double x) const noexcept { return x < range_low || x > range_high; }
};

IndexMatrix quantize(const QuantizationScheme& scheme, const Eigen::Ref<const Eigen::MatrixXd>& values);
Eigen::MatrixXd dequantize(const QuantizationScheme& scheme, const IndexMatrix& indices);

inline constexpr std::string_view kInterleavedLayout = "interleaved-by-basis";

/// Flattened discrete tokens of one chunk.
///
/// Layout is basis-major, dimension-minor: all D tokens of the first emitted
/// basis column, then the next column, and so on. A conditioned sequence
/// omits the pinned first column, so it holds D*(N-1) tokens.
struct TokenSequence {
    std::vector<int> tokens;
    int dof = 1;
    int basis_count = 1;  ///< N of the spline, independent of conditioning
    bool conditioned = false;
    /// Samples in the decoded chunk; 0 means the configured chunk length.
    int length = 0;

    [[nodiscard]] int columns() const noexcept { return conditioned ? basis_count - 1 : basis_count; }
    [[nodiscard]] std::size_t expected_size() const noexcept {
        return static_cast<std::size_t>(dof) * static_cast<std::size_t>(columns());
    }

    friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

/// D x K index matrix to a token sequence with `basis_count` = K (+1 if conditioned).
TokenSequence flatten(const IndexMatrix& indices, bool conditioned = false);

/// Inverse of flatten. Throws Error(layout_mismatch) if the token count
/// disagrees with the recorded dof/basis_count.
IndexMatrix unflatten(const TokenSequence& seq);

}  // namespace splinetok
