#pragma once

#include <vector>

#include <Eigen/Dense>

#include "splinetok/quantize.hpp"

namespace splinetok {

/// Per-sample uniform binning over [-1, 1]: one token per timestep and dim.
///
/// Tokens are laid out timestep-major, dimension-minor, using the same
/// floor/clamp/bin-center rules as the control point quantizer. The
/// chunked variant (binning with action chunking) emits the same tokens as
/// one sequence per chunk; only the packaging differs.
struct BinningTokenizer {
    QuantizationScheme scheme{};

    [[nodiscard]] std::vector<int> tokenize(const Eigen::Ref<const Eigen::MatrixXd>& normalized) const;
    /// Throws Error(layout_mismatch) if tokens.size() != samples * dof,
    /// Error(out_of_vocabulary) for bad tokens.
    [[nodiscard]] Eigen::MatrixXd detokenize(const std::vector<int>& tokens, int samples, int dof) const;
};

std::vector<int> binning_tokenize(const Eigen::Ref<const Eigen::MatrixXd>& normalized, int vocab_size);
Eigen::MatrixXd binning_detokenize(const std::vector<int>& tokens, int samples, int dof, int vocab_size);

}  // namespace splinetok
