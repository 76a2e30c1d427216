#include "splinetok/quantize.hpp"

#include <cmath>
#include <string>

#include "splinetok/error.hpp"

namespace splinetok {

void QuantizationScheme::validate() const {
    if (vocab_size < 2) throw Error(ErrorCode::invalid_argument, "vocab_size must be >= 2");
    if (!(range_low < range_high) || !std::isfinite(range_low) || !std::isfinite(range_high)) {
        throw Error(ErrorCode::invalid_argument, "quant_range must satisfy low < high");
    }
}

int QuantizationScheme::index(double x) const noexcept {
    const double scaled = std::floor((x - range_low) / (range_high - range_low) * vocab_size);
    if (!(scaled >= 0.0)) return 0;  // also catches NaN
    if (scaled >= vocab_size - 1) return vocab_size - 1;
    return static_cast<int>(scaled);
}

double QuantizationScheme::center(int index) const {
    if (index < 0 || index >= vocab_size) {
        throw Error(ErrorCode::out_of_vocabulary,
                    "token " + std::to_string(index) + " outside vocabulary [0, " + std::to_string(vocab_size - 1) +
                        "]");
    }
    return range_low + (index + 0.5) * (range_high - range_low) / vocab_size;
}

IndexMatrix quantize(const QuantizationScheme& scheme, const Eigen::Ref<const Eigen::MatrixXd>& values) {
    return values.unaryExpr([&scheme](double x) { return scheme.index(x); });
}

Eigen::MatrixXd dequantize(const QuantizationScheme& scheme, const IndexMatrix& indices) {
    Eigen::MatrixXd out(indices.rows(), indices.cols());
    for (Eigen::Index j = 0; j < indices.cols(); ++j) {
        for (Eigen::Index i = 0; i < indices.rows(); ++i) out(i, j) = scheme.center(indices(i, j));
    }
    return out;
}

TokenSequence flatten(const IndexMatrix& indices, bool conditioned) {
    TokenSequence seq;
    seq.dof = static_cast<int>(indices.rows());
    seq.conditioned = conditioned;
    seq.basis_count = static_cast<int>(indices.cols()) + (conditioned ? 1 : 0);
    seq.tokens.reserve(static_cast<std::size_t>(indices.size()));
    for (Eigen::Index n = 0; n < indices.cols(); ++n) {
        for (Eigen::Index d = 0; d < indices.rows(); ++d) seq.tokens.push_back(indices(d, n));
    }
    return seq;
}

IndexMatrix unflatten(const TokenSequence& seq) {
    if (seq.dof < 1 || seq.columns() < 0 || seq.tokens.size() != seq.expected_size()) {
        throw Error(ErrorCode::layout_mismatch,
                    "token count " + std::to_string(seq.tokens.size()) + " does not match dof=" +
                        std::to_string(seq.dof) + " basis_count=" + std::to_string(seq.basis_count) +
                        (seq.conditioned ? " (conditioned)" : ""));
    }
    IndexMatrix out(seq.dof, seq.columns());
    std::size_t k = 0;
    for (Eigen::Index n = 0; n < out.cols(); ++n) {
        for (Eigen::Index d = 0; d < out.rows(); ++d) out(d, n) = seq.tokens[k++];
    }
    return out;
}

}  // namespace splinetok
