#include "splinetok/baselines.hpp"

#include <string>

#include "splinetok/error.hpp"

namespace splinetok {

std::vector<int> BinningTokenizer::tokenize(const Eigen::Ref<const Eigen::MatrixXd>& normalized) const {
    std::vector<int> tokens;
    tokens.reserve(static_cast<std::size_t>(normalized.size()));
    for (Eigen::Index t = 0; t < normalized.rows(); ++t) {
        for (Eigen::Index d = 0; d < normalized.cols(); ++d) tokens.push_back(scheme.index(normalized(t, d)));
    }
    return tokens;
}

Eigen::MatrixXd BinningTokenizer::detokenize(const std::vector<int>& tokens, int samples, int dof) const {
    if (samples < 0 || dof < 1 || tokens.size() != static_cast<std::size_t>(samples) * static_cast<std::size_t>(dof)) {
        throw Error(ErrorCode::layout_mismatch, "binning: " + std::to_string(tokens.size()) +
                                                    " tokens for " + std::to_string(samples) + "x" +
                                                    std::to_string(dof));
    }
    Eigen::MatrixXd out(samples, dof);
    std::size_t k = 0;
    for (int t = 0; t < samples; ++t) {
        for (int d = 0; d < dof; ++d) out(t, d) = scheme.center(tokens[k++]);
    }
    return out;
}

std::vector<int> binning_tokenize(const Eigen::Ref<const Eigen::MatrixXd>& normalized, int vocab_size) {
    BinningTokenizer tok{{vocab_size, -1.0, 1.0}};
    tok.scheme.validate();
    return tok.tokenize(normalized);
}

Eigen::MatrixXd binning_detokenize(const std::vector<int>& tokens, int samples, int dof, int vocab_size) {
    BinningTokenizer tok{{vocab_size, -1.0, 1.0}};
    tok.scheme.validate();
    return tok.detokenize(tokens, samples, dof);
}

}  // namespace splinetok
