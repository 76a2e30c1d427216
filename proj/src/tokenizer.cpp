#include "splinetok/tokenizer.hpp"

#include <cmath>
#include <string>

#include "splinetok/error.hpp"

namespace splinetok {

void TokenizerConfig::validate() const {
    if (chunk_length < 1) throw Error(ErrorCode::invalid_argument, "chunk_length must be >= 1");
    if (degree < 0 || degree >= basis_count) {
        throw Error(ErrorCode::degree_out_of_range,
                    "degree out of range: need 0 <= P < N, got N=" + std::to_string(basis_count) +
                        " P=" + std::to_string(degree));
    }
    if (basis_count > chunk_length) {
        throw Error(ErrorCode::invalid_argument,
                    "basis_count " + std::to_string(basis_count) + " exceeds chunk_length " +
                        std::to_string(chunk_length));
    }
    if (transition_mode == TransitionMode::clamped && basis_count < 2) {
        throw Error(ErrorCode::invalid_argument, "clamped transitions need basis_count >= 2");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorCode::invalid_argument, "lambda must be finite and >= 0");
    }
    scheme().validate();
}

Tokenizer::Tokenizer(TokenizerConfig config, NormalizationStats stats)
    : config_(config), stats_(std::move(stats)), scheme_(config.scheme()) {
    config_.validate();
    stats_.validate();
    solver_ = std::make_shared<const FitSolver>(
        cached_basis(config_.basis_count, config_.degree, make_grid(config_.chunk_length, config_.grid_rule)),
        config_.lambda);
}

std::shared_ptr<const FitSolver> Tokenizer::solver(int samples) const {
    if (samples == config_.chunk_length) return solver_;
    std::lock_guard lock(tail_mutex_);
    auto& slot = tail_solvers_[samples];
    if (!slot) {
        slot = std::make_shared<const FitSolver>(
            cached_basis(config_.basis_count, config_.degree, make_grid(samples, config_.grid_rule)),
            config_.lambda);
    }
    return slot;
}

int Tokenizer::check_rows(Eigen::Index rows) const {
    const int t = config_.chunk_length;
    if (rows == t) return t;
    if (rows < t && config_.tail_policy == TailPolicy::fit_truncated && rows >= config_.basis_count) {
        return static_cast<int>(rows);
    }
    throw Error(ErrorCode::dimension_mismatch,
                "shape mismatch: chunk has " + std::to_string(rows) + " rows, expected " + std::to_string(t));
}

ControlPointMatrix Tokenizer::control_points(const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const {
    if (raw_actions.cols() != dof()) {
        throw Error(ErrorCode::dof_mismatch,
                    "shape mismatch: chunk has " + std::to_string(raw_actions.cols()) + " dims, stats have " +
                        std::to_string(dof()));
    }
    const int rows = check_rows(raw_actions.rows());
    return fit(*solver(rows), normalize(stats_, raw_actions));
}

TokenSequence Tokenizer::tokens_from(const ControlPointMatrix& c, int samples) const {
    TokenSequence seq = flatten(quantize(scheme_, c.fitted_columns()), c.conditioned);
    seq.basis_count = config_.basis_count;
    seq.length = samples == config_.chunk_length ? 0 : samples;
    return seq;
}

TokenSequence Tokenizer::encode(const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const {
    const ControlPointMatrix c = control_points(raw_actions);
    return tokens_from(c, static_cast<int>(raw_actions.rows()));
}

DecodedChunk Tokenizer::decode_chunk(const StreamState& state, const TokenSequence& seq) const {
    if (seq.dof != dof()) {
        throw Error(ErrorCode::dof_mismatch,
                    "token sequence has dof " + std::to_string(seq.dof) + ", stats have " + std::to_string(dof()));
    }
    if (seq.basis_count != config_.basis_count) {
        throw Error(ErrorCode::layout_mismatch,
                    "token sequence has basis_count " + std::to_string(seq.basis_count) + ", config has " +
                        std::to_string(config_.basis_count));
    }
    if (seq.conditioned == state.empty()) {
        throw Error(ErrorCode::stream_state_mismatch,
                    seq.conditioned ? "conditioned chunk without a preceding chunk in the stream"
                                    : "unconditioned chunk passed with a stream state");
    }
    const int samples = seq.length == 0 ? config_.chunk_length : seq.length;
    if (samples < config_.basis_count || samples > config_.chunk_length) {
        throw Error(ErrorCode::layout_mismatch, "invalid chunk length " + std::to_string(samples));
    }
    const Eigen::MatrixXd fitted = dequantize(scheme_, unflatten(seq));

    Eigen::MatrixXd c(dof(), config_.basis_count);
    if (seq.conditioned) {
        if (state.last_action->size() != dof()) {
            throw Error(ErrorCode::dof_mismatch, "stream state has the wrong number of dims");
        }
        c.col(0) = *state.last_action;
        c.rightCols(config_.basis_count - 1) = fitted;
    } else {
        c = fitted;
    }

    const auto& basis = solver(samples)->basis();
    const Eigen::MatrixXd normalized = eval_curves(basis, c);
    const std::vector<double> at_zero = eval_basis(basis.knot_vector(), 0.0);
    const Eigen::VectorXd start = c * Eigen::Map<const Eigen::VectorXd>(at_zero.data(), config_.basis_count);

    DecodedChunk out;
    out.samples = denormalize(stats_, normalized);
    out.start = denormalize(stats_, start.transpose()).transpose();
    out.last_normalized = normalized.row(normalized.rows() - 1).transpose();
    return out;
}

Eigen::MatrixXd Tokenizer::decode(const TokenSequence& seq) const {
    return decode_chunk(StreamState{}, seq).samples;
}

EncodedChunk Tokenizer::encode_chunk(const StreamState& state,
                                     const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const {
    if (raw_actions.cols() != dof()) {
        throw Error(ErrorCode::dof_mismatch,
                    "shape mismatch: chunk has " + std::to_string(raw_actions.cols()) + " dims, stats have " +
                        std::to_string(dof()));
    }
    if (!state.empty() && state.last_action->size() != dof()) {
        throw Error(ErrorCode::dof_mismatch, "stream state has the wrong number of dims");
    }
    const int rows = check_rows(raw_actions.rows());
    const Eigen::MatrixXd normalized = normalize(stats_, raw_actions);
    const auto& fit_solver = *solver(rows);

    EncodedChunk out;
    out.control_points =
        state.empty() ? fit(fit_solver, normalized) : fit_conditioned(fit_solver, normalized, *state.last_action);
    out.tokens = tokens_from(out.control_points, rows);
    if (config_.stream_anchor == StreamAnchor::decoded) {
        out.next.last_action = decode_chunk(state, out.tokens).last_normalized;
    } else {
        out.next.last_action = normalized.row(normalized.rows() - 1).transpose();
    }
    return out;
}

std::pair<TokenSequence, StreamState> Tokenizer::encode_stream(
    const StreamState& state, const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const {
    EncodedChunk chunk = encode_chunk(state, raw_actions);
    return {std::move(chunk.tokens), std::move(chunk.next)};
}

std::pair<Eigen::MatrixXd, StreamState> Tokenizer::decode_stream(const StreamState& state,
                                                                 const TokenSequence& seq) const {
    DecodedChunk chunk = decode_chunk(state, seq);
    return {std::move(chunk.samples), StreamState{std::move(chunk.last_normalized)}};
}

}  // namespace splinetok
