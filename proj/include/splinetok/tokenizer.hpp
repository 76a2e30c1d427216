/**
 * @file tokenizer.hpp
 * @brief End-to-end chunk tokenizer: normalize, fit control points, quantize,
 *        flatten (and the reverse), plus chunk streaming with pinned starts.
 *
 * In streaming mode every chunk after the first pins its first control point
 * to the previous chunk's final decoded sample and emits only the remaining
 * N-1 columns. Since the spline is clamped, the decoded curve of the new
 * chunk starts exactly where the previous one ended.
 */

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "splinetok/bspline.hpp"
#include "splinetok/fitting.hpp"
#include "splinetok/normalize.hpp"
#include "splinetok/quantize.hpp"

namespace splinetok {

enum class TransitionMode { independent, clamped };

/// What to do with a chunk shorter than the configured length.
enum class TailPolicy {
    drop,           ///< skipped by the file-level chunker (with a warning)
    error,          ///< rejected
    fit_truncated,  ///< fitted on a rescaled grid of its own length (needs >= N samples)
};

/// Which sample seeds the stream state after a chunk is encoded.
enum class StreamAnchor {
    decoded,    ///< final sample of the decoded (quantized) chunk
    commanded,  ///< final sample of the normalized input chunk
};

struct TokenizerConfig {
    int chunk_length = 20;
    int basis_count = 10;
    int degree = 3;
    double lambda = 1e-6;
    int vocab_size = 256;
    double quant_low = -1.0;
    double quant_high = 1.0;
    GridRule grid_rule = GridRule::t_over_T;
    TransitionMode transition_mode = TransitionMode::independent;
    TailPolicy tail_policy = TailPolicy::drop;
    StreamAnchor stream_anchor = StreamAnchor::decoded;

    /// Throws Error(invalid_argument / degree_out_of_range) unless
    /// 0 <= P < N <= T, V >= 2, lambda >= 0 and low < high.
    void validate() const;
    [[nodiscard]] QuantizationScheme scheme() const { return {vocab_size, quant_low, quant_high}; }

    friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

/// Decoded final sample of the previous chunk, in normalized units.
struct StreamState {
    std::optional<Eigen::VectorXd> last_action;

    [[nodiscard]] bool empty() const noexcept { return !last_action.has_value(); }
};

/// A decoded chunk together with the curve value at u = 0.
///
/// Under the default grid rule u = 0 is the instant of the previous chunk's
/// final sample; comparing `start` with that sample measures the seam jump.
struct DecodedChunk {
    Eigen::MatrixXd samples;  ///< T x D, raw units
    Eigen::VectorXd start;    ///< D, raw units
    Eigen::VectorXd last_normalized;
};

/// Tokens of one chunk plus the continuous control points they quantize.
struct EncodedChunk {
    TokenSequence tokens;
    ControlPointMatrix control_points;  ///< normalized units, before quantization
    StreamState next;                   ///< state to pass with the following chunk
};

/// Immutable (config, stats, solver) bundle. All methods are const and
/// thread-safe; stream state is passed in and returned by value.
class Tokenizer {
public:
    Tokenizer(TokenizerConfig config, NormalizationStats stats);

    [[nodiscard]] const TokenizerConfig& config() const noexcept { return config_; }
    [[nodiscard]] const NormalizationStats& stats() const noexcept { return stats_; }
    [[nodiscard]] int dof() const noexcept { return stats_.dof(); }

    /// Solver for a chunk of `samples` rows (the configured length unless a truncated tail).
    [[nodiscard]] std::shared_ptr<const FitSolver> solver(int samples) const;

    /// Continuous control points for a raw chunk, before quantization.
    [[nodiscard]] ControlPointMatrix control_points(const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const;

    [[nodiscard]] TokenSequence encode(const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const;
    [[nodiscard]] Eigen::MatrixXd decode(const TokenSequence& seq) const;

    [[nodiscard]] std::pair<TokenSequence, StreamState> encode_stream(
        const StreamState& state, const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const;
    [[nodiscard]] std::pair<Eigen::MatrixXd, StreamState> decode_stream(const StreamState& state,
                                                                        const TokenSequence& seq) const;

    /// Unconditioned fit when `state` is empty, pinned first control point otherwise.
    [[nodiscard]] EncodedChunk encode_chunk(const StreamState& state,
                                            const Eigen::Ref<const Eigen::MatrixXd>& raw_actions) const;

    /// Decode with the u = 0 value exposed; `state` must be set iff seq is conditioned.
    [[nodiscard]] DecodedChunk decode_chunk(const StreamState& state, const TokenSequence& seq) const;

private:
    int check_rows(Eigen::Index rows) const;
    TokenSequence tokens_from(const ControlPointMatrix& c, int samples) const;

    TokenizerConfig config_;
    NormalizationStats stats_;
    QuantizationScheme scheme_;
    std::shared_ptr<const FitSolver> solver_;
    mutable std::mutex tail_mutex_;
    mutable std::map<int, std::shared_ptr<const FitSolver>> tail_solvers_;
};

}  // namespace splinetok
