/**
 * @file metrics.hpp
 * @brief Tokenizer comparison harness: reconstruction error, seam jumps,
 *        token budgets.
 *
 * Every tokenizer is run as a tokenize -> detokenize round trip without any
 * learned model in between, so the reported error is the floor each
 * tokenizer imposes on a policy that predicts its tokens perfectly.
 */

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splinetok/normalize.hpp"
#include "splinetok/tokenizer.hpp"

namespace splinetok {

struct SmoothnessProfile {
    double max_jump = 0.0;           ///< largest raw seam jump (max over dims)
    double max_relative_jump = 0.0;  ///< largest seam jump beyond the signal's own step
    std::vector<double> jumps;       ///< raw jump per seam
    std::vector<double> relative_jumps;
    double mean_abs_step = 0.0;      ///< mean |a[t+1] - a[t]| over all steps and dims
};

/// Seam jumps of a stream of consecutive `chunk_length` chunks.
///
/// When `seam_values` is given (one D-vector per seam: the decoded value of
/// the next chunk at u = 0, which is the instant of the previous chunk's
/// final sample), the jump is |seam - a[b-1]| and the expected step is zero.
/// Otherwise the jump is |a[b] - a[b-1]| and the expected step is taken from
/// `truth` when given, else from the stream's mean within-chunk step.
SmoothnessProfile smoothness_profile(const Eigen::Ref<const Eigen::MatrixXd>& stream, int chunk_length,
                                     const std::vector<Eigen::VectorXd>* seam_values = nullptr,
                                     const Eigen::MatrixXd* truth = nullptr);

enum class TokenizerKind { binning, binning_chunked, bspline };

struct TokenizerEntry {
    std::string name;
    TokenizerKind kind = TokenizerKind::bspline;
    std::optional<TokenizerConfig> config;  ///< set for bspline entries
    int tokens_first_chunk = 0;
    int tokens_next_chunk = 0;
    long long tokens_total = 0;
    double compression_ratio = 1.0;  ///< per-step binning tokens / these tokens, per chunk
    double mse_mean = 0.0;
    double mse_std = 0.0;
    double max_boundary_jump = 0.0;
    double max_boundary_jump_relative = 0.0;
    double mean_abs_step = 0.0;
    double clip_fraction = 0.0;
};

struct ComparisonReport {
    int trajectories = 0;
    int chunk_length = 0;
    int chunks_per_trajectory = 0;
    int dof = 0;
    std::vector<TokenizerEntry> entries;
    /// Per-sample traces of the first trajectories: truth then one decode per entry.
    std::vector<Eigen::MatrixXd> trace_truth;
    std::vector<std::vector<Eigen::MatrixXd>> trace_decoded;  ///< [trajectory][entry]
};

struct CompareOptions {
    int vocab_size = 256;  ///< for the binning baselines
    int threads = 1;
    int trace_trajectories = 1;
};

/// Runs the two binning baselines and every config in `configs` over the
/// dataset. Trajectories are cut into consecutive chunks of the shared chunk
/// length (tails dropped); clamped configs stream across those chunks.
/// `stats` defaults to the identity band (the dataset is already normalized).
/// Throws Error(invalid_argument) when configs disagree on chunk length or no
/// trajectory holds a full chunk.
ComparisonReport compare_tokenizers(const std::vector<Eigen::MatrixXd>& dataset,
                                    const std::vector<TokenizerConfig>& configs, const CompareOptions& options = {},
                                    const std::optional<NormalizationStats>& stats = std::nullopt);

std::string entry_name(const TokenizerConfig& config);

void write_report_json(std::ostream& out, const ComparisonReport& report);
void write_report_csv(std::ostream& out, const ComparisonReport& report);
void write_traces_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace splinetok
