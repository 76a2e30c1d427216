#include "splinetok/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>
#include <string>

#include <json.hpp>

#include "splinetok/baselines.hpp"
#include "splinetok/error.hpp"
#include "splinetok/parallel.hpp"
#include "splinetok/serialization.hpp"

namespace splinetok {

SmoothnessProfile smoothness_profile(const Eigen::Ref<const Eigen::MatrixXd>& stream, int chunk_length,
                                     const std::vector<Eigen::VectorXd>* seam_values, const Eigen::MatrixXd* truth) {
    if (chunk_length < 1) throw Error(ErrorCode::invalid_argument, "chunk_length must be >= 1");
    if (truth && (truth->rows() != stream.rows() || truth->cols() != stream.cols())) {
        throw Error(ErrorCode::dimension_mismatch, "truth and stream shapes differ");
    }
    SmoothnessProfile out;
    const Eigen::Index rows = stream.rows();
    const Eigen::Index dof = stream.cols();
    if (rows >= 2) {
        out.mean_abs_step =
            (stream.bottomRows(rows - 1) - stream.topRows(rows - 1)).cwiseAbs().sum() / static_cast<double>((rows - 1) * dof);
    }

    // Mean within-chunk step per dim, the fallback expected step at a seam.
    Eigen::VectorXd within = Eigen::VectorXd::Zero(dof);
    long long within_count = 0;
    for (Eigen::Index t = 1; t < rows; ++t) {
        if (t % chunk_length == 0) continue;
        within += (stream.row(t) - stream.row(t - 1)).cwiseAbs().transpose();
        ++within_count;
    }
    if (within_count > 0) within /= static_cast<double>(within_count);

    const Eigen::Index seams = rows / chunk_length - (rows % chunk_length == 0 ? 1 : 0);
    if (seam_values && static_cast<Eigen::Index>(seam_values->size()) != std::max<Eigen::Index>(seams, 0)) {
        throw Error(ErrorCode::dimension_mismatch, "one seam value per chunk boundary required");
    }
    for (Eigen::Index k = 1; k <= seams; ++k) {
        const Eigen::Index b = k * chunk_length;
        double raw = 0.0;
        double relative = 0.0;
        for (Eigen::Index d = 0; d < dof; ++d) {
            double jump = 0.0;
            double expected = 0.0;
            if (seam_values) {
                jump = std::abs((*seam_values)[k - 1](d) - stream(b - 1, d));
            } else {
                jump = std::abs(stream(b, d) - stream(b - 1, d));
                expected = truth ? std::abs((*truth)(b, d) - (*truth)(b - 1, d)) : within(d);
            }
            raw = std::max(raw, jump);
            relative = std::max(relative, std::max(0.0, jump - expected));
        }
        out.jumps.push_back(raw);
        out.relative_jumps.push_back(relative);
        out.max_jump = std::max(out.max_jump, raw);
        out.max_relative_jump = std::max(out.max_relative_jump, relative);
    }
    return out;
}

std::string entry_name(const TokenizerConfig& config) {
    return "bspline_N" + std::to_string(config.basis_count) + "_P" + std::to_string(config.degree) + "_" +
           (config.transition_mode == TransitionMode::clamped ? "clamped" : "independent");
}

namespace {

struct TrajectoryResult {
    std::vector<double> mse;
    std::vector<double> max_jump;
    std::vector<double> max_relative_jump;
    std::vector<double> abs_step_sum;
    std::vector<long long> step_count;
    std::vector<long long> clipped;
    std::vector<long long> quantized;
    std::vector<long long> tokens;
    std::vector<Eigen::MatrixXd> decoded;
};

double mse_of(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).squaredNorm() / static_cast<double>(a.size());
}

}  // namespace

ComparisonReport compare_tokenizers(const std::vector<Eigen::MatrixXd>& dataset,
                                    const std::vector<TokenizerConfig>& configs, const CompareOptions& options,
                                    const std::optional<NormalizationStats>& stats_in) {
    if (dataset.empty()) throw Error(ErrorCode::empty_dataset, "compare: empty dataset");
    if (configs.empty()) throw Error(ErrorCode::invalid_argument, "compare: at least one tokenizer config required");
    const int chunk = configs.front().chunk_length;
    for (const auto& c : configs) {
        if (c.chunk_length != chunk) {
            throw Error(ErrorCode::invalid_argument, "compare: all configs must share chunk_length");
        }
    }
    const int dof = static_cast<int>(dataset.front().cols());
    for (const auto& traj : dataset) {
        if (traj.cols() != dof) throw Error(ErrorCode::inconsistent_dimension, "compare: inconsistent dof");
    }
    const NormalizationStats stats = stats_in ? *stats_in : NormalizationStats::identity(dof);
    if (stats.dof() != dof) throw Error(ErrorCode::dof_mismatch, "compare: stats dof differs from dataset");

    std::vector<std::unique_ptr<Tokenizer>> tokenizers;
    for (const auto& c : configs) tokenizers.push_back(std::make_unique<Tokenizer>(c, stats));
    const BinningTokenizer binning{{options.vocab_size, -1.0, 1.0}};
    binning.scheme.validate();

    const std::size_t entries = 2 + configs.size();
    std::vector<TrajectoryResult> results(dataset.size());

    parallel_for(dataset.size(), options.threads, [&](std::size_t i) {
        const Eigen::Index chunks = dataset[i].rows() / chunk;
        TrajectoryResult& r = results[i];
        r.mse.assign(entries, 0.0);
        r.max_jump.assign(entries, 0.0);
        r.max_relative_jump.assign(entries, 0.0);
        r.abs_step_sum.assign(entries, 0.0);
        r.step_count.assign(entries, 0);
        r.clipped.assign(entries, 0);
        r.quantized.assign(entries, 0);
        r.tokens.assign(entries, 0);
        if (chunks == 0) return;
        const Eigen::MatrixXd truth = dataset[i].topRows(chunks * chunk);
        const bool keep = static_cast<int>(i) < options.trace_trajectories;

        auto record = [&](std::size_t e, const Eigen::MatrixXd& decoded, const SmoothnessProfile& profile) {
            r.mse[e] = mse_of(decoded, truth);
            r.max_jump[e] = profile.max_jump;
            r.max_relative_jump[e] = profile.max_relative_jump;
            r.abs_step_sum[e] = profile.mean_abs_step * static_cast<double>((truth.rows() - 1) * dof);
            r.step_count[e] = (truth.rows() - 1) * dof;
            if (keep) r.decoded.push_back(decoded);
        };

        // Per-sample binning; the chunked variant packages the same tokens per chunk.
        {
            const Eigen::MatrixXd normalized = normalize(stats, truth);
            const std::vector<int> tokens = binning.tokenize(normalized);
            const Eigen::MatrixXd decoded =
                denormalize(stats, binning.detokenize(tokens, static_cast<int>(truth.rows()), dof));
            const SmoothnessProfile profile = smoothness_profile(decoded, chunk, nullptr, &truth);
            long long clipped = 0;
            for (Eigen::Index k = 0; k < normalized.size(); ++k) clipped += binning.scheme.clipped(normalized(k));
            for (std::size_t e = 0; e < 2; ++e) {
                record(e, decoded, profile);
                r.clipped[e] = clipped;
                r.quantized[e] = normalized.size();
                r.tokens[e] = static_cast<long long>(tokens.size());
            }
        }

        for (std::size_t c = 0; c < configs.size(); ++c) {
            const std::size_t e = 2 + c;
            const Tokenizer& tok = *tokenizers[c];
            const QuantizationScheme scheme = configs[c].scheme();
            const bool stream = configs[c].transition_mode == TransitionMode::clamped;
            Eigen::MatrixXd decoded(truth.rows(), dof);
            std::vector<Eigen::VectorXd> seams;
            StreamState enc_state;
            StreamState dec_state;
            for (Eigen::Index k = 0; k < chunks; ++k) {
                const EncodedChunk enc = tok.encode_chunk(enc_state, truth.middleRows(k * chunk, chunk));
                const DecodedChunk dec = tok.decode_chunk(dec_state, enc.tokens);
                if (stream) {
                    enc_state = enc.next;
                    dec_state.last_action = dec.last_normalized;
                }
                decoded.middleRows(k * chunk, chunk) = dec.samples;
                if (k > 0) seams.push_back(dec.start);
                const Eigen::MatrixXd fitted = enc.control_points.fitted_columns();
                for (Eigen::Index j = 0; j < fitted.size(); ++j) r.clipped[e] += scheme.clipped(fitted(j));
                r.quantized[e] += fitted.size();
                r.tokens[e] += static_cast<long long>(enc.tokens.tokens.size());
            }
            record(e, decoded, smoothness_profile(decoded, chunk, &seams, &truth));
        }
    });

    ComparisonReport report;
    report.chunk_length = chunk;
    report.dof = dof;
    for (const auto& traj : dataset) {
        if (traj.rows() >= chunk) ++report.trajectories;
        report.chunks_per_trajectory = std::max(report.chunks_per_trajectory, static_cast<int>(traj.rows() / chunk));
    }
    if (report.trajectories == 0) {
        throw Error(ErrorCode::invalid_argument, "compare: no trajectory holds a full chunk");
    }

    const double per_step_tokens = static_cast<double>(chunk) * dof;
    for (std::size_t e = 0; e < entries; ++e) {
        TokenizerEntry entry;
        if (e == 0) {
            entry.name = "binning";
            entry.kind = TokenizerKind::binning;
        } else if (e == 1) {
            entry.name = "binning_ac";
            entry.kind = TokenizerKind::binning_chunked;
        } else {
            const auto& cfg = configs[e - 2];
            entry.name = entry_name(cfg);
            entry.kind = TokenizerKind::bspline;
            entry.config = cfg;
        }
        if (e < 2) {
            entry.tokens_first_chunk = chunk * dof;
            entry.tokens_next_chunk = chunk * dof;
        } else {
            const auto& cfg = *entry.config;
            entry.tokens_first_chunk = cfg.basis_count * dof;
            entry.tokens_next_chunk =
                (cfg.transition_mode == TransitionMode::clamped ? cfg.basis_count - 1 : cfg.basis_count) * dof;
        }
        entry.compression_ratio = per_step_tokens / entry.tokens_first_chunk;

        double mse_sum = 0.0;
        double step_sum = 0.0;
        long long step_count = 0;
        long long clipped = 0;
        long long quantized = 0;
        int used = 0;
        for (const auto& r : results) {
            if (r.mse.empty() || r.step_count.empty()) continue;
            if (r.tokens[e] == 0) continue;
            ++used;
            mse_sum += r.mse[e];
            entry.max_boundary_jump = std::max(entry.max_boundary_jump, r.max_jump[e]);
            entry.max_boundary_jump_relative = std::max(entry.max_boundary_jump_relative, r.max_relative_jump[e]);
            step_sum += r.abs_step_sum[e];
            step_count += r.step_count[e];
            clipped += r.clipped[e];
            quantized += r.quantized[e];
            entry.tokens_total += r.tokens[e];
        }
        entry.mse_mean = mse_sum / used;
        double var = 0.0;
        for (const auto& r : results) {
            if (r.tokens.empty() || r.tokens[e] == 0) continue;
            var += (r.mse[e] - entry.mse_mean) * (r.mse[e] - entry.mse_mean);
        }
        entry.mse_std = std::sqrt(var / used);
        entry.mean_abs_step = step_count > 0 ? step_sum / static_cast<double>(step_count) : 0.0;
        entry.clip_fraction = quantized > 0 ? static_cast<double>(clipped) / static_cast<double>(quantized) : 0.0;
        report.entries.push_back(std::move(entry));
    }

    for (std::size_t i = 0; i < dataset.size() && static_cast<int>(i) < options.trace_trajectories; ++i) {
        if (results[i].decoded.empty()) continue;
        const Eigen::Index rows = (dataset[i].rows() / chunk) * chunk;
        report.trace_truth.push_back(dataset[i].topRows(rows));
        report.trace_decoded.push_back(results[i].decoded);
    }
    return report;
}

namespace {

const char* kind_name(TokenizerKind kind) {
    switch (kind) {
        case TokenizerKind::binning: return "binning";
        case TokenizerKind::binning_chunked: return "binning_ac";
        case TokenizerKind::bspline: return "bspline";
    }
    return "bspline";
}

// An exact zero is written as the integer 0 so a guaranteed-zero jump reads as such.
nlohmann::ordered_json metric(double value) {
    if (value == 0.0) return 0;
    return value;
}

}  // namespace

void write_report_json(std::ostream& out, const ComparisonReport& report) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["note"] =
        "tokenize -> detokenize round trip without a learned model; errors and jumps are in normalized units";
    j["dataset"] = {{"trajectories", report.trajectories},
                    {"chunk_length", report.chunk_length},
                    {"chunks_per_trajectory", report.chunks_per_trajectory},
                    {"dof", report.dof}};
    ordered_json list = ordered_json::array();
    for (const auto& e : report.entries) {
        ordered_json item;
        item["name"] = e.name;
        item["kind"] = kind_name(e.kind);
        if (e.config) item["config"] = ordered_json::parse(to_json(*e.config).dump());
        item["tokens_first_chunk"] = e.tokens_first_chunk;
        item["tokens_next_chunk"] = e.tokens_next_chunk;
        item["tokens_total"] = e.tokens_total;
        item["compression_ratio"] = e.compression_ratio;
        item["mse_mean"] = e.mse_mean;
        item["mse_std"] = e.mse_std;
        item["max_boundary_jump"] = metric(e.max_boundary_jump);
        item["max_boundary_jump_relative"] = metric(e.max_boundary_jump_relative);
        item["mean_abs_step"] = e.mean_abs_step;
        item["clip_fraction"] = metric(e.clip_fraction);
        list.push_back(std::move(item));
    }
    j["tokenizers"] = std::move(list);
    out << j.dump(2) << "\n";
}

void write_report_csv(std::ostream& out, const ComparisonReport& report) {
    out << "name,kind,tokens_first_chunk,tokens_next_chunk,tokens_total,compression_ratio,mse_mean,mse_std,"
           "max_boundary_jump,max_boundary_jump_relative,mean_abs_step,clip_fraction\n";
    for (const auto& e : report.entries) {
        out << e.name << ',' << kind_name(e.kind) << ',' << e.tokens_first_chunk << ',' << e.tokens_next_chunk << ','
            << e.tokens_total << ',' << format_shortest(e.compression_ratio) << ',' << format_shortest(e.mse_mean)
            << ',' << format_shortest(e.mse_std) << ',' << format_shortest(e.max_boundary_jump) << ','
            << format_shortest(e.max_boundary_jump_relative) << ',' << format_shortest(e.mean_abs_step) << ','
            << format_shortest(e.clip_fraction) << '\n';
    }
}

void write_traces_csv(std::ostream& out, const ComparisonReport& report) {
    out << "trajectory,t";
    for (int d = 0; d < report.dof; ++d) out << ",truth_d" << d;
    for (const auto& e : report.entries) {
        for (int d = 0; d < report.dof; ++d) out << ',' << e.name << "_d" << d;
    }
    out << '\n';
    for (std::size_t i = 0; i < report.trace_truth.size(); ++i) {
        const auto& truth = report.trace_truth[i];
        for (Eigen::Index t = 0; t < truth.rows(); ++t) {
            out << i << ',' << t;
            for (Eigen::Index d = 0; d < truth.cols(); ++d) out << ',' << format_shortest(truth(t, d));
            for (const auto& decoded : report.trace_decoded[i]) {
                for (Eigen::Index d = 0; d < decoded.cols(); ++d) out << ',' << format_shortest(decoded(t, d));
            }
            out << '\n';
        }
    }
}

}  // namespace splinetok
