#include "splinetok/cli.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "splinetok/bspline.hpp"
#include "splinetok/io.hpp"
#include "splinetok/metrics.hpp"
#include "splinetok/parallel.hpp"
#include "splinetok/serialization.hpp"
#include "splinetok/synthetic.hpp"
#include "splinetok/tokenizer.hpp"

namespace splinetok::cli {

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::parse:
        case ErrorCode::inconsistent_dimension:
            return parse_error;
        case ErrorCode::empty_dataset:
            return empty_dataset;
        case ErrorCode::dimension_mismatch:
        case ErrorCode::layout_mismatch:
        case ErrorCode::stream_state_mismatch:
        case ErrorCode::degree_out_of_range:
        case ErrorCode::domain:
        case ErrorCode::rank_deficient:
        case ErrorCode::invalid_argument:
            return shape_mismatch;
        case ErrorCode::dof_mismatch:
            return dof_mismatch;
        case ErrorCode::out_of_vocabulary:
            return out_of_vocabulary;
        case ErrorCode::non_finite:
            return parse_error;
        case ErrorCode::io:
            return failure;
    }
    return failure;
}

namespace {

struct GlobalOptions {
    bool quiet = false;
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
    const GlobalOptions& global;

    void warn(const std::string& message) const {
        if (!global.quiet) err << "warning: " << message << '\n';
    }
    void info(const std::string& message) const {
        if (!global.quiet) out << message << '\n';
    }
};

// Config files with out-of-range values are malformed input, not shape errors.
TokenizerConfig load_config_checked(const std::string& path) {
    try {
        return load_config(path);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_argument || e.code() == ErrorCode::degree_out_of_range) {
            throw Error(ErrorCode::parse, path + ": " + e.what());
        }
        throw;
    }
}

NormalizationStats load_stats_checked(const std::string& path) {
    try {
        return load_stats(path);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::invalid_argument) throw Error(ErrorCode::parse, path + ": " + e.what());
        throw;
    }
}

std::vector<Trajectory> read_all(const std::vector<std::string>& inputs) {
    std::vector<Trajectory> all;
    for (const auto& path : inputs) {
        try {
            auto part = read_trajectories(path);
            for (auto& t : part) all.push_back(std::move(t));
        } catch (const Error& e) {
            throw Error(e.code(), path + ": " + e.what());
        }
    }
    for (std::size_t i = 1; i < all.size(); ++i) {
        if (all[i].actions.cols() != all.front().actions.cols()) {
            throw Error(ErrorCode::inconsistent_dimension,
                        "trajectory \"" + all[i].id + "\" has " + std::to_string(all[i].actions.cols()) +
                            " dims, expected " + std::to_string(all.front().actions.cols()));
        }
    }
    return all;
}

int cmd_fit_stats(const Streams& io, const std::vector<std::string>& inputs, const std::string& output) {
    const auto trajectories = read_all(inputs);
    if (trajectories.empty()) throw Error(ErrorCode::empty_dataset, "empty dataset: no trajectories in input");
    std::vector<Eigen::MatrixXd> data;
    data.reserve(trajectories.size());
    for (const auto& t : trajectories) data.push_back(t.actions);
    const NormalizationStats stats = compute_stats(data);
    save_stats(output, stats);
    for (int d = 0; d < stats.dof(); ++d) {
        io.info("dim_" + std::to_string(d) + ": q_low=" + format_shortest(stats.q_low[d]) +
                " q_high=" + format_shortest(stats.q_high[d]) + (stats.degenerate(d) ? " (constant)" : ""));
    }
    return ok;
}

int cmd_tokenize(const Streams& io, const std::string& config_path, const std::string& stats_path,
                 const std::vector<std::string>& inputs, const std::string& output, bool stream_flag) {
    const TokenizerConfig config = load_config_checked(config_path);
    const NormalizationStats stats = load_stats_checked(stats_path);
    const auto trajectories = read_all(inputs);
    const Tokenizer tokenizer(config, stats);
    const bool stream = stream_flag || config.transition_mode == TransitionMode::clamped;
    const int chunk = config.chunk_length;

    for (const auto& traj : trajectories) {
        if (traj.actions.cols() != stats.dof()) {
            throw Error(ErrorCode::dof_mismatch, "trajectory \"" + traj.id + "\" has " +
                                                     std::to_string(traj.actions.cols()) + " dims, stats have " +
                                                     std::to_string(stats.dof()));
        }
        const Eigen::Index tail = traj.actions.rows() % chunk;
        if (tail == 0) continue;
        if (config.tail_policy == TailPolicy::error) {
            throw Error(ErrorCode::dimension_mismatch, "trajectory \"" + traj.id + "\" leaves a tail of " +
                                                           std::to_string(tail) + " samples (chunk_length " +
                                                           std::to_string(chunk) + ")");
        }
        if (config.tail_policy == TailPolicy::fit_truncated && tail < config.basis_count) {
            throw Error(ErrorCode::dimension_mismatch, "trajectory \"" + traj.id + "\" tail of " +
                                                           std::to_string(tail) + " samples is shorter than basis_count");
        }
        if (config.tail_policy == TailPolicy::drop) {
            io.warn("trajectory \"" + traj.id + "\": dropping tail of " + std::to_string(tail) + " samples");
        }
    }

    std::vector<std::vector<TokenRecord>> per_trajectory(trajectories.size());
    parallel_for(trajectories.size(), io.global.threads, [&](std::size_t i) {
        const auto& traj = trajectories[i];
        const Eigen::Index rows = traj.actions.rows();
        std::vector<Eigen::Index> starts, lengths;
        for (Eigen::Index s = 0; s + chunk <= rows; s += chunk) {
            starts.push_back(s);
            lengths.push_back(chunk);
        }
        const Eigen::Index tail = rows % chunk;
        if (tail > 0 && config.tail_policy == TailPolicy::fit_truncated) {
            starts.push_back(rows - tail);
            lengths.push_back(tail);
        }
        StreamState state;
        for (std::size_t k = 0; k < starts.size(); ++k) {
            const auto block = traj.actions.middleRows(starts[k], lengths[k]);
            TokenRecord record{traj.id, static_cast<int>(k), {}};
            if (stream) {
                auto [seq, next] = tokenizer.encode_stream(state, block);
                record.sequence = std::move(seq);
                state = std::move(next);
            } else {
                record.sequence = tokenizer.encode(block);
            }
            per_trajectory[i].push_back(std::move(record));
        }
    });

    std::vector<TokenRecord> records;
    for (auto& part : per_trajectory) {
        for (auto& r : part) records.push_back(std::move(r));
    }
    write_token_file(output, records);
    io.info("wrote " + std::to_string(records.size()) + " chunks to " + output);
    return ok;
}

int cmd_detokenize(const Streams& io, const std::string& config_path, const std::string& stats_path,
                   const std::string& input, const std::string& output) {
    const TokenizerConfig config = load_config_checked(config_path);
    const NormalizationStats stats = load_stats_checked(stats_path);
    const Tokenizer tokenizer(config, stats);
    std::vector<TokenRecord> records;
    try {
        records = read_token_file(input);
    } catch (const Error& e) {
        throw Error(e.code(), input + ": " + e.what());
    }

    std::vector<Trajectory> trajectories;
    std::map<std::string, std::size_t> slot;
    std::map<std::string, std::pair<int, StreamState>> streams;  // id -> (last chunk index, state)
    for (std::size_t line = 0; line < records.size(); ++line) {
        const auto& r = records[line];
        const std::string where = "line " + std::to_string(line + 1) + ": ";
        auto [it, inserted] = slot.try_emplace(r.id, trajectories.size());
        if (inserted) trajectories.push_back(Trajectory{r.id, Eigen::MatrixXd(0, stats.dof())});

        StreamState state;
        if (r.sequence.conditioned) {
            const auto prev = streams.find(r.id);
            if (prev == streams.end() || prev->second.first != r.chunk_index - 1) {
                throw Error(ErrorCode::stream_state_mismatch,
                            where + "conditioned chunk " + std::to_string(r.chunk_index) + " of \"" + r.id +
                                "\" has no preceding chunk in stream order");
            }
            state = prev->second.second;
        }
        DecodedChunk decoded;
        try {
            decoded = tokenizer.decode_chunk(state, r.sequence);
        } catch (const Error& e) {
            throw Error(e.code(), where + e.what());
        }
        streams[r.id] = {r.chunk_index, StreamState{decoded.last_normalized}};

        auto& actions = trajectories[it->second].actions;
        const Eigen::Index old_rows = actions.rows();
        actions.conservativeResize(old_rows + decoded.samples.rows(), Eigen::NoChange);
        actions.bottomRows(decoded.samples.rows()) = decoded.samples;
    }
    write_trajectories(output, trajectories);
    io.info("wrote " + std::to_string(trajectories.size()) + " trajectories to " + output);
    return ok;
}

int cmd_compare(const Streams& io, const std::string& spec_path, const std::vector<std::string>& config_paths,
                const std::string& output, int vocab_override, int traces) {
    SyntheticSpec spec;
    try {
        spec = synthetic_spec_from_json(read_json_file(spec_path));
    } catch (const Error& e) {
        throw Error(e.code() == ErrorCode::invalid_argument ? ErrorCode::parse : e.code(), spec_path + ": " + e.what());
    }
    if (io.global.seed) spec.seed = *io.global.seed;
    std::vector<TokenizerConfig> configs;
    for (const auto& p : config_paths) configs.push_back(load_config_checked(p));
    if (configs.empty()) throw Error(ErrorCode::parse, "compare: --configs needs at least one config file");
    if (configs.front().chunk_length != spec.chunk_samples()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "compare: chunk_length " + std::to_string(configs.front().chunk_length) +
                        " differs from the synthetic chunk of " + std::to_string(spec.chunk_samples()) + " samples");
    }

    const auto dataset = generate_synthetic(spec);
    CompareOptions options;
    options.vocab_size = vocab_override > 0 ? vocab_override : configs.front().vocab_size;
    options.threads = io.global.threads;
    options.trace_trajectories = traces;
    const ComparisonReport report = compare_tokenizers(dataset, configs, options);

    std::ostringstream json_text, csv_text, trace_text;
    write_report_json(json_text, report);
    write_report_csv(csv_text, report);
    write_traces_csv(trace_text, report);
    const std::filesystem::path out_path(output);
    auto sibling = [&](const std::string& suffix) {
        return (out_path.parent_path() / (out_path.stem().string() + suffix)).string();
    };
    write_text_file(out_path, json_text.str());
    write_text_file(sibling(".csv"), csv_text.str());
    write_text_file(sibling("_traces.csv"), trace_text.str());
    for (const auto& e : report.entries) {
        io.info(e.name + ": tokens/chunk=" + std::to_string(e.tokens_first_chunk) + " mse=" +
                format_shortest(e.mse_mean) + " max_jump=" + format_shortest(e.max_boundary_jump));
    }
    return ok;
}

int cmd_basis(const Streams& io, int n, int p, int grid, const std::string& rule, const std::string& output) {
    const KnotVector kv = make_clamped_knots(n, p);
    const GridRule grid_rule = rule == "t_over_T" ? GridRule::t_over_T : GridRule::inclusive;
    const BSplineBasis basis = build_basis_matrix(kv, make_grid(grid, grid_rule));
    std::ostringstream csv;
    csv << 'u';
    for (int j = 0; j < n; ++j) csv << ",phi_" << j;
    csv << '\n';
    for (Eigen::Index t = 0; t < basis.samples(); ++t) {
        csv << format_shortest(basis.grid()[t]);
        for (int j = 0; j < n; ++j) csv << ',' << format_shortest(basis.matrix()(t, j));
        csv << '\n';
    }
    write_text_file(output, csv.str());
    io.info("wrote " + std::to_string(basis.samples()) + "x" + std::to_string(n) + " basis to " + output);
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    GlobalOptions global;
    CLI::App app{"Fixed-length B-spline tokenization of multi-DoF action sequences"};
    app.name(args.empty() ? "splinetok" : args.front());
    app.require_subcommand(1);

    std::int64_t seed_value = 0;
    app.add_flag("--quiet", global.quiet, "Suppress informational output")->configurable(false);
    app.add_option("--threads", global.threads, "Worker threads for per-trajectory work")
        ->check(CLI::PositiveNumber);
    auto* seed_opt = app.add_option("--seed", seed_value, "Override the synthetic dataset seed");

    std::vector<std::string> inputs;
    std::string output, config_path, stats_path, single_input, spec_path, rule = "inclusive";
    std::vector<std::string> config_list;
    bool stream = false;
    int n = 0, p = 0, grid = 0, vocab = 0, traces = 1;

    auto* fit_stats = app.add_subcommand("fit-stats", "Compute per-dimension 1st/99th percentile stats");
    fit_stats->add_option("--input", inputs, "Trajectory files (.csv or .jsonl)")->required();
    fit_stats->add_option("--output", output, "Stats JSON to write")->required();

    auto* tokenize = app.add_subcommand("tokenize", "Encode trajectories into token chunks");
    tokenize->add_option("--config", config_path)->required();
    tokenize->add_option("--stats", stats_path)->required();
    tokenize->add_option("--input", inputs)->required();
    tokenize->add_option("--output", output, "Token JSONL to write")->required();
    tokenize->add_flag("--stream", stream, "Pin each chunk's start to the previous decoded chunk");

    auto* detokenize = app.add_subcommand("detokenize", "Decode token chunks back into trajectories");
    detokenize->add_option("--config", config_path)->required();
    detokenize->add_option("--stats", stats_path)->required();
    detokenize->add_option("--input", single_input, "Token JSONL")->required();
    detokenize->add_option("--output", output, "Trajectory file (.csv or .jsonl)")->required();

    auto* compare = app.add_subcommand("compare", "Round-trip comparison against binning baselines");
    compare->add_option("--spec", spec_path, "Synthetic dataset spec JSON")->required();
    compare->add_option("--configs", config_list, "Tokenizer config JSON files")->required()->delimiter(',');
    compare->add_option("--output", output, "Report JSON; .csv and _traces.csv siblings are written too")
        ->required();
    compare->add_option("--vocab", vocab, "Vocabulary size of the binning baselines (default: first config)");
    compare->add_option("--traces", traces, "Trajectories to include in the trace CSV")->check(CLI::NonNegativeNumber);

    auto* basis = app.add_subcommand("basis", "Dump a clamped B-spline basis matrix as CSV");
    basis->add_option("--n", n, "Number of basis functions")->required();
    basis->add_option("--p", p, "Degree")->required();
    basis->add_option("--grid", grid, "Number of grid points")->required()->check(CLI::PositiveNumber);
    basis->add_option("--grid-rule", rule, "inclusive | t_over_T")
        ->check(CLI::IsMember({"inclusive", "t_over_T"}));
    basis->add_option("--output", output)->required();

    for (auto* sub : {fit_stats, tokenize, detokenize, compare, basis}) sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
    if (seed_opt->count() > 0) global.seed = static_cast<std::uint64_t>(seed_value);

    const Streams io{out, err, global};
    try {
        if (fit_stats->parsed()) return cmd_fit_stats(io, inputs, output);
        if (tokenize->parsed()) return cmd_tokenize(io, config_path, stats_path, inputs, output, stream);
        if (detokenize->parsed()) return cmd_detokenize(io, config_path, stats_path, single_input, output);
        if (compare->parsed()) return cmd_compare(io, spec_path, config_list, output, vocab, traces);
        if (basis->parsed()) return cmd_basis(io, n, p, grid, rule, output);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
    return failure;
}

}  // namespace splinetok::cli
