#include "splinetok/serialization.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "splinetok/error.hpp"

namespace splinetok {

using nlohmann::json;

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::degree_out_of_range: return "degree_out_of_range";
        case ErrorCode::domain: return "domain";
        case ErrorCode::dimension_mismatch: return "dimension_mismatch";
        case ErrorCode::non_finite: return "non_finite";
        case ErrorCode::rank_deficient: return "rank_deficient";
        case ErrorCode::empty_dataset: return "empty_dataset";
        case ErrorCode::inconsistent_dimension: return "inconsistent_dimension";
        case ErrorCode::out_of_vocabulary: return "out_of_vocabulary";
        case ErrorCode::layout_mismatch: return "layout_mismatch";
        case ErrorCode::stream_state_mismatch: return "stream_state_mismatch";
        case ErrorCode::dof_mismatch: return "dof_mismatch";
        case ErrorCode::parse: return "parse";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

std::string format_shortest(double value) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

std::string format_fixed17(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

namespace {

void dump_into(std::string& out, const json& value, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (value.type()) {
        case json::value_t::object: {
            if (value.empty()) {
                out += "{}";
                return;
            }
            // json objects are std::map-backed, so iteration is already key-sorted.
            out += "{\n";
            bool first = true;
            for (const auto& [key, item] : value.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + json(key).dump() + ": ";
                dump_into(out, item, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case json::value_t::array: {
            if (value.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& item : value) {
                if (!first) out += ", ";
                first = false;
                dump_into(out, item, depth + 1);
            }
            out += "]";
            return;
        }
        case json::value_t::number_float:
            out += format_fixed17(value.get<double>());
            return;
        default:
            out += value.dump();
            return;
    }
}

template <typename T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw Error(ErrorCode::parse, std::string("missing key \"") + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::parse, std::string("wrong type for key \"") + key + "\"");
    }
}

template <typename T>
T optional_key(const json& j, const char* key, T fallback) {
    return j.contains(key) ? required<T>(j, key) : fallback;
}

const char* grid_rule_name(GridRule rule) { return rule == GridRule::t_over_T ? "t_over_T" : "inclusive"; }

GridRule parse_grid_rule(const std::string& s) {
    if (s == "t_over_T") return GridRule::t_over_T;
    if (s == "inclusive") return GridRule::inclusive;
    throw Error(ErrorCode::parse, "unknown grid_rule \"" + s + "\"");
}

const char* tail_policy_name(TailPolicy p) {
    switch (p) {
        case TailPolicy::drop: return "drop";
        case TailPolicy::error: return "error";
        case TailPolicy::fit_truncated: return "fit_truncated";
    }
    return "drop";
}

TailPolicy parse_tail_policy(const std::string& s) {
    if (s == "drop") return TailPolicy::drop;
    if (s == "error") return TailPolicy::error;
    if (s == "fit_truncated") return TailPolicy::fit_truncated;
    throw Error(ErrorCode::parse, "unknown tail_policy \"" + s + "\"");
}

void require_object(const json& j, const char* what) {
    if (!j.is_object()) throw Error(ErrorCode::parse, std::string(what) + " must be a JSON object");
}

}  // namespace

std::string canonical_dump(const json& value) {
    std::string out;
    dump_into(out, value, 0);
    out += "\n";
    return out;
}

json to_json(const TokenizerConfig& c) {
    return json{
        {"chunk_length", c.chunk_length},
        {"basis_count", c.basis_count},
        {"degree", c.degree},
        {"lambda", c.lambda},
        {"vocab_size", c.vocab_size},
        {"quant_range", {c.quant_low, c.quant_high}},
        {"grid_rule", grid_rule_name(c.grid_rule)},
        {"transition_mode", c.transition_mode == TransitionMode::clamped ? "clamped" : "independent"},
        {"tail_policy", tail_policy_name(c.tail_policy)},
        {"stream_anchor", c.stream_anchor == StreamAnchor::decoded ? "decoded" : "commanded"},
    };
}

TokenizerConfig config_from_json(const json& j) {
    require_object(j, "config");
    TokenizerConfig c;
    c.chunk_length = optional_key<int>(j, "chunk_length", c.chunk_length);
    c.basis_count = optional_key<int>(j, "basis_count", c.basis_count);
    c.degree = optional_key<int>(j, "degree", c.degree);
    c.lambda = optional_key<double>(j, "lambda", c.lambda);
    c.vocab_size = optional_key<int>(j, "vocab_size", c.vocab_size);
    if (j.contains("quant_range")) {
        const auto range = required<std::vector<double>>(j, "quant_range");
        if (range.size() != 2) throw Error(ErrorCode::parse, "quant_range must be [low, high]");
        c.quant_low = range[0];
        c.quant_high = range[1];
    }
    c.grid_rule = parse_grid_rule(optional_key<std::string>(j, "grid_rule", "t_over_T"));
    const auto mode = optional_key<std::string>(j, "transition_mode", "independent");
    if (mode == "clamped") {
        c.transition_mode = TransitionMode::clamped;
    } else if (mode != "independent") {
        throw Error(ErrorCode::parse, "unknown transition_mode \"" + mode + "\"");
    }
    c.tail_policy = parse_tail_policy(optional_key<std::string>(j, "tail_policy", "drop"));
    const auto anchor = optional_key<std::string>(j, "stream_anchor", "decoded");
    if (anchor == "commanded") {
        c.stream_anchor = StreamAnchor::commanded;
    } else if (anchor != "decoded") {
        throw Error(ErrorCode::parse, "unknown stream_anchor \"" + anchor + "\"");
    }
    c.validate();
    return c;
}

json to_json(const NormalizationStats& s) {
    return json{
        {"dof", s.dof()},
        {"q_low", s.q_low},
        {"q_high", s.q_high},
        {"percentile_rule", "linear"},
        {"quantiles", {s.quantile_low, s.quantile_high}},
    };
}

NormalizationStats stats_from_json(const json& j) {
    require_object(j, "stats");
    NormalizationStats s;
    s.q_low = required<std::vector<double>>(j, "q_low");
    s.q_high = required<std::vector<double>>(j, "q_high");
    const int dof = required<int>(j, "dof");
    if (dof != static_cast<int>(s.q_low.size()) || dof != static_cast<int>(s.q_high.size())) {
        throw Error(ErrorCode::parse, "stats: dof does not match q_low/q_high lengths");
    }
    if (optional_key<std::string>(j, "percentile_rule", "linear") != "linear") {
        throw Error(ErrorCode::parse, "stats: only the \"linear\" percentile rule is supported");
    }
    if (j.contains("quantiles")) {
        const auto q = required<std::vector<double>>(j, "quantiles");
        if (q.size() != 2) throw Error(ErrorCode::parse, "stats: quantiles must be [low, high]");
        s.quantile_low = q[0];
        s.quantile_high = q[1];
    }
    s.validate();
    return s;
}

json to_json(const SyntheticSpec& s) {
    return json{
        {"count", s.count},
        {"duration_s", s.duration_s},
        {"rate_hz", s.rate_hz},
        {"generator", s.generator == SyntheticGenerator::cubic_spline ? "cubic_spline" : "sum_of_sinusoids"},
        {"control_points", s.control_points},
        {"dof", s.dof},
        {"chunks_per_trajectory", s.chunks_per_trajectory},
        {"grid_rule", grid_rule_name(s.grid_rule)},
        {"seed", s.seed},
    };
}

SyntheticSpec synthetic_spec_from_json(const json& j) {
    require_object(j, "synthetic spec");
    SyntheticSpec s;
    s.count = optional_key<int>(j, "count", s.count);
    s.duration_s = optional_key<double>(j, "duration_s", s.duration_s);
    s.rate_hz = optional_key<double>(j, "rate_hz", s.rate_hz);
    const auto gen = optional_key<std::string>(j, "generator", "cubic_spline");
    if (gen == "sum_of_sinusoids") {
        s.generator = SyntheticGenerator::sum_of_sinusoids;
    } else if (gen != "cubic_spline") {
        throw Error(ErrorCode::parse, "unknown generator \"" + gen + "\"");
    }
    s.control_points = optional_key<int>(j, "control_points", s.control_points);
    s.dof = optional_key<int>(j, "dof", s.dof);
    s.chunks_per_trajectory = optional_key<int>(j, "chunks_per_trajectory", s.chunks_per_trajectory);
    s.grid_rule = parse_grid_rule(optional_key<std::string>(j, "grid_rule", "t_over_T"));
    s.seed = optional_key<std::uint64_t>(j, "seed", s.seed);
    s.validate();
    return s;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::parse, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::io, "write failed for " + path.string());
}

TokenizerConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

void save_config(const std::filesystem::path& path, const TokenizerConfig& config) {
    write_text_file(path, canonical_dump(to_json(config)));
}

NormalizationStats load_stats(const std::filesystem::path& path) { return stats_from_json(read_json_file(path)); }

void save_stats(const std::filesystem::path& path, const NormalizationStats& stats) {
    write_text_file(path, canonical_dump(to_json(stats)));
}

}  // namespace splinetok
