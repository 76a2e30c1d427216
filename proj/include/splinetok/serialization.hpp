#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "splinetok/normalize.hpp"
#include "splinetok/synthetic.hpp"
#include "splinetok/tokenizer.hpp"

namespace splinetok {

/// Shortest decimal form that parses back to the same double.
std::string format_shortest(double value);
/// printf("%.17g") form used for persisted configs and stats.
std::string format_fixed17(double value);

/// Deterministic JSON text: keys sorted, two-space indent, floats with 17
/// significant digits, trailing newline. load -> save is byte-stable.
std::string canonical_dump(const nlohmann::json& value);

nlohmann::json to_json(const TokenizerConfig& config);
/// Missing optional keys take their defaults; unknown enum strings and
/// wrong types throw Error(parse), invalid values Error(invalid_argument).
TokenizerConfig config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NormalizationStats& stats);
NormalizationStats stats_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

/// File helpers; I/O failures throw Error(io), malformed JSON Error(parse).
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

TokenizerConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const TokenizerConfig& config);
NormalizationStats load_stats(const std::filesystem::path& path);
void save_stats(const std::filesystem::path& path, const NormalizationStats& stats);

}  // namespace splinetok
