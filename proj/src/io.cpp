#include "splinetok/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "splinetok/error.hpp"
#include "splinetok/serialization.hpp"

namespace splinetok {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, std::size_t line) {
    field = trim(field);
    double value = 0.0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc() || result.ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw Error(ErrorCode::parse, at_line(line) + "not a finite number: \"" + std::string(field) + "\"");
    }
    return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    return in;
}

bool blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

TrajectoryFormat format_for(const std::filesystem::path& path) {
    return path.extension() == ".csv" ? TrajectoryFormat::csv : TrajectoryFormat::jsonl;
}

std::vector<Trajectory> read_trajectories_csv(std::istream& in, const std::string& id) {
    std::string line;
    std::size_t line_no = 0;
    std::size_t columns = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto header = split_fields(line);
        if (header.size() < 2 || trim(header[0]) != "t") {
            throw Error(ErrorCode::parse, at_line(line_no) + "expected header \"t,dim_0,...\"");
        }
        for (std::size_t d = 1; d < header.size(); ++d) {
            if (trim(header[d]) != "dim_" + std::to_string(d - 1)) {
                throw Error(ErrorCode::parse, at_line(line_no) + "header column " + std::to_string(d) +
                                                  " should be dim_" + std::to_string(d - 1));
            }
        }
        columns = header.size();
        break;
    }
    if (columns == 0) return {};

    std::vector<double> values;
    Eigen::Index rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        const auto fields = split_fields(line);
        if (fields.size() != columns) {
            throw Error(ErrorCode::inconsistent_dimension, at_line(line_no) + "expected " + std::to_string(columns) +
                                                               " fields, got " + std::to_string(fields.size()));
        }
        parse_double(fields[0], line_no);
        for (std::size_t d = 1; d < fields.size(); ++d) values.push_back(parse_double(fields[d], line_no));
        ++rows;
    }
    if (rows == 0) return {};
    const auto dof = static_cast<Eigen::Index>(columns - 1);
    Trajectory traj{id, Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                            values.data(), rows, dof)};
    return {std::move(traj)};
}

std::vector<Trajectory> read_trajectories_jsonl(std::istream& in) {
    std::vector<Trajectory> out;
    std::string line;
    std::size_t line_no = 0;
    Eigen::Index dof = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw Error(ErrorCode::parse, at_line(line_no) + "invalid JSON");
        }
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("actions") ||
            !j["actions"].is_array()) {
            throw Error(ErrorCode::parse, at_line(line_no) + "expected {\"id\": string, \"actions\": [[...]]}");
        }
        const auto& actions = j["actions"];
        const auto rows = static_cast<Eigen::Index>(actions.size());
        Eigen::MatrixXd m;
        for (Eigen::Index t = 0; t < rows; ++t) {
            const auto& row = actions[t];
            if (!row.is_array()) throw Error(ErrorCode::parse, at_line(line_no) + "action rows must be arrays");
            const auto width = static_cast<Eigen::Index>(row.size());
            if (t == 0) {
                if (dof >= 0 && width != dof) {
                    throw Error(ErrorCode::inconsistent_dimension, at_line(line_no) + "trajectory has " +
                                                                       std::to_string(width) + " dims, expected " +
                                                                       std::to_string(dof));
                }
                dof = width;
                m.resize(rows, width);
            } else if (width != m.cols()) {
                throw Error(ErrorCode::inconsistent_dimension,
                            at_line(line_no) + "row " + std::to_string(t) + " has " + std::to_string(width) +
                                " values, expected " + std::to_string(m.cols()));
            }
            for (Eigen::Index d = 0; d < width; ++d) {
                const auto& v = row[d];
                if (!v.is_number() || !std::isfinite(v.get<double>())) {
                    throw Error(ErrorCode::parse, at_line(line_no) + "non-numeric or non-finite action value");
                }
                m(t, d) = v.get<double>();
            }
        }
        if (rows == 0 || m.cols() == 0) throw Error(ErrorCode::parse, at_line(line_no) + "empty trajectory");
        out.push_back(Trajectory{j["id"].get<std::string>(), std::move(m)});
    }
    return out;
}

std::vector<Trajectory> read_trajectories(const std::filesystem::path& path) {
    auto in = open_input(path);
    if (format_for(path) == TrajectoryFormat::csv) return read_trajectories_csv(in, path.stem().string());
    return read_trajectories_jsonl(in);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
    out << 't';
    for (Eigen::Index d = 0; d < trajectory.actions.cols(); ++d) out << ",dim_" << d;
    out << '\n';
    for (Eigen::Index t = 0; t < trajectory.actions.rows(); ++t) {
        out << t;
        for (Eigen::Index d = 0; d < trajectory.actions.cols(); ++d) {
            out << ',' << format_shortest(trajectory.actions(t, d));
        }
        out << '\n';
    }
}

void write_trajectories_jsonl(std::ostream& out, const std::vector<Trajectory>& trajectories) {
    for (const auto& traj : trajectories) {
        ordered_json j;
        j["id"] = traj.id;
        ordered_json rows = ordered_json::array();
        for (Eigen::Index t = 0; t < traj.actions.rows(); ++t) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index d = 0; d < traj.actions.cols(); ++d) row.push_back(traj.actions(t, d));
            rows.push_back(std::move(row));
        }
        j["actions"] = std::move(rows);
        out << j.dump() << '\n';
    }
}

void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories) {
    std::ostringstream buffer;
    if (format_for(path) == TrajectoryFormat::csv) {
        if (trajectories.size() != 1) {
            throw Error(ErrorCode::invalid_argument, "CSV output holds exactly one trajectory, got " +
                                                         std::to_string(trajectories.size()) + "; use .jsonl");
        }
        write_trajectory_csv(buffer, trajectories.front());
    } else {
        write_trajectories_jsonl(buffer, trajectories);
    }
    write_text_file(path, buffer.str());
}

std::string token_record_line(const TokenRecord& r) {
    ordered_json j;
    j["id"] = r.id;
    j["chunk_index"] = r.chunk_index;
    j["conditioned"] = r.sequence.conditioned;
    j["dof"] = r.sequence.dof;
    j["basis_count"] = r.sequence.basis_count;
    if (r.sequence.length != 0) j["length"] = r.sequence.length;
    j["tokens"] = r.sequence.tokens;
    return j.dump();
}

std::vector<TokenRecord> read_token_records(std::istream& in) {
    std::vector<TokenRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            throw Error(ErrorCode::parse, at_line(line_no) + "invalid JSON");
        }
        auto field = [&](const char* key, auto check) -> const json& {
            if (!j.is_object() || !j.contains(key) || !check(j[key])) {
                throw Error(ErrorCode::parse, at_line(line_no) + "missing or malformed \"" + key + "\"");
            }
            return j[key];
        };
        const auto is_int = [](const json& v) { return v.is_number_integer(); };
        TokenRecord r;
        r.id = field("id", [](const json& v) { return v.is_string(); }).get<std::string>();
        r.chunk_index = field("chunk_index", is_int).get<int>();
        r.sequence.conditioned = field("conditioned", [](const json& v) { return v.is_boolean(); }).get<bool>();
        r.sequence.dof = field("dof", is_int).get<int>();
        r.sequence.basis_count = field("basis_count", is_int).get<int>();
        if (j.contains("length")) r.sequence.length = field("length", is_int).get<int>();
        const auto& tokens = field("tokens", [](const json& v) { return v.is_array(); });
        r.sequence.tokens.reserve(tokens.size());
        for (const auto& t : tokens) {
            if (!t.is_number_integer()) throw Error(ErrorCode::parse, at_line(line_no) + "tokens must be integers");
            const auto v = t.get<long long>();
            // Out-of-range values are kept distinguishable for the vocabulary check.
            r.sequence.tokens.push_back(v < -1 ? -1 : (v > 1'000'000'000 ? 1'000'000'000 : static_cast<int>(v)));
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<TokenRecord> read_token_file(const std::filesystem::path& path) {
    auto in = open_input(path);
    return read_token_records(in);
}

void write_token_file(const std::filesystem::path& path, const std::vector<TokenRecord>& records) {
    std::string text;
    for (const auto& r : records) text += token_record_line(r) + "\n";
    write_text_file(path, text);
}

}  // namespace splinetok
