#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splinetok/quantize.hpp"

namespace splinetok {

struct Trajectory {
    std::string id;
    Eigen::MatrixXd actions;  ///< rows are timesteps, raw units
};

/// One line of a token file.
struct TokenRecord {
    std::string id;
    int chunk_index = 0;
    TokenSequence sequence;
};

enum class TrajectoryFormat { csv, jsonl };

/// `.csv` selects CSV; anything else is read/written as JSONL.
TrajectoryFormat format_for(const std::filesystem::path& path);

// CSV: header "t,dim_0,...,dim_{D-1}", one row per timestep; one trajectory
// per file. JSONL: {"id": ..., "actions": [[...], ...]} per line.
// Malformed input throws Error(parse) and dimension changes
// Error(inconsistent_dimension); both name the offending line.
std::vector<Trajectory> read_trajectories_csv(std::istream& in, const std::string& id);
std::vector<Trajectory> read_trajectories_jsonl(std::istream& in);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
void write_trajectories_jsonl(std::ostream& out, const std::vector<Trajectory>& trajectories);
/// CSV output holds exactly one trajectory; more throws Error(invalid_argument).
void write_trajectories(const std::filesystem::path& path, const std::vector<Trajectory>& trajectories);

std::string token_record_line(const TokenRecord& record);
std::vector<TokenRecord> read_token_records(std::istream& in);
std::vector<TokenRecord> read_token_file(const std::filesystem::path& path);
void write_token_file(const std::filesystem::path& path, const std::vector<TokenRecord>& records);

}  // namespace splinetok
