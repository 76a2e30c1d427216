#pragma once

#include <stdexcept>
#include <string>

namespace splinetok {

/// Failure categories raised by the library. The CLI maps these onto exit codes.
enum class ErrorCode {
    invalid_argument,
    degree_out_of_range,
    domain,
    dimension_mismatch,
    non_finite,
    rank_deficient,
    empty_dataset,
    inconsistent_dimension,
    out_of_vocabulary,
    layout_mismatch,
    stream_state_mismatch,
    dof_mismatch,
    parse,
    io,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace splinetok
