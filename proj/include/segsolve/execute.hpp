#pragma once

#include <optional>
#include <string>

#include "segsolve/config.hpp"
#include "segsolve/iteration.hpp"

namespace segsolve {

namespace exit_status {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int invalid_config = 2;
inline constexpr int io_error = 3;
inline constexpr int audit_failed = 4;
} // namespace exit_status

struct ExecuteOutcome {
    int status = exit_status::ok;
    std::string message;
    std::string out_dir;
};

/// 64-bit FNV-1a of the text, as 16 lowercase hex digits.
std::string config_hash(const std::string& text);

Problem build_problem(const RunConfig& config);

/// Runs the configured command and writes its artifacts to `out_dir`.
/// Solver failures are caught and written as a structured error report.
ExecuteOutcome execute(const RunConfig& config, const std::string& out_dir, unsigned threads = 1);

/// Parses and executes in one go. Config errors also produce report.json
/// (in `out_dir` if given, since no directory could be read from the text).
ExecuteOutcome execute_text(const std::string& text, std::optional<Command> command,
                            std::optional<std::string> out_dir, unsigned threads = 1);

} // namespace segsolve
