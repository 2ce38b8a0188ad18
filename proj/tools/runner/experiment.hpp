#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "runner/config.hpp"
#include "runner/report.hpp"

namespace sideinfo::runner {

/// Some invariant of the verify suite was violated.
class VerifyFailure : public std::runtime_error {
 public:
  explicit VerifyFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Rates closer than this to a jump of the sampled curve are flagged.
inline constexpr double kJumpThreshold = 0.3;

/// Runs the configured command. Rows come out in input order whatever the
/// worker count. Human-readable notes (probe verdicts, verify lines, jump
/// flags) go to `notes`.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config, std::ostream& notes);
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// Process exit codes.
enum ExitCode : int { exit_ok = 0, exit_config = 1, exit_verify = 2, exit_resource = 3, exit_io = 4 };

}  // namespace sideinfo::runner
