#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sideinfo/exponents.hpp"

namespace sideinfo::runner {

/// Rejected configuration: bad JSON, unknown fields, missing parameters.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class Command { verify, optimal, multi, sweep, exponent, mixed, probe };

const char* to_string(Command command);

struct Params {
  std::optional<unsigned> n;
  std::vector<std::uint64_t> sizes;  // "M": one size or a list
  std::optional<double> rate;        // "R"
  std::vector<double> rates;
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> k_max;
  std::optional<double> grid_step;
  std::optional<std::uint64_t> budget;
  std::optional<std::uint64_t> trials;
  std::vector<unsigned> n_values;
  std::optional<double> a;
};

struct ExperimentConfig {
  Command command = Command::verify;
  /// Absent only for `verify`.
  std::optional<SingleLetterModel> model;
  Params params;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string output_path;
  /// Fill runtime_ms with wall-clock times. Off by default so output stays
  /// byte-reproducible.
  bool timings = false;
};

/// Parses and validates a JSON document. Throws ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Checks that the command's required parameters are present and in range.
void validate(const ExperimentConfig& config);

}  // namespace sideinfo::runner
