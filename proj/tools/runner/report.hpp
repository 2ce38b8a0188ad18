#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace sideinfo::runner {

/// One CSV line. `value` may be +inf.
struct ResultRow {
  std::string experiment;
  std::uint64_t n = 0;
  std::uint64_t size = 0;  // M
  double rate = 0.0;       // R, bits
  std::uint64_t k = 0;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t runtime_ms = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

inline constexpr std::string_view kReportHeader = "experiment,n,M,R,k,metric,value,seed,runtime_ms";

/// Throws std::invalid_argument for names outside the metric vocabulary.
void check_metric(std::string_view metric);

/// 12 significant digits; +inf spelled "+inf".
std::string format_real(double v);

void write_report(const std::vector<ResultRow>& rows, std::ostream& out);
/// Writes the CSV to `path`. Throws IoError.
void emit_report(const std::vector<ResultRow>& rows, const std::string& path);
/// Inverse of write_report. Throws std::invalid_argument on malformed input.
std::vector<ResultRow> parse_report(std::string_view text);

}  // namespace sideinfo::runner
