#include "runner/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "runner/config.hpp"

namespace sideinfo::runner {
namespace {

constexpr std::array<std::string_view, 9> kMetrics = {"e_A",      "e_B",    "e_B_k",        "miss", "rho_hi",
                                                      "rho_lo",   "eps_pred", "exponent_est", "R_n_a"};

std::uint64_t parse_u64(std::string_view field) {
  std::uint64_t v = 0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size())
    throw std::invalid_argument("bad integer field '" + std::string(field) + "'");
  return v;
}

double parse_real(std::string_view field) {
  if (field == "+inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || end != field.data() + field.size())
    throw std::invalid_argument("bad real field '" + std::string(field) + "'");
  return v;
}

}  // namespace

void check_metric(std::string_view metric) {
  for (auto m : kMetrics)
    if (m == metric) return;
  throw std::invalid_argument("metric '" + std::string(metric) + "' is not in the vocabulary");
}

std::string format_real(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "+inf";
  if (std::isnan(v) || std::isinf(v)) throw std::invalid_argument("only +inf may be reported as non-finite");
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_report(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const ResultRow& r : rows) {
    check_metric(r.metric);
    out << r.experiment << ',' << r.n << ',' << r.size << ',' << format_real(r.rate) << ',' << r.k << ','
        << r.metric << ',' << format_real(r.value) << ',' << r.seed << ',' << r.runtime_ms << '\n';
  }
}

void emit_report(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_report(rows, out);
  out.flush();
  if (!out) throw IoError("write to " + path + " failed");
}

std::vector<ResultRow> parse_report(std::string_view text) {
  std::vector<ResultRow> rows;
  bool header = true;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    if (eol == std::string_view::npos) throw std::invalid_argument("last line is not newline-terminated");
    const std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol + 1);
    if (header) {
      if (line != kReportHeader) throw std::invalid_argument("unexpected header");
      header = false;
      continue;
    }
    std::array<std::string_view, 9> f;
    std::string_view rest = line;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto comma = rest.find(',');
      if ((comma == std::string_view::npos) != (i + 1 == f.size()))
        throw std::invalid_argument("row does not have 9 fields");
      f[i] = rest.substr(0, comma);
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }
    check_metric(f[5]);
    rows.push_back({std::string(f[0]), parse_u64(f[1]), parse_u64(f[2]), parse_real(f[3]), parse_u64(f[4]),
                    std::string(f[5]), parse_real(f[6]), parse_u64(f[7]), parse_u64(f[8])});
  }
  if (header) throw std::invalid_argument("missing header");
  return rows;
}

}  // namespace sideinfo::runner
