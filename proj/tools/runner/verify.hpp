#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sideinfo/parallel.hpp"

namespace sideinfo::runner {

struct VerifyCheck {
  std::string name;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  /// First violation, if any.
  std::string detail;
};

/// The invariant suites of every module on seeded instances.
std::vector<VerifyCheck> run_verify_suite(std::uint64_t seed, Parallelism par = {});

}  // namespace sideinfo::runner
