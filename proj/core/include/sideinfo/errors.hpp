#pragma once

#include <stdexcept>
#include <string>

namespace sideinfo {

// Precondition violations on arguments: size mismatches, out-of-range parameters.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// A dense table or enumeration would exceed one of the explicit resource caps.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sideinfo
