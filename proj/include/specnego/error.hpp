#pragma once

#include <stdexcept>
#include <string>

namespace specnego {

/// Raised when inputs are structurally inconsistent (dimension mismatch,
/// unknown identifiers, malformed overrides).
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace specnego
