#pragma once

#include <stdexcept>
#include <string>

namespace capbp {

/// Raised when a scenario, topology or controller configuration cannot be
/// used as given. Data-level validation (see validate_topology) reports
/// violations as values instead.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace capbp
