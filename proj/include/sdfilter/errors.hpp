#pragma once

#include <stdexcept>
#include <string>

namespace sdfilter {

/// Thrown when an operation is not defined for the requested family or
/// parameterization (e.g. observation-space scores for discrete families).
class unsupported_operation : public std::logic_error {
  public:
    explicit unsupported_operation(const std::string& what) : std::logic_error(what) {}
};

}  // namespace sdfilter
