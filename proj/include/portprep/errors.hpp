#pragma once

#include <stdexcept>
#include <string>

namespace portprep {

/// Thrown when register labels clash or an operation is asked to act on
/// registers the operand does not carry.
class LayoutError : public std::runtime_error {
 public:
  explicit LayoutError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on mathematically invalid inputs (non-normalized states,
/// non-Hermitian matrices, parameters outside their domain).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a dense computation would exceed the configured budget.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a numerical routine detects a violation beyond tolerance
/// (e.g. a supposedly PSD operator with a clearly negative eigenvalue).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace portprep
