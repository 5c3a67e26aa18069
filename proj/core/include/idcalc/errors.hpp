#pragma once

#include <stdexcept>
#include <string>

namespace idcalc {

/// Structurally invalid input: malformed partitions, out-of-range leaves,
/// precondition violations that the caller could have checked.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An enumeration or search guard was exceeded. Raised instead of truncating.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two conditions disagree on a shared pair.
class IncompatibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closure side condition of an amalgamation failed. `clause()` names it.
class ClauseViolation : public std::runtime_error {
 public:
  ClauseViolation(std::string clause, const std::string& what)
      : std::runtime_error("clause (" + clause + "): " + what), clause_(std::move(clause)) {}

  const std::string& clause() const noexcept { return clause_; }

 private:
  std::string clause_;
};

}  // namespace idcalc
