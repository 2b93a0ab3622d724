#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace admissions {

/// Base class for every failure raised by the toolkit. `code()` is a stable
/// identifier (e.g. "RankGap", "MissingScore") suitable for machine-readable
/// error reports.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

/// One broken invariant, with enough location information to find the record.
struct Violation {
  std::string code;
  std::string location;
  std::string message;
};

class ValidationError : public Error {
public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }

  bool has(const std::string& code) const;

private:
  std::vector<Violation> violations_;
};

}  // namespace admissions
