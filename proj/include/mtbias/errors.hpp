#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mtbias {

/// One problem found while validating an input file or configuration.
struct Issue {
  std::string source;  // file name or logical source
  std::size_t line = 0;  // 1-based; 0 when not line-oriented
  std::string field;
  std::string message;

  std::string to_string() const {
    std::ostringstream os;
    os << source;
    if (line != 0) os << ':' << line;
    if (!field.empty()) os << " [" << field << ']';
    os << ": " << message;
    return os.str();
  }
};

/// Input data failed validation. Carries every issue found, not just the first.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Issue> issues)
      : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

  ValidationError(std::string source, std::string message)
      : ValidationError(std::vector<Issue>{Issue{std::move(source), 0, {}, std::move(message)}}) {}

  const std::vector<Issue>& issues() const noexcept { return issues_; }

 private:
  static std::string summarize(const std::vector<Issue>& issues) {
    std::ostringstream os;
    os << issues.size() << " validation issue(s)";
    for (const auto& issue : issues) os << "\n  " << issue.to_string();
    return os.str();
  }

  std::vector<Issue> issues_;
};

/// Malformed or inconsistent configuration (config files, flags, descriptors).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mtbias
