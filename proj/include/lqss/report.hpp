#pragma once

#include "lqss/error.hpp"

#include <string>
#include <vector>

namespace lqss {

/// One measured quantity compared against its limit.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool passed = false;
  bool exact = false;  ///< integer agreement rather than an upper bound
  std::string detail;
};

/// Ordered list of named checks. Verification routines return these instead of
/// throwing so callers can print every residual.
class CheckReport {
 public:
  /// Records `value <= limit` (NaN fails).
  void require_at_most(std::string name, double value, double limit, std::string detail = {});
  /// Records an exact integer agreement.
  void require_equal(std::string name, long long actual, long long expected, std::string detail = {});
  void add(Check check);
  void merge(const CheckReport& other);

  bool passed() const;
  const std::vector<Check>& checks() const noexcept { return checks_; }
  const Check* find(const std::string& name) const;
  std::vector<std::string> failed_names() const;

  /// One line per check: "name value <= limit ok|FAIL" (== for exact checks).
  std::string to_string() const;

 private:
  std::vector<Check> checks_;
};

/// A computation finished but its own postconditions do not hold.
class ConsistencyError : public Error {
 public:
  ConsistencyError(const std::string& message, CheckReport report)
      : Error(message + "\n" + report.to_string()), report_(std::move(report)) {}

  const CheckReport& report() const noexcept { return report_; }

 private:
  CheckReport report_;
};

}  // namespace lqss
