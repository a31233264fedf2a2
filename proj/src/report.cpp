#include "lqss/report.hpp"

#include <cmath>
#include <cstdio>

namespace lqss {

void CheckReport::require_at_most(std::string name, double value, double limit, std::string detail) {
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.limit = limit;
  c.passed = std::isfinite(value) && value <= limit;
  c.detail = std::move(detail);
  checks_.push_back(std::move(c));
}

void CheckReport::require_equal(std::string name, long long actual, long long expected,
                                std::string detail) {
  Check c;
  c.name = std::move(name);
  c.value = static_cast<double>(actual);
  c.limit = static_cast<double>(expected);
  c.passed = actual == expected;
  c.exact = true;
  if (detail.empty()) {
    detail = "expected " + std::to_string(expected) + ", got " + std::to_string(actual);
  }
  c.detail = std::move(detail);
  checks_.push_back(std::move(c));
}

void CheckReport::add(Check check) { checks_.push_back(std::move(check)); }

void CheckReport::merge(const CheckReport& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
}

bool CheckReport::passed() const {
  for (const auto& c : checks_) {
    if (!c.passed) return false;
  }
  return true;
}

const Check* CheckReport::find(const std::string& name) const {
  for (const auto& c : checks_) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<std::string> CheckReport::failed_names() const {
  std::vector<std::string> out;
  for (const auto& c : checks_) {
    if (!c.passed) out.push_back(c.name);
  }
  return out;
}

std::string CheckReport::to_string() const {
  std::string out;
  char buf[256];
  for (const auto& c : checks_) {
    if (c.exact) {
      std::snprintf(buf, sizeof(buf), "%-26s %12.0f == %-10.0f %s", c.name.c_str(), c.value, c.limit,
                    c.passed ? "ok" : "FAIL");
    } else {
      std::snprintf(buf, sizeof(buf), "%-26s %12.4e <= %-10.3e %s", c.name.c_str(), c.value, c.limit,
                    c.passed ? "ok" : "FAIL");
    }
    out += buf;
    if (!c.detail.empty()) out += "  (" + c.detail + ")";
    out += '\n';
  }
  return out;
}

}  // namespace lqss
