#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace bregman {

/// Outcome of checking an inequality lhs <= rhs + slack over many samples.
struct CheckResult {
  std::string name;
  bool passed = true;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation;
  double worst_margin = -std::numeric_limits<double>::infinity();  ///< max of lhs - rhs
  std::string note;

  /// Records one sample; non-finite values count as violations.
  void observe(double lhs, double rhs, std::size_t index, double slack = 0.0) {
    ++checked;
    const double margin = lhs - rhs;
    if (std::isnan(margin)) {
      worst_margin = std::numeric_limits<double>::infinity();
    } else {
      worst_margin = std::max(worst_margin, margin);
    }
    if (!(lhs <= rhs + slack)) fail_at(index);
  }

  void require(bool ok, std::size_t index) {
    ++checked;
    if (!ok) fail_at(index);
  }

  void fail(const std::string& why) {
    passed = false;
    if (!note.empty()) note += "; ";
    note += why;
  }

  void merge(const CheckResult& other) {
    passed = passed && other.passed;
    checked += other.checked;
    violations += other.violations;
    if (other.first_violation && !first_violation) first_violation = other.first_violation;
    worst_margin = std::max(worst_margin, other.worst_margin);
    if (!other.note.empty()) {
      if (!note.empty()) note += "; ";
      note += other.note;
    }
  }

  std::string summary() const {
    std::ostringstream os;
    os << name << ": " << (passed ? "pass" : "FAIL") << " (" << checked << " checks, " << violations
       << " violations";
    if (first_violation) os << ", first at " << *first_violation;
    if (std::isfinite(worst_margin)) os << ", worst margin " << worst_margin;
    os << ")";
    if (!note.empty()) os << " " << note;
    return os.str();
  }

 private:
  void fail_at(std::size_t index) {
    passed = false;
    ++violations;
    if (!first_violation) first_violation = index;
  }
};

inline CheckResult make_check(std::string name) {
  CheckResult c;
  c.name = std::move(name);
  return c;
}

}  // namespace bregman
