#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bregman/accel/record.hpp"
#include "bregman/core/check.hpp"
#include "bregman/flows/integrate.hpp"

namespace bregman::harness {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum ExitCode : int { kPass = 0, kCheckFailure = 1, kConfigError = 2, kInternalError = 3 };

/// Invalid configuration (unknown id, malformed JSON, bad parameter).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Status { pass, fail, skip };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::skip: return "skip";
  }
  return "fail";
}

/// One named check in a report. `measured` and `bound` are the headline numbers
/// (e.g. fitted slope vs allowed slope); `detail` lists the sub-checks.
struct CheckEntry {
  std::string name;
  Status status = Status::pass;
  double measured = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();
  double runtime_s = 0.0;
  std::vector<std::string> detail;

  void absorb(const CheckResult& c) {
    if (!c.passed) status = Status::fail;
    detail.push_back(c.summary());
  }
  void require(bool ok, const std::string& what) {
    if (!ok) status = Status::fail;
    detail.push_back(std::string(ok ? "ok: " : "FAILED: ") + what);
  }
  void note(const std::string& what) { detail.push_back(what); }
};

struct ReportSummary {
  std::string experiment;
  std::string scale = "full";
  std::uint64_t seed = 0;
  std::vector<CheckEntry> checks;
  std::vector<std::string> files;
  double runtime_s = 0.0;

  bool passed() const {
    for (const auto& c : checks) {
      if (c.status == Status::fail) return false;
    }
    return true;
  }
  int exit_code() const { return passed() ? kPass : kCheckFailure; }
};

/// JSON numbers cannot hold inf/nan; those become strings.
inline json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json to_json(const ReportSummary& r, bool include_runtime = true) {
  json j;
  j["experiment"] = r.experiment;
  j["scale"] = r.scale;
  j["seed"] = r.seed;
  j["passed"] = r.passed();
  j["exit_code"] = r.exit_code();
  if (include_runtime) j["runtime_s"] = r.runtime_s;
  j["checks"] = json::array();
  for (const auto& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["status"] = to_string(c.status);
    e["measured"] = number_or_string(c.measured);
    e["bound"] = number_or_string(c.bound);
    if (include_runtime) e["runtime_s"] = c.runtime_s;
    e["detail"] = c.detail;
    j["checks"].push_back(e);
  }
  j["files"] = r.files;
  return j;
}

inline json run_summary_json(const RunRecord& r) {
  json j;
  j["method"] = r.method;
  j["p"] = r.p;
  j["epsilon"] = number_or_string(r.epsilon);
  j["N"] = number_or_string(r.N);
  j["C"] = number_or_string(r.C);
  j["mirror"] = r.mirror;
  j["termination"] = to_string(r.termination);
  if (r.termination_k) j["termination_k"] = *r.termination_k;
  j["iterations"] = r.rows();
  if (!r.gap_x.empty()) j["final_gap_x"] = number_or_string(r.gap_x.back());
  if (!r.gap_y.empty()) j["final_gap_y"] = number_or_string(r.gap_y.back());
  return j;
}

/// Output directory with helpers that register every emitted file (paths relative to the root).
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

  const fs::path& root() const { return root_; }

  std::ofstream open(const std::string& rel) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary);
    if (!os) throw Error("cannot open output file " + p.string());
    files_.push_back(rel);
    return os;
  }

  /// Trajectory CSV thinned to at most `max_rows` rows (first and last always kept).
  void trajectory(const std::string& rel, const Trajectory& tr, std::size_t max_rows = 2000) {
    auto os = open(rel);
    write_trajectory_csv(os, thin(tr, max_rows));
  }

  void run(const std::string& rel, const RunRecord& r) {
    auto os = open(rel);
    write_run_csv(os, r);
  }

  /// Two-column "log(x) log(y)" data, skipping nonpositive entries.
  void loglog(const std::string& rel, const std::vector<double>& xs, const std::vector<double>& ys,
              std::size_t max_rows = 2000) {
    auto os = open(rel);
    const std::size_t n = std::min(xs.size(), ys.size());
    const std::size_t stride = n > max_rows ? (n + max_rows - 1) / max_rows : 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (i % stride != 0 && i + 1 != n) continue;
      if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(ys[i])) continue;
      os << format_double(std::log(xs[i])) << ' ' << format_double(std::log(ys[i])) << '\n';
    }
  }

  void summary(const ReportSummary& r) {
    auto os = open("summary.json");
    os << to_json(r).dump(2) << '\n';
  }

  const std::vector<std::string>& files() const { return files_; }

  static Trajectory thin(const Trajectory& tr, std::size_t max_rows) {
    if (max_rows == 0 || tr.size() <= max_rows) return tr;
    const std::size_t stride = (tr.size() + max_rows - 1) / max_rows;
    Trajectory out;
    out.dim = tr.dim;
    out.layout = tr.layout;
    out.stats = tr.stats;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      if (i % stride != 0 && i + 1 != tr.size()) continue;
      out.times.push_back(tr.times[i]);
      out.states.push_back(tr.states[i]);
      out.rates.push_back(tr.rates[i]);
      out.f_gap.push_back(tr.f_gap[i]);
      out.energy.push_back(tr.energy[i]);
    }
    return out;
  }

 private:
  fs::path root_;
  std::vector<std::string> files_;
};

/// Wall-clock timer for runtime fields.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace bregman::harness
