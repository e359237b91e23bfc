#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bregman/core/mirror.hpp"
#include "bregman/core/objective.hpp"
#include "bregman/flows/integrate.hpp"
#include "bregman/harness/report.hpp"

namespace bregman::harness {

enum class ExperimentKind { flow, optimize, compare, dilation_check, restart, naive_demo, acceptance };

inline const std::vector<std::pair<std::string, ExperimentKind>>& experiment_names() {
  static const std::vector<std::pair<std::string, ExperimentKind>> names = {
      {"flow", ExperimentKind::flow},
      {"optimize", ExperimentKind::optimize},
      {"compare", ExperimentKind::compare},
      {"dilation-check", ExperimentKind::dilation_check},
      {"restart", ExperimentKind::restart},
      {"naive-demo", ExperimentKind::naive_demo},
      {"acceptance", ExperimentKind::acceptance},
  };
  return names;
}

inline std::string to_string(ExperimentKind k) {
  for (const auto& [name, kind] : experiment_names()) {
    if (kind == k) return name;
  }
  return "unknown";
}

inline ExperimentKind parse_experiment(std::string name) {
  for (auto& ch : name) {
    if (ch == '_') ch = '-';
  }
  for (const auto& [n, kind] : experiment_names()) {
    if (n == name) return kind;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

struct ProblemSpec {
  std::string id = "ill_conditioned_quadratic";
  std::vector<double> lambda;  ///< quadratic eigenvalues
  Index dim = 0;               ///< 0 picks the problem's default
  Index rows = 20;             ///< least squares
  Index terms = 6;             ///< log-sum-exp
  double p = 4.0;              ///< power norm exponent
  double c = 0.1;              ///< quartic weight
};

struct MethodSpec {
  std::string flow = "el";          ///< el | hamiltonian | rescaled | natural | massless | euclidean_r
  std::string algorithm = "accelerated";  ///< accelerated | descent | exponential
  std::string triple = "polynomial";      ///< polynomial | exponential
  std::string mirror = "auto";            ///< auto | euclidean | pth_power | scaled_pth_power
  std::vector<double> mirror_anchor;
  double mirror_p = 0.0;  ///< 0 means "use p"
  int p = 2;
  std::optional<double> epsilon;
  std::optional<double> delta;
  double N = 2.0;
  std::optional<double> C;
  double c = 1.0;
  double m = 0.01;
  double r = 3.0;
  std::string force = "unit";  ///< unit | matched
  std::size_t K = 2000;
  std::size_t epochs = 3;
};

struct IntegrationSpec {
  std::string method = "rk4_adaptive";
  double t0 = 0.1;
  double t_end = 50.0;
  std::size_t steps = 10000;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;

  IntegrateControls controls() const {
    IntegrateControls c = method == "rk4" ? IntegrateControls::fixed(steps) : IntegrateControls::adaptive(rel_tol, abs_tol);
    return c;
  }
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::acceptance;
  ProblemSpec problem;
  MethodSpec method;
  IntegrationSpec integration;
  std::vector<double> x0;
  std::string out = "out";
  std::uint64_t seed = 7;
  std::string scale = "full";
};

namespace detail {

template <class T>
void read(const json& j, const char* key, T& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v;
  read(j, key, v);
  dst = v;
}

inline void reject_unknown(const json& j, const std::vector<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known) ok = ok || k == it.key();
    if (!ok) throw ConfigError("unknown field '" + it.key() + "' in " + where);
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  detail::reject_unknown(j, {"experiment", "problem", "method", "integration", "x0", "out", "seed", "scale"}, "config");
  ExperimentConfig cfg;
  if (j.contains("experiment")) cfg.kind = parse_experiment(j.at("experiment").get<std::string>());
  if (j.contains("problem")) {
    const json& p = j.at("problem");
    if (p.is_string()) {
      cfg.problem.id = p.get<std::string>();
    } else {
      detail::reject_unknown(p, {"id", "lambda", "dim", "rows", "terms", "p", "c"}, "problem");
      detail::read(p, "id", cfg.problem.id);
      detail::read(p, "lambda", cfg.problem.lambda);
      detail::read(p, "dim", cfg.problem.dim);
      detail::read(p, "rows", cfg.problem.rows);
      detail::read(p, "terms", cfg.problem.terms);
      detail::read(p, "p", cfg.problem.p);
      detail::read(p, "c", cfg.problem.c);
    }
  }
  if (j.contains("method")) {
    const json& m = j.at("method");
    detail::reject_unknown(m,
                           {"flow", "algorithm", "triple", "mirror", "mirror_anchor", "mirror_p", "p", "epsilon", "delta",
                            "N", "C", "c", "m", "r", "force", "K", "epochs"},
                           "method");
    auto& s = cfg.method;
    detail::read(m, "flow", s.flow);
    detail::read(m, "algorithm", s.algorithm);
    detail::read(m, "triple", s.triple);
    detail::read(m, "mirror", s.mirror);
    detail::read(m, "mirror_anchor", s.mirror_anchor);
    detail::read(m, "mirror_p", s.mirror_p);
    detail::read(m, "p", s.p);
    detail::read(m, "epsilon", s.epsilon);
    detail::read(m, "delta", s.delta);
    detail::read(m, "N", s.N);
    detail::read(m, "C", s.C);
    detail::read(m, "c", s.c);
    detail::read(m, "m", s.m);
    detail::read(m, "r", s.r);
    detail::read(m, "force", s.force);
    detail::read(m, "K", s.K);
    detail::read(m, "epochs", s.epochs);
  }
  if (j.contains("integration")) {
    const json& i = j.at("integration");
    detail::reject_unknown(i, {"method", "t0", "t_end", "steps", "rel_tol", "abs_tol"}, "integration");
    detail::read(i, "method", cfg.integration.method);
    detail::read(i, "t0", cfg.integration.t0);
    detail::read(i, "t_end", cfg.integration.t_end);
    detail::read(i, "steps", cfg.integration.steps);
    detail::read(i, "rel_tol", cfg.integration.rel_tol);
    detail::read(i, "abs_tol", cfg.integration.abs_tol);
    if (cfg.integration.method != "rk4" && cfg.integration.method != "rk4_adaptive") {
      throw ConfigError("integration.method must be rk4 or rk4_adaptive");
    }
  }
  // The naive contrast is only interesting where the naive scheme actually diverges.
  if (cfg.kind == ExperimentKind::naive_demo) {
    const json m = j.contains("method") ? j.at("method") : json::object();
    if (!m.contains("p")) cfg.method.p = 3;
    if (!m.contains("epsilon")) cfg.method.epsilon = 0.01;
    if (!m.contains("mirror")) cfg.method.mirror = "euclidean";
    if (!m.contains("K")) cfg.method.K = 100000;
  }
  detail::read(j, "x0", cfg.x0);
  detail::read(j, "out", cfg.out);
  detail::read(j, "seed", cfg.seed);
  detail::read(j, "scale", cfg.scale);
  if (cfg.scale != "quick" && cfg.scale != "full") throw ConfigError("scale must be quick or full");
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

/// Builds the configured objective; ids follow the built-in catalog plus
/// `zero` and `quadratic_plus_quartic`.
inline ObjectivePtr make_problem(const ProblemSpec& s, std::uint64_t seed) {
  if (s.id == "quadratic" || s.id == "ill_conditioned_quadratic") {
    if (!s.lambda.empty()) return make_diagonal_quadratic(s.lambda);
    return make_ill_conditioned_quadratic();
  }
  if (s.id == "least_squares") return make_least_squares(s.rows, s.dim > 0 ? s.dim : 10, seed);
  if (s.id == "log_sum_exp") return make_log_sum_exp(s.terms, s.dim > 0 ? s.dim : 3, seed);
  if (s.id == "power_norm") return make_power_norm(s.dim > 0 ? s.dim : 2, s.p);
  if (s.id == "zero") return std::make_shared<ZeroObjective>(s.dim > 0 ? s.dim : 2);
  if (s.id == "quadratic_plus_quartic") return make_quadratic_plus_quartic(s.dim > 0 ? s.dim : 2, s.c);
  throw ConfigError("unknown problem id '" + s.id + "'");
}

/// Mirror map for a method; "auto" is Euclidean for p = 2 and d_p anchored at x0 otherwise.
inline MirrorPtr make_mirror(const MethodSpec& m, const Vector& x0) {
  const double order = m.mirror_p > 0.0 ? m.mirror_p : static_cast<double>(m.p);
  Vector anchor = x0;
  if (!m.mirror_anchor.empty()) {
    if (static_cast<Index>(m.mirror_anchor.size()) != x0.size()) throw ConfigError("mirror_anchor has wrong dimension");
    anchor = Eigen::Map<const Vector>(m.mirror_anchor.data(), static_cast<Index>(m.mirror_anchor.size()));
  }
  if (m.mirror == "auto") return m.p == 2 ? make_euclidean_mirror() : make_scaled_pth_power_mirror(order, anchor);
  for (const auto& e : builtin_mirror_maps()) {
    if (e.id == m.mirror) return e.make(anchor, order);
  }
  throw ConfigError("unknown mirror id '" + m.mirror + "'");
}

inline Vector initial_point(const ExperimentConfig& cfg, const Objective& f) {
  if (cfg.x0.empty()) return Vector::Ones(f.dim());
  if (static_cast<Index>(cfg.x0.size()) != f.dim()) throw ConfigError("x0 has wrong dimension for the problem");
  return Eigen::Map<const Vector>(cfg.x0.data(), static_cast<Index>(cfg.x0.size()));
}

}  // namespace bregman::harness
