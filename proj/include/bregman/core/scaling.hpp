#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "bregman/core/types.hpp"

namespace bregman {

struct PolynomialFamily {
  double p;
  double C;
};
struct ExponentialFamily {
  double c;
};
struct CustomFamily {
  std::string label;
};
using FamilyTag = std::variant<PolynomialFamily, ExponentialFamily, CustomFamily>;

/// The weight functions (alpha_t, beta_t, gamma_t) of the Lagrangian with their
/// analytic time derivatives.
struct ScalingTriple {
  using Fn = std::function<double(double)>;

  Fn alpha, beta, gamma;
  Fn alpha_dot, beta_dot, gamma_dot;
  /// Earliest admissible time. Polynomial triples are singular at t = 0.
  double valid_from = -std::numeric_limits<double>::infinity();
  FamilyTag family = CustomFamily{"custom"};
};

/// alpha = log p - log t, beta = p log t + log C, gamma = p log t.
inline ScalingTriple polynomial_triple(double p, double C = 1.0, double t_min = 0.1) {
  if (!(p > 0.0)) throw InputError("polynomial triple: p must be positive");
  if (!(C > 0.0)) throw InputError("polynomial triple: C must be positive");
  if (!(t_min > 0.0)) throw InputError("polynomial triple: t_min must be positive");
  ScalingTriple s;
  s.alpha = [p](double t) { return std::log(p) - std::log(t); };
  s.beta = [p, C](double t) { return p * std::log(t) + std::log(C); };
  s.gamma = [p](double t) { return p * std::log(t); };
  s.alpha_dot = [](double t) { return -1.0 / t; };
  s.beta_dot = [p](double t) { return p / t; };
  s.gamma_dot = [p](double t) { return p / t; };
  s.valid_from = t_min;
  s.family = PolynomialFamily{p, C};
  return s;
}

/// alpha = log c, beta = gamma = c t.
inline ScalingTriple exponential_triple(double c) {
  if (!(c > 0.0)) throw InputError("exponential triple: c must be positive");
  ScalingTriple s;
  s.alpha = [c](double) { return std::log(c); };
  s.beta = [c](double t) { return c * t; };
  s.gamma = [c](double t) { return c * t; };
  s.alpha_dot = [](double) { return 0.0; };
  s.beta_dot = [c](double) { return c; };
  s.gamma_dot = [c](double) { return c; };
  s.family = ExponentialFamily{c};
  return s;
}

/// Parameters of x'' + (r/t) x' + grad f = 0 in the Euclidean case:
/// alpha = log(r-1) - log t, beta = 2 log t - 2 log(r-1), gamma = (r-1) log t.
inline ScalingTriple euclidean_r_triple(double r, double t_min = 0.1) {
  if (!(r > 1.0)) throw InputError("r triple: r must exceed 1");
  ScalingTriple s;
  const double a = std::log(r - 1.0);
  s.alpha = [a](double t) { return a - std::log(t); };
  s.beta = [a](double t) { return 2.0 * std::log(t) - 2.0 * a; };
  s.gamma = [r](double t) { return (r - 1.0) * std::log(t); };
  s.alpha_dot = [](double t) { return -1.0 / t; };
  s.beta_dot = [](double t) { return 2.0 / t; };
  s.gamma_dot = [r](double t) { return (r - 1.0) / t; };
  s.valid_from = t_min;
  s.family = CustomFamily{"euclidean_r"};
  return s;
}

/// Massless family: alpha = -log m, beta = log m, gamma = t/m.
inline ScalingTriple massless_triple(double m) {
  if (!(m > 0.0)) throw InputError("massless triple: m must be positive");
  ScalingTriple s;
  s.alpha = [m](double) { return -std::log(m); };
  s.beta = [m](double) { return std::log(m); };
  s.gamma = [m](double t) { return t / m; };
  s.alpha_dot = [](double) { return 0.0; };
  s.beta_dot = [](double) { return 0.0; };
  s.gamma_dot = [m](double) { return 1.0 / m; };
  s.family = CustomFamily{"massless"};
  return s;
}

struct IdealScalingReport {
  bool beta_ok = true;   ///< beta_dot <= e^alpha everywhere on the grid
  bool gamma_ok = true;  ///< gamma_dot == e^alpha everywhere on the grid
  bool beta_tight = true;  ///< beta_dot == e^alpha everywhere on the grid
  double worst_beta_excess = -std::numeric_limits<double>::infinity();
  double worst_gamma_defect = 0.0;
};

inline IdealScalingReport ideal_scaling_check(const ScalingTriple& s, const std::vector<double>& grid,
                                              double tol = 1e-10) {
  IdealScalingReport rep;
  for (double t : grid) {
    const double ea = std::exp(s.alpha(t));
    const double bd = s.beta_dot(t);
    const double gd = s.gamma_dot(t);
    rep.worst_beta_excess = std::max(rep.worst_beta_excess, bd - ea);
    rep.worst_gamma_defect = std::max(rep.worst_gamma_defect, std::abs(gd - ea));
    if (!(bd <= ea + tol)) rep.beta_ok = false;
    if (!(std::abs(gd - ea) <= tol)) rep.gamma_ok = false;
    if (!(std::abs(bd - ea) <= tol)) rep.beta_tight = false;
  }
  return rep;
}

}  // namespace bregman
