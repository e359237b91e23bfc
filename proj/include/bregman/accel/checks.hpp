#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bregman/accel/record.hpp"
#include "bregman/core/check.hpp"
#include "bregman/core/objective.hpp"

namespace bregman {

/// Gaps at or below this are at the resolution of double-precision f-values;
/// relative-progress checks skip them.
inline constexpr double kGapFloor = 1e-10;

namespace detail {
inline void require_completed(CheckResult& c, const RunRecord& r) {
  if (r.termination != Termination::completed) {
    c.fail(std::string("run terminated: ") + to_string(r.termination) + (r.message.empty() ? "" : " (" + r.message + ")"));
  }
}
}  // namespace detail

/// f(y_k) - f* <= D_h(x*, x0) / (C eps k^{(p)}) for k >= 1.
inline CheckResult check_accelerated_bound(const RunRecord& r, double slack = 1e-9) {
  auto c = make_check("accelerated_bound");
  detail::require_completed(c, r);
  for (std::size_t k = 1; k < r.gap_y.size(); ++k) c.observe(r.gap_y[k], r.bound[k], k, slack);
  return c;
}

/// psi_k(z_k) >= C k^{(p)} (f(y_k) - f*) and z_k minimizes psi_k.
inline CheckResult check_estimate_sequence(const RunRecord& r, double value_slack = 1e-9, double grad_tol = 1e-8) {
  auto c = make_check("estimate_sequence");
  detail::require_completed(c, r);
  for (std::size_t k = 0; k < r.psi.size(); ++k) {
    c.observe(r.ckp_fy[k], r.psi[k], k, value_slack);
    c.observe(r.psi_grad_norm[k], grad_tol, k);
  }
  return c;
}

/// Both progress inequalities at every recorded step.
inline CheckResult check_step_certificates(const RunRecord& r) {
  auto c = make_check("step_certificates");
  for (std::size_t k = 0; k < r.certs.size(); ++k) {
    const auto& s = r.certs[k];
    if (!s.applicable) continue;
    c.observe(s.lemma1_lower, s.progress, k, kLemmaSlack);
    c.observe(s.move_lower, s.move_norm, k, kLemmaSlack);
    c.observe(s.move_norm, s.move_upper, k, kLemmaSlack);
  }
  return c;
}

/// f(x_{k+1}) <= f(x_k) + slack.
inline CheckResult check_descent(const RunRecord& r, double slack = 1e-10) {
  auto c = make_check("descent");
  detail::require_completed(c, r);
  for (std::size_t k = 0; k + 1 < r.gap_x.size(); ++k) c.observe(r.gap_x[k + 1], r.gap_x[k], k, slack);
  return c;
}

/// f(x_k) - f* <= p^{p-1}(N+1)R^p / (eps k^{p-1}) for k >= 1.
inline CheckResult check_descent_bound(const RunRecord& r, double slack = 1e-9) {
  auto c = make_check("descent_bound");
  detail::require_completed(c, r);
  for (std::size_t k = 1; k < r.gap_x.size() && k < r.bound.size(); ++k) c.observe(r.gap_x[k], r.bound[k], k, slack);
  return c;
}

/// delta_{k+1} <= delta_k - ((p-1)/p)(eps delta_k^p / ((N+1)R^p))^{1/(p-1)}, skipped below the gap floor.
inline CheckResult check_gap_recursion(const RunRecord& r, double slack = 1e-9) {
  auto c = make_check("gap_recursion");
  detail::require_completed(c, r);
  for (std::size_t k = 0; k < r.recursion_rhs.size(); ++k) {
    if (r.gap_x[k] <= kGapFloor) continue;
    c.observe(r.gap_x[k + 1], r.recursion_rhs[k], k, slack);
  }
  return c;
}

struct UniformConvexityReport {
  CheckResult geometric_bound;
  CheckResult energy_increment;
};

/// For the plain method on sigma-uniformly convex f (N > 1):
///   f(x_{k+1}) - f* <= (N+1)||x0 - x*||^p / (eps p (1 + L kappa^{1/(p-1)})^k),  L = M(p, N),
///   e_{k+1} - e_k >= (1/p)(eps / ((N+1)R^p))^{1/(p-1)},  e_k = (f(x_k) - f*)^{-1/(p-1)}.
inline UniformConvexityReport uniformly_convex_descent_rate_check(const RunRecord& r, const Objective& f) {
  UniformConvexityReport rep{make_check("uniformly_convex_bound"), make_check("energy_increment")};
  const auto& uc = f.uniform_convexity();
  if (!uc || uc->order != r.p || !f.minimizer()) {
    rep.geometric_bound.fail("objective lacks matching uniform convexity or minimizer");
    rep.energy_increment.fail("objective lacks matching uniform convexity or minimizer");
    return rep;
  }
  if (!(r.N > 1.0)) {
    rep.geometric_bound.fail("requires N > 1");
    rep.energy_increment.fail("requires N > 1");
    return rep;
  }
  detail::require_completed(rep.geometric_bound, r);
  const int p = r.p;
  const double q = 1.0 / (p - 1);
  const double kappa = r.epsilon * uc->sigma;
  const double L = lemma1_constant(p, r.N);
  const double d0 = std::pow((r.x.front() - *f.minimizer()).norm(), p);
  const double factor = 1.0 + L * std::pow(kappa, q);
  for (std::size_t k = 0; k + 1 < r.gap_x.size(); ++k) {
    const double bound = (r.N + 1.0) * d0 / (r.epsilon * p * std::pow(factor, static_cast<double>(k)));
    rep.geometric_bound.observe(r.gap_x[k + 1], bound, k, 1e-12);
  }
  if (r.R) {
    const double inc = std::pow(r.epsilon / ((r.N + 1.0) * std::pow(*r.R, p)), q) / p;
    for (std::size_t k = 0; k + 1 < r.gap_x.size(); ++k) {
      if (r.gap_x[k + 1] <= kGapFloor) break;
      const double e0 = std::pow(r.gap_x[k], -q), e1 = std::pow(r.gap_x[k + 1], -q);
      rep.energy_increment.observe(inc, e1 - e0, k, 1e-9 * (1.0 + std::abs(e1)));
    }
  } else {
    rep.energy_increment.fail("level-set radius unavailable");
  }
  return rep;
}

struct RestartReport {
  CheckResult contraction;
  CheckResult final_bound;
};

inline RestartReport check_restart(const RunRecord& r) {
  RestartReport rep{make_check("restart_contraction"), make_check("restart_bound")};
  if (!r.restart) {
    rep.contraction.fail("record has no restart summary");
    rep.final_bound.fail("record has no restart summary");
    return rep;
  }
  detail::require_completed(rep.contraction, r);
  detail::require_completed(rep.final_bound, r);
  for (std::size_t e = 0; e < r.restart->contraction.size(); ++e) {
    rep.contraction.observe(r.restart->contraction[e], std::exp(-1.0), e);
  }
  rep.final_bound.observe(r.restart->final_gap, r.restart->final_bound, 0, 1e-12);
  return rep;
}

}  // namespace bregman
