#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "bregman/accel/record.hpp"
#include "bregman/core/functions.hpp"
#include "bregman/core/mirror.hpp"
#include "bregman/core/objective.hpp"
#include "bregman/core/types.hpp"
#include "bregman/taylor/step.hpp"

namespace bregman {

inline constexpr double kDivergenceThreshold = 1e8;

namespace detail {

inline double gap_of(const Objective& f, const Vector& v) {
  return f.min_value() ? f.value(v) - *f.min_value() : std::numeric_limits<double>::quiet_NaN();
}

inline bool escaped(const Vector& v) { return !all_finite(v) || v.norm() > kDivergenceThreshold; }

// Exact level-set radius when the objective provides one, else nullopt.
inline std::optional<double> exact_radius(const Objective& f, const Vector& x0) {
  if (!f.minimizer()) return std::nullopt;
  return f.level_set_radius(f.value(x0));
}

inline double estimated_radius(const Objective& f, const std::vector<Vector>& xs) {
  double r = 0.0;
  for (const auto& v : xs) r = std::max(r, (v - *f.minimizer()).norm());
  return 1.1 * r;
}

}  // namespace detail

/// Fills in the default C and mirror and validates the configuration.
inline AccelConfig resolve(AccelConfig cfg, Index dim) {
  if (cfg.p < 2 || cfg.p > 4) throw CapabilityError("accelerated: p must be 2, 3, or 4");
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) throw InputError("accelerated: epsilon must be positive");
  if (!(cfg.N > 1.0)) throw InputError("accelerated: N must exceed 1");
  if (cfg.x0.size() != dim) throw InputError("accelerated: x0 has wrong dimension");
  require_finite(cfg.x0, "accelerated x0");
  if (!cfg.C) cfg.C = cfg.max_C();
  if (!(*cfg.C > 0.0)) throw InputError("accelerated: C must be positive");
  if (*cfg.C > cfg.max_C() * (1.0 + 1e-12)) {
    throw PreconditionError("accelerated: C exceeds M^{p-1}/p^p");
  }
  if (!cfg.mirror) {
    cfg.mirror = cfg.p == 2 ? make_euclidean_mirror() : make_scaled_pth_power_mirror(cfg.p, cfg.x0);
  }
  const auto& uc = cfg.mirror->uniform_convexity();
  if (uc.order != cfg.p || uc.sigma < 1.0 - 1e-12) {
    throw PreconditionError("accelerated: mirror map must be 1-uniformly convex of order p");
  }
  return cfg;
}

/// psi_k(x) = C p sum_{i<=k} i^{(p-1)} [f(y_i) - f* + <grad f(y_i), x - y_i>] + D_h(x, x0)/eps,
/// summed directly from the record (f shifted by f* when known).
inline double estimate_sequence_value(const RunRecord& r, const AccelConfig& cfg, const Vector& x, std::size_t k) {
  if (k >= r.y.size()) throw InputError("estimate_sequence_value: k out of range");
  const double shift = r.f_star.value_or(0.0);
  CompensatedSum s;
  for (std::size_t i = 1; i <= k; ++i) {
    const double w = *cfg.C * cfg.p * rising_factorial(static_cast<std::int64_t>(i), cfg.p - 1);
    s.add(w * (r.f_y[i] - shift));
    s.add(w * r.grad_y[i].dot(x - r.y[i]));
  }
  s.add(bregman_divergence(*cfg.mirror, x, cfg.x0) / cfg.epsilon);
  return s.value();
}

/// Gradient of psi_k at x; returns the norm and, through `scale`, the size of the linear part.
inline double estimate_sequence_gradient_norm(const RunRecord& r, const AccelConfig& cfg, const Vector& x,
                                              std::size_t k, double* scale = nullptr) {
  if (k >= r.y.size()) throw InputError("estimate_sequence_gradient_norm: k out of range");
  Vector lin = Vector::Zero(x.size());
  for (std::size_t i = 1; i <= k; ++i) {
    lin += (*cfg.C * cfg.p * rising_factorial(static_cast<std::int64_t>(i), cfg.p - 1)) * r.grad_y[i];
  }
  if (scale) *scale = lin.norm();
  return (lin + (cfg.mirror->gradient(x) - cfg.mirror->gradient(cfg.x0)) / cfg.epsilon).norm();
}

/// x_{k+1} = G_{p,eps,N}(x_k), k = 0..K-1. Records the descent bound
/// p^{p-1}(N+1)R^p/(eps k^{p-1}) and the right side of the gap recursion.
inline RunRecord higher_order_descent(const Objective& f, const StepConfig& cfg, const Vector& x0, std::size_t K) {
  cfg.validate();
  RunRecord r;
  r.method = "higher_order_descent";
  r.p = cfg.p;
  r.epsilon = cfg.epsilon;
  r.N = cfg.N;
  r.f_star = f.min_value();
  Vector x = x0;
  r.x.push_back(x);
  r.gap_x.push_back(detail::gap_of(f, x));
  for (std::size_t k = 0; k < K; ++k) {
    StepResult st;
    try {
      st = g_step(f, x, cfg);
    } catch (const SolverError& e) {
      r.termination = Termination::solver_error;
      r.termination_k = k;
      r.message = e.what();
      break;
    }
    r.certs.push_back(st.cert);
    x = st.y;
    if (detail::escaped(x)) {
      r.termination = Termination::diverged;
      r.termination_k = k + 1;
      break;
    }
    r.x.push_back(x);
    r.gap_x.push_back(detail::gap_of(f, x));
  }
  if (f.minimizer()) {
    r.R = detail::exact_radius(f, x0);
    if (!r.R) r.R = detail::estimated_radius(f, r.x);
    const double Rp = std::pow(*r.R, cfg.p);
    const double q = 1.0 / (cfg.p - 1);
    r.bound.push_back(std::numeric_limits<double>::infinity());
    for (std::size_t k = 1; k < r.x.size(); ++k) {
      r.bound.push_back(std::pow(cfg.p, cfg.p - 1) * (cfg.N + 1.0) * Rp /
                        (cfg.epsilon * std::pow(static_cast<double>(k), cfg.p - 1)));
    }
    for (std::size_t k = 0; k + 1 < r.x.size(); ++k) {
      const double d = std::max(r.gap_x[k], 0.0);
      r.recursion_rhs.push_back(d - (cfg.p - 1.0) / cfg.p *
                                        std::pow(cfg.epsilon * std::pow(d, cfg.p) / ((cfg.N + 1.0) * Rp), q));
    }
  }
  return r;
}

/// Direct discretization of the polynomial flow, started at k0 = p + 1:
///   grad h(z_k) = grad h(z_{k-1}) - eps C p k^{p-1} grad f(x_k),
///   x_{k+1} = (p/k) z_k + ((k-p)/k) x_k.
inline RunRecord naive_discretization(const Objective& f, const MirrorPtr& h, int p, double C, double epsilon,
                                      const Vector& x0, std::size_t K) {
  if (p < 2) throw InputError("naive_discretization: p must be at least 2");
  if (!(C > 0.0) || !(epsilon > 0.0)) throw InputError("naive_discretization: C and epsilon must be positive");
  RunRecord r;
  r.method = "naive_discretization";
  r.p = p;
  r.epsilon = epsilon;
  r.C = C;
  r.mirror = h->name();
  r.f_star = f.min_value();
  const std::size_t k0 = static_cast<std::size_t>(p) + 1;
  r.k_start = k0;
  Vector x = x0, z = x0;
  Vector w = h->gradient(z);
  for (std::size_t k = k0; k < k0 + K; ++k) {
    r.x.push_back(x);
    r.gap_x.push_back(detail::gap_of(f, x));
    w -= (epsilon * C * p * std::pow(static_cast<double>(k), p - 1)) * f.gradient(x);
    z = h->dual_gradient(w);
    r.z.push_back(z);
    x = (static_cast<double>(p) / k) * z + (static_cast<double>(k - p) / k) * x;
    if (detail::escaped(x) || detail::escaped(z)) {
      r.termination = Termination::diverged;
      r.termination_k = k;
      break;
    }
  }
  return r;
}

/// Rate-matching accelerated method, k = 0..K:
///   x_k = (p/(k-1+p)) z_{k-1} + ((k-1)/(k-1+p)) y_{k-1}   (x_0 = x0),
///   y_k = G_{p,eps,N}(x_k),
///   grad h(z_k) = grad h(z_{k-1}) - eps C p k^{(p-1)} grad f(y_k)   (z_{-1} = x0).
/// Records the estimate-function value and gradient at z_k and the bound
/// D_h(x*, x0)/(C eps k^{(p)}).
inline RunRecord accelerated(const Objective& f, const AccelConfig& config, std::size_t K) {
  const AccelConfig cfg = resolve(config, f.dim());
  const double C = *cfg.C;
  const MirrorMap& h = *cfg.mirror;
  const StepConfig sc{cfg.p, cfg.epsilon, cfg.N};
  RunRecord r;
  r.method = "accelerated";
  r.p = cfg.p;
  r.epsilon = cfg.epsilon;
  r.N = cfg.N;
  r.C = C;
  r.mirror = h.name();
  r.f_star = f.min_value();
  const std::optional<double> D0 =
      f.minimizer() ? std::optional<double>(bregman_divergence(h, *f.minimizer(), cfg.x0)) : std::nullopt;

  Vector w = h.gradient(cfg.x0);
  Vector z = cfg.x0;
  Vector x = cfg.x0;
  for (std::size_t k = 0; k <= K; ++k) {
    if (k >= 1) {
      const double kd = static_cast<double>(k - 1);
      x = (cfg.p / (kd + cfg.p)) * z + (kd / (kd + cfg.p)) * r.y.back();
    }
    StepResult st;
    try {
      st = g_step(f, x, sc);
    } catch (const SolverError& e) {
      r.termination = Termination::solver_error;
      r.termination_k = k;
      r.message = e.what();
      break;
    }
    const Vector gy = f.gradient(st.y);
    if (k >= 1) {
      w -= (cfg.epsilon * C * cfg.p * rising_factorial(static_cast<std::int64_t>(k), cfg.p - 1)) * gy;
      z = h.dual_gradient(w);
    }
    if (detail::escaped(x) || detail::escaped(st.y) || detail::escaped(z)) {
      r.termination = Termination::diverged;
      r.termination_k = k;
      break;
    }
    r.x.push_back(x);
    r.y.push_back(st.y);
    r.z.push_back(z);
    r.grad_y.push_back(gy);
    r.f_y.push_back(f.value(st.y));
    r.gap_x.push_back(detail::gap_of(f, x));
    r.gap_y.push_back(detail::gap_of(f, st.y));
    r.certs.push_back(st.cert);

    const double kp = k == 0 ? 0.0 : rising_factorial(static_cast<std::int64_t>(k), cfg.p);
    r.psi.push_back(estimate_sequence_value(r, cfg, z, k));
    double scale = 0.0;
    r.psi_grad_norm.push_back(estimate_sequence_gradient_norm(r, cfg, z, k, &scale));
    r.psi_grad_scale.push_back(scale);
    r.ckp_fy.push_back(C * kp * (r.f_y.back() - r.f_star.value_or(0.0)));
    r.bound.push_back(D0 ? (k == 0 ? std::numeric_limits<double>::infinity() : *D0 / (C * cfg.epsilon * kp))
                         : std::numeric_limits<double>::quiet_NaN());
  }
  return r;
}

/// x_{k+1} = c delta z_k + (1 - c delta) x_k,
/// grad h(z_{k+1}) = grad h(z_k) - delta c e^{c delta k} grad f(x_k).
/// Diagnostic only: records gaps and <grad f(x_k), x_k - x_{k+1}> / ||grad f(x_k)||.
inline RunRecord exponential_discretization(const Objective& f, const MirrorPtr& h, double c, double delta,
                                            const Vector& x0, std::size_t K) {
  if (!(c > 0.0) || !(delta > 0.0)) throw InputError("exponential_discretization: c and delta must be positive");
  if (c * delta > 1.0) throw InputError("exponential_discretization: c * delta must not exceed 1");
  RunRecord r;
  r.method = "exponential_discretization";
  r.epsilon = delta;
  r.mirror = h->name();
  r.f_star = f.min_value();
  Vector x = x0, z = x0;
  Vector w = h->gradient(z);
  for (std::size_t k = 0; k <= K; ++k) {
    r.x.push_back(x);
    r.z.push_back(z);
    r.gap_x.push_back(detail::gap_of(f, x));
    if (k == K) break;
    const Vector g = f.gradient(x);
    const Vector xn = c * delta * z + (1.0 - c * delta) * x;
    const double gn = g.norm();
    r.progress_ratio.push_back(gn > 0.0 ? g.dot(x - xn) / gn : 0.0);
    w -= (delta * c * std::exp(c * delta * static_cast<double>(k))) * g;
    z = h->dual_gradient(w);
    x = xn;
    if (detail::escaped(x) || detail::escaped(z)) {
      r.termination = Termination::diverged;
      r.termination_k = k + 1;
      break;
    }
  }
  return r;
}

/// Restarted accelerated method for sigma-uniformly convex f of order p: epochs of
/// m = ceil(8p / kappa^{1/p}) iterations (kappa = eps sigma) with N = 2, C = 1/(4p)^p
/// and d_p anchored at the epoch's start; each epoch's y_m starts the next one.
/// A trailing G_{p,eps,2} step gives the reported point.
inline RunRecord restart_accelerated(const Objective& f, double epsilon, const Vector& x0, std::size_t epochs) {
  const auto& uc = f.uniform_convexity();
  if (!uc) throw PreconditionError("restart_accelerated: objective declares no uniform convexity");
  if (!f.minimizer() || !f.min_value()) throw PreconditionError("restart_accelerated: minimizer must be known");
  const int p = uc->order;
  const double kappa = epsilon * uc->sigma;
  if (!(kappa > 0.0 && kappa < 1.0)) throw PreconditionError("restart_accelerated: kappa = eps sigma must be in (0,1)");
  const std::size_t m = static_cast<std::size_t>(std::ceil(8.0 * p / std::pow(kappa, 1.0 / p)));
  const Vector& xs = *f.minimizer();

  RunRecord r;
  r.method = "restart_accelerated";
  r.p = p;
  r.epsilon = epsilon;
  r.N = 2.0;
  r.C = 1.0 / std::pow(4.0 * p, p);
  r.mirror = "scaled_pth_power";
  r.f_star = f.min_value();
  RestartSummary rs;
  rs.epoch_length = m;
  rs.kappa = kappa;
  rs.epochs = epochs;

  Vector xhat = x0;
  rs.dist_p.push_back(std::pow((xhat - xs).norm(), p));
  for (std::size_t e = 0; e < epochs; ++e) {
    AccelConfig cfg;
    cfg.p = p;
    cfg.epsilon = epsilon;
    cfg.N = 2.0;
    cfg.C = r.C;
    cfg.x0 = xhat;
    cfg.mirror = make_scaled_pth_power_mirror(p, xhat);
    RunRecord ep = accelerated(f, cfg, m);
    for (std::size_t i = 0; i < ep.y.size(); ++i) {
      r.x.push_back(ep.x[i]);
      r.y.push_back(ep.y[i]);
      r.z.push_back(ep.z[i]);
      r.gap_x.push_back(ep.gap_x[i]);
      r.gap_y.push_back(ep.gap_y[i]);
      r.certs.push_back(ep.certs[i]);
    }
    if (ep.termination != Termination::completed) {
      r.termination = ep.termination;
      r.termination_k = e * (m + 1) + ep.termination_k.value_or(0);
      r.message = ep.message;
      r.restart = rs;
      return r;
    }
    xhat = ep.y.back();
    rs.dist_p.push_back(std::pow((xhat - xs).norm(), p));
    rs.contraction.push_back(rs.dist_p[e] > 0.0 ? rs.dist_p[e + 1] / rs.dist_p[e] : 0.0);
  }
  const Vector yhat = g_step(f, xhat, StepConfig{p, epsilon, 2.0}).y;
  rs.total_iters = epochs * m;
  rs.final_gap = f.value(yhat) - *f.min_value();
  rs.final_bound = 3.0 * rs.dist_p.front() /
                   (epsilon * p * std::exp(static_cast<double>(rs.total_iters) / static_cast<double>(m)));
  r.restart = rs;
  return r;
}

}  // namespace bregman
