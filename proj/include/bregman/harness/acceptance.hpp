#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bregman/accel.hpp"
#include "bregman/core.hpp"
#include "bregman/flows.hpp"
#include "bregman/harness/report.hpp"
#include "bregman/taylor.hpp"

namespace bregman::harness {

namespace suite {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

/// Standard quadratic benchmark, diag(1, 10), from x0 = (1, 1).
inline std::shared_ptr<Quadratic> quadratic() { return make_ill_conditioned_quadratic(); }
inline Vector quadratic_x0() { return vec2(1.0, 1.0); }
/// Anchor of the non-Euclidean mirror, away from the minimizer so its Hessian stays regular there.
inline Vector far_anchor() { return vec2(-3.0, 4.0); }

/// eps = (p-1)!/L_{p-1}, or 1 when the Taylor model of that order is exact (L = 0).
inline double declared_epsilon(const Objective& f, int p) {
  const double e = smoothness_epsilon(f, p);
  return std::isfinite(e) ? e : 1.0;
}

inline double sup_distance(const std::vector<Vector>& a, const std::vector<Vector>& b, Index dim) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    s = std::max(s, (a[i].head(dim) - b[i].head(dim)).norm());
  }
  return s;
}

struct Context {
  bool quick = false;
  std::uint64_t seed = 7;

  std::size_t accel_K() const { return quick ? 500 : 2000; }
  std::size_t accel_K_p4() const { return quick ? 200 : 500; }
  std::size_t plain_K() const { return quick ? 500 : 2000; }
  std::size_t sweep_points() const { return quick ? 20 : 100; }

  // Runs shared between criteria, filled on first use.
  std::vector<std::pair<std::string, Trajectory>> continuous_runs;
  std::vector<std::pair<std::string, RunRecord>> accelerated_runs;
};

struct Criterion {
  int id;
  std::string name;
  std::function<void(Context&, OutputDir&, CheckEntry&)> run;
};

// ---- shared runs -----------------------------------------------------------------

inline void ensure_continuous_runs(Context& ctx) {
  if (!ctx.continuous_runs.empty()) return;
  auto f = quadratic();
  for (int p = 2; p <= 4; ++p) {
    for (int pth = 0; pth < 2; ++pth) {
      MirrorPtr h = pth ? make_pth_power_mirror(std::max(p, 3), far_anchor()) : make_euclidean_mirror();
      auto sys = build_el_system(h, f, polynomial_triple(p, 1.0));
      const std::string tag = "p" + std::to_string(p) + "_" + (pth ? "pth_power" : "euclidean");
      ctx.continuous_runs.emplace_back(tag, integrate(sys, quadratic_x0(), 0.1, 50.0, IntegrateControls::adaptive()));
    }
  }
}

inline void ensure_accelerated_runs(Context& ctx) {
  if (!ctx.accelerated_runs.empty()) return;
  auto q = quadratic();
  auto ls = make_least_squares(20, 10, ctx.seed);
  struct Job {
    std::string tag;
    ObjectivePtr f;
    int p;
    Vector x0;
    std::size_t K;
  };
  const std::vector<Job> jobs = {
      {"quadratic_p2", q, 2, quadratic_x0(), ctx.accel_K()},
      {"quadratic_p3", q, 3, quadratic_x0(), ctx.accel_K()},
      {"least_squares_p2", ls, 2, Vector::Zero(10), ctx.accel_K()},
      {"least_squares_p3", ls, 3, Vector::Zero(10), ctx.accel_K()},
      {"quadratic_p4", q, 4, quadratic_x0(), ctx.accel_K_p4()},
  };
  for (const auto& j : jobs) {
    AccelConfig cfg;
    cfg.p = j.p;
    cfg.epsilon = declared_epsilon(*j.f, j.p);
    cfg.x0 = j.x0;
    ctx.accelerated_runs.emplace_back(j.tag, accelerated(*j.f, cfg, j.K));
  }
}

// ---- criteria --------------------------------------------------------------------

inline void continuous_rate(Context& ctx, OutputDir& out, CheckEntry& e) {
  ensure_continuous_runs(ctx);
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (const auto& [tag, tr] : ctx.continuous_runs) {
    const int p = tag[1] - '0';
    const double slope = fit_rate(tr.times, tr.f_gap, 1.0, 50.0, kGapFloor);
    worst_excess = std::max(worst_excess, slope + p);
    e.require(slope <= -p + 0.3, tag + " slope " + fmt(slope) + " <= " + fmt(-p + 0.3));
    const auto s = polynomial_triple(p, 1.0);
    auto c = make_check(tag + " gap <= E_t0 e^{-beta_t}");
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double bound = tr.energy.front() * std::exp(-s.beta(tr.times[i]));
      c.observe(tr.f_gap[i], bound * (1.0 + 1e-6), i);
    }
    e.absorb(c);
    out.trajectory("c01_continuous_rate/" + tag + ".csv", tr);
    out.loglog("c01_continuous_rate/" + tag + "_gap.dat", tr.times, tr.f_gap);
  }
  e.measured = worst_excess;
  e.bound = 0.3;
}

inline CheckResult energy_monotone(const std::string& name, const Trajectory& tr, double* worst = nullptr) {
  auto c = make_check(name + " energy nonincreasing");
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    c.observe(tr.energy[i + 1], tr.energy[i] + 1e-6 * std::abs(tr.energy[i]), i);
    if (worst) *worst = std::max(*worst, (tr.energy[i + 1] - tr.energy[i]) / std::abs(tr.energy[i]));
  }
  return c;
}

inline void lyapunov(Context& ctx, OutputDir& out, CheckEntry& e) {
  ensure_continuous_runs(ctx);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [tag, tr] : ctx.continuous_runs) e.absorb(energy_monotone(tag, tr, &worst));
  auto f = quadratic();
  for (int pth = 0; pth < 2; ++pth) {
    MirrorPtr h = pth ? make_pth_power_mirror(3, far_anchor()) : make_euclidean_mirror();
    const std::string tag = std::string("exponential_c1_") + (pth ? "pth_power" : "euclidean");
    auto tr = integrate(build_el_system(h, f, exponential_triple(1.0)), quadratic_x0(), 0.0, 10.0,
                        IntegrateControls::adaptive());
    e.absorb(energy_monotone(tag, tr, &worst));
    out.trajectory("c02_lyapunov/" + tag + ".csv", tr);
  }
  e.measured = worst;
  e.bound = 1e-6;
}

inline void time_dilation(Context&, OutputDir& out, CheckEntry& e) {
  auto f = quadratic();
  auto h = make_euclidean_mirror();
  const auto ctl = IntegrateControls::adaptive(1e-10, 1e-12);
  double worst = 0.0;
  for (int p = 3; p <= 4; ++p) {
    const auto tau = TimeDilation::power(p / 2.0);
    auto base = integrate(build_el_system(h, f, polynomial_triple(2, 1.0)), quadratic_x0(), tau.tau(0.5), tau.tau(10.0), ctl);
    auto direct_sys = build_el_system(h, f, polynomial_triple(p, 1.0));
    auto direct = integrate(direct_sys, quadratic_x0(), 0.5, 10.0, ctl);
    auto dilated = dilate_trajectory(base, tau, direct.times, &direct_sys);
    const double sup = sup_distance(dilated.states, direct.states, 2);
    worst = std::max(worst, sup);
    e.require(sup <= 1e-3, "p=" + std::to_string(p) + " sup |Y - X| = " + fmt(sup) + " <= 1e-3");
    out.trajectory("c03_time_dilation/direct_p" + std::to_string(p) + ".csv", direct);
    out.trajectory("c03_time_dilation/dilated_p" + std::to_string(p) + ".csv", dilated);
  }
  // Dilating the p = 2 triple by t^2 gives the p = 4 triple exactly.
  const auto dil = dilate_triple(polynomial_triple(2, 1.0), TimeDilation::power(2.0));
  const auto p4 = polynomial_triple(4, 1.0);
  double defect = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double t = 0.5 + 9.5 * i / 19.0;
    defect = std::max({defect, std::abs(dil.alpha(t) - p4.alpha(t)), std::abs(dil.beta(t) - p4.beta(t)),
                       std::abs(dil.gamma(t) - p4.gamma(t)), std::abs(dil.alpha_dot(t) - p4.alpha_dot(t)),
                       std::abs(dil.beta_dot(t) - p4.beta_dot(t)), std::abs(dil.gamma_dot(t) - p4.gamma_dot(t))});
  }
  e.require(defect <= 1e-12, "dilated triple matches polynomial(4,1) on 20 points, defect " + fmt(defect));
  e.measured = worst;
  e.bound = 1e-3;
}

inline void accelerated_bound(Context& ctx, OutputDir& out, CheckEntry& e) {
  ensure_accelerated_runs(ctx);
  double worst = 0.0;
  for (const auto& [tag, r] : ctx.accelerated_runs) {
    auto c = check_accelerated_bound(r);
    c.name = tag + " " + c.name;
    e.absorb(c);
    for (std::size_t k = 1; k < r.gap_y.size(); ++k) worst = std::max(worst, r.gap_y[k] / r.bound[k]);
    out.run("c04_accelerated_bound/" + tag + ".csv", r);
    std::vector<double> ks;
    for (std::size_t k = 0; k < r.gap_y.size(); ++k) ks.push_back(static_cast<double>(k));
    out.loglog("c04_accelerated_bound/" + tag + "_gap.dat", ks, r.gap_y);
  }
  e.measured = worst;
  e.bound = 1.0;
}

inline void estimate_sequence(Context& ctx, OutputDir&, CheckEntry& e) {
  ensure_accelerated_runs(ctx);
  double worst = 0.0;
  for (const auto& [tag, r] : ctx.accelerated_runs) {
    auto c = check_estimate_sequence(r, 1e-9, 1e-8);
    c.name = tag + " " + c.name;
    e.absorb(c);
    for (double g : r.psi_grad_norm) worst = std::max(worst, g);
  }
  e.measured = worst;
  e.bound = 1e-8;
}

inline void step_certificates(Context& ctx, OutputDir& out, CheckEntry& e) {
  ensure_accelerated_runs(ctx);
  std::size_t violations = 0;
  for (const auto& [tag, r] : ctx.accelerated_runs) {
    auto c = check_step_certificates(r);
    c.name = tag + " " + c.name;
    violations += c.violations;
    e.absorb(c);
  }
  std::mt19937_64 rng(ctx.seed);
  std::normal_distribution<double> normal(0.0, 2.0);
  auto q = quadratic();
  auto pn3 = make_power_norm(3, 3.0);
  auto pn4 = make_power_norm(3, 4.0);
  auto os = out.open("c06_step_certificates/sweep.csv");
  os << "p,N,i,progress,lemma1_lower,move_lower,move_norm,move_upper,residual\n";
  for (int p = 2; p <= 4; ++p) {
    const Objective& f = p == 2 ? static_cast<const Objective&>(*q) : p == 3 ? *pn3 : *pn4;
    const double eps = declared_epsilon(f, p);
    for (double N : {1.5, 2.0, 4.0}) {
      auto c = make_check("sweep p=" + std::to_string(p) + " N=" + fmt(N));
      for (std::size_t i = 0; i < ctx.sweep_points(); ++i) {
        Vector x(f.dim());
        for (Index j = 0; j < x.size(); ++j) x[j] = normal(rng);
        const auto st = g_step(f, x, StepConfig{p, eps, N});
        const auto& s = st.cert;
        c.observe(s.lemma1_lower, s.progress, i, kLemmaSlack);
        c.observe(s.move_lower, s.move_norm, i, kLemmaSlack);
        c.observe(s.move_norm, s.move_upper, i, kLemmaSlack);
        os << p << ',' << format_double(N) << ',' << i << ',' << format_double(s.progress) << ','
           << format_double(s.lemma1_lower) << ',' << format_double(s.move_lower) << ','
           << format_double(s.move_norm) << ',' << format_double(s.move_upper) << ',' << format_double(s.residual)
           << '\n';
      }
      violations += c.violations;
      e.absorb(c);
    }
  }
  e.measured = static_cast<double>(violations);
  e.bound = 0.0;
}

inline void plain_method(Context& ctx, OutputDir& out, CheckEntry& e) {
  auto q = quadratic();
  std::size_t violations = 0;
  for (int p = 2; p <= 3; ++p) {
    auto r = higher_order_descent(*q, StepConfig{p, declared_epsilon(*q, p), 1.0}, quadratic_x0(), ctx.plain_K());
    for (auto c : {check_descent(r), check_descent_bound(r), check_gap_recursion(r)}) {
      c.name = "p=" + std::to_string(p) + " " + c.name;
      violations += c.violations;
      e.absorb(c);
    }
    out.run("c07_plain_method/p" + std::to_string(p) + ".csv", r);
  }
  e.measured = static_cast<double>(violations);
  e.bound = 0.0;
}

inline void rescaled_flow(Context&, OutputDir& out, CheckEntry& e) {
  const int p = 3;
  auto q = quadratic();
  const Vector x0 = quadratic_x0();
  auto tr = integrate(build_rescaled_gradient_flow(q, p), x0, 0.0, 30.0, IntegrateControls::adaptive());
  out.trajectory("c08_rescaled_flow/quadratic_p3.csv", tr);
  const double slope = fit_rate(tr.times, tr.f_gap, 1.0, 30.0, kGapFloor);
  e.require(slope <= -(p - 1) + 0.3, "quadratic slope " + fmt(slope) + " <= " + fmt(-(p - 1) + 0.3));
  e.measured = slope;
  e.bound = -(p - 1) + 0.3;

  auto descent = make_check("descent");
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) descent.observe(tr.f_gap[i + 1], tr.f_gap[i], i, 1e-9);
  e.absorb(descent);

  const double R = *q->level_set_radius(q->value(x0));
  const Vector xs = *q->minimizer();
  const auto e0 = rescaled_flow_energy(*q, p, tr.times.front(), x0, xs);
  const double rate = 1.0 / ((p - 1) * std::pow(R, p / (p - 1.0)));
  const double alt_rate = std::pow(p - 1.0, p - 1) * std::pow(R, p);
  auto primary = make_check("primary energy grows at least linearly");
  auto alternative = make_check("alternative energy increments bounded");
  RescaledEnergy prev = e0;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const auto en = rescaled_flow_energy(*q, p, tr.times[i], tr.position(i), xs);
    if (tr.f_gap[i] > kGapFloor) {
      const double need = e0.primary + (tr.times[i] - tr.times.front()) * rate;
      primary.observe(need, en.primary, i, 1e-6 * need);
    }
    alternative.observe(en.alternative - prev.alternative, alt_rate * (tr.times[i] - tr.times[i - 1]), i, 1e-6);
    prev = en;
  }
  e.absorb(primary);
  e.absorb(alternative);

  // On f = (1/p)||x||^p the flow is Xdot = -X.
  auto pn = make_power_norm(2, p);
  auto ex = integrate(build_rescaled_gradient_flow(pn, p), x0, 0.0, 10.0, IntegrateControls::adaptive());
  double sup = 0.0;
  for (std::size_t i = 0; i < ex.size(); ++i) sup = std::max(sup, (ex.position(i) - std::exp(-ex.times[i]) * x0).norm());
  e.require(sup <= 1e-5, "power norm sup |X - e^{-t} X0| = " + fmt(sup) + " <= 1e-5");
  out.trajectory("c08_rescaled_flow/power_norm_p3.csv", ex);
}

inline void naive_contrast(Context& ctx, OutputDir& out, CheckEntry& e) {
  auto f = make_diagonal_quadratic({1.0, 10.0});
  const double eps = 0.01;
  const int p = 3;
  AccelConfig cfg;
  cfg.p = p;
  cfg.epsilon = eps;
  cfg.x0 = quadratic_x0();
  const double C = cfg.max_C();
  auto naive = naive_discretization(*f, make_euclidean_mirror(), p, C, eps, cfg.x0, 100000);
  const bool diverged = naive.termination == Termination::diverged;
  e.require(diverged, "naive scheme (p=3, eps=0.01) diverged" +
                          (naive.termination_k ? " at k=" + std::to_string(*naive.termination_k) : std::string()));
  double closest = std::numeric_limits<double>::infinity();
  for (double g : naive.gap_x) closest = std::min(closest, g);
  e.note("naive scheme closest approach: gap " + fmt(closest));
  e.measured = naive.termination_k ? static_cast<double>(*naive.termination_k) : std::numeric_limits<double>::infinity();
  e.bound = 1e5;
  out.run("c09_naive_contrast/naive.csv", naive);

  auto acc = accelerated(*f, cfg, ctx.accel_K());
  e.absorb(check_accelerated_bound(acc));
  e.absorb(check_estimate_sequence(acc));
  out.run("c09_naive_contrast/accelerated.csv", acc);
}

inline void hamiltonian(Context&, OutputDir& out, CheckEntry& e) {
  auto f = quadratic();
  const auto ctl = IntegrateControls::fixed(10000);
  double worst = 0.0;
  for (int pth = 0; pth < 2; ++pth) {
    MirrorPtr h = pth ? make_pth_power_mirror(3, far_anchor()) : make_euclidean_mirror();
    const std::string tag = pth ? "pth_power" : "euclidean";
    auto a = integrate(build_el_system(h, f, polynomial_triple(2, 1.0)), quadratic_x0(), 0.1, 10.0, ctl);
    auto b = integrate(build_hamiltonian_system(h, f, polynomial_triple(2, 1.0)), quadratic_x0(), 0.1, 10.0, ctl);
    const double sup = sup_distance(a.states, b.states, 2);
    worst = std::max(worst, sup);
    e.require(sup <= 1e-4, tag + " sup |X_H - X_EL| = " + fmt(sup) + " <= 1e-4");
    out.trajectory("c10_hamiltonian/" + tag + "_hamiltonian.csv", b);
  }
  e.measured = worst;
  e.bound = 1e-4;
}

inline void natural_motion_check(Context&, OutputDir& out, CheckEntry& e) {
  auto zero = std::make_shared<ZeroObjective>(2);
  const Vector x0 = quadratic_x0();
  const Vector z0 = vec2(-0.5, 2.0);
  const auto ctl = IntegrateControls::fixed(10000);
  struct Case {
    std::string tag;
    ScalingTriple s;
    double t0;
  };
  const std::vector<Case> cases = {{"polynomial_p2", polynomial_triple(2, 1.0), 0.1},
                                   {"polynomial_p3", polynomial_triple(3, 1.0), 0.1},
                                   {"exponential_c1", exponential_triple(1.0), 0.0}};
  double worst = 0.0;
  for (const auto& cs : cases) {
    for (int pth = 0; pth < 2; ++pth) {
      MirrorPtr h = pth ? make_pth_power_mirror(3, far_anchor()) : make_euclidean_mirror();
      auto sys = build_el_system(h, zero, cs.s);
      Vector y0(4);
      y0 << x0, h->gradient(z0);
      auto tr = integrate_state(sys, y0, cs.t0, 10.0, ctl);
      double sup = 0.0;
      for (std::size_t i = 0; i < tr.size(); ++i) {
        sup = std::max(sup, (tr.position(i) - natural_motion(cs.s, cs.t0, x0, z0, tr.times[i])).norm());
      }
      worst = std::max(worst, sup);
      const std::string tag = cs.tag + "_" + (pth ? "pth_power" : "euclidean");
      e.require(sup <= 1e-6, tag + " sup defect " + fmt(sup) + " <= 1e-6");
      out.trajectory("c11_natural_motion/" + tag + ".csv", tr);
    }
  }
  e.measured = worst;
  e.bound = 1e-6;
}

inline void massless(Context&, OutputDir& out, CheckEntry& e) {
  auto f = quadratic();
  for (int pth = 0; pth < 2; ++pth) {
    MirrorPtr h = pth ? make_pth_power_mirror(3, far_anchor()) : make_euclidean_mirror();
    const std::string tag = pth ? "pth_power" : "euclidean";
    auto ref = integrate(build_natural_gradient_flow(h, f), quadratic_x0(), 0.0, 2.0, IntegrateControls::adaptive(1e-10, 1e-12));
    std::vector<double> dist;
    for (double m : {0.1, 0.01, 0.001}) {
      auto tr = integrate(build_massless_system(h, f, m), quadratic_x0(), 0.0, 2.0, IntegrateControls::adaptive());
      double sup = 0.0;
      for (std::size_t i = 0; i < tr.size(); ++i) {
        sup = std::max(sup, (tr.position(i) - interpolate_state(ref, tr.times[i])).norm());
      }
      dist.push_back(sup);
      e.note(tag + " m=" + fmt(m) + " sup distance " + fmt(sup));
    }
    e.require(dist[1] < dist[0] && dist[2] < dist[1], tag + " sup distance decreases monotonically in m");
    e.measured = dist.back();
    out.trajectory("c12_massless/" + tag + "_natural.csv", ref);
  }
}

inline void r_threshold(Context&, OutputDir& out, CheckEntry& e) {
  auto f = quadratic();
  double worst = -std::numeric_limits<double>::infinity();
  for (double r : {3.0, 4.0, 5.0}) {
    auto tr = integrate(build_euclidean_r_system(f, r), quadratic_x0(), 0.1, 50.0, IntegrateControls::adaptive());
    const double slope = fit_rate(tr.times, tr.f_gap, 1.0, 50.0, kGapFloor);
    worst = std::max(worst, slope - (-2.0 + 0.2));
    e.require(slope <= -2.0 + 0.2, "unit r=" + fmt(r) + " slope " + fmt(slope) + " <= -1.8");
    out.trajectory("c13_r_threshold/unit_r" + fmt(r) + ".csv", tr);
  }
  for (double r : {3.0, 4.0}) {
    auto tr = integrate(build_euclidean_r_system(f, r, MatchedForce{1.0}), quadratic_x0(), 0.1, 50.0,
                        IntegrateControls::adaptive());
    const double slope = fit_rate(tr.times, tr.f_gap, 1.0, 50.0, kGapFloor);
    worst = std::max(worst, slope - (-(r - 1.0) + 0.3));
    e.require(slope <= -(r - 1.0) + 0.3, "matched r=" + fmt(r) + " slope " + fmt(slope) + " <= " + fmt(-(r - 1.0) + 0.3));
    out.trajectory("c13_r_threshold/matched_r" + fmt(r) + ".csv", tr);
  }
  e.measured = worst;
  e.bound = 0.0;
}

inline void uniform_convexity_discrete(Context& ctx, OutputDir& out, CheckEntry& e) {
  auto q = quadratic();
  auto r = higher_order_descent(*q, StepConfig{2, 0.1, 2.0}, quadratic_x0(), ctx.plain_K());
  const auto rep = uniformly_convex_descent_rate_check(r, *q);
  e.absorb(rep.geometric_bound);
  e.absorb(rep.energy_increment);
  out.run("c14_uniform_convexity/descent_p2.csv", r);

  double worst = 0.0;
  auto pn3 = make_power_norm(2, 3.0);
  struct Job {
    std::string tag;
    ObjectivePtr f;
    double eps;
  };
  for (const auto& j : std::vector<Job>{{"restart_p2", q, declared_epsilon(*q, 2)}, {"restart_p3", pn3, declared_epsilon(*pn3, 3)}}) {
    auto rr = restart_accelerated(*j.f, j.eps, quadratic_x0(), 3);
    const auto chk = check_restart(rr);
    auto c1 = chk.contraction;
    auto c2 = chk.final_bound;
    c1.name = j.tag + " " + c1.name;
    c2.name = j.tag + " " + c2.name;
    e.absorb(c1);
    e.absorb(c2);
    for (double c : rr.restart->contraction) worst = std::max(worst, c);
    e.note(j.tag + " m=" + std::to_string(rr.restart->epoch_length) + " final gap " + fmt(rr.restart->final_gap) +
           " bound " + fmt(rr.restart->final_bound));
    out.run("c14_uniform_convexity/" + j.tag + ".csv", rr);
  }
  e.measured = worst;
  e.bound = std::exp(-1.0);
}

inline void uniform_convexity_continuous(Context&, OutputDir& out, CheckEntry& e) {
  double worst = 0.0;
  for (int p = 2; p <= 3; ++p) {
    auto f = make_power_norm(2, p);
    const double sigma = f->uniform_convexity()->sigma;
    auto tr = integrate(build_rescaled_gradient_flow(f, p), quadratic_x0(), 0.0, 10.0, IntegrateControls::adaptive());
    auto c = make_check("p=" + std::to_string(p) + " gap <= gap0 exp(-sigma^{1/(p-1)} t)");
    const double rate = std::pow(sigma, 1.0 / (p - 1));
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const double bound = tr.f_gap.front() * std::exp(-rate * tr.times[i]);
      c.observe(tr.f_gap[i], bound * (1.0 + 1e-4), i);
      worst = std::max(worst, tr.f_gap[i] / bound);
    }
    e.absorb(c);
    out.trajectory("c15_uniform_convexity_flow/p" + std::to_string(p) + ".csv", tr);
  }
  e.measured = worst;
  e.bound = 1.0 + 1e-4;
}

inline void correspondence(Context&, OutputDir& out, CheckEntry& e) {
  auto q = quadratic();
  const double delta = 0.05;
  AccelConfig cfg;
  cfg.p = 2;
  cfg.epsilon = delta * delta;
  cfg.x0 = quadratic_x0();
  cfg.C = cfg.max_C();
  const std::size_t K = static_cast<std::size_t>(std::lround(10.0 / delta));
  auto run = accelerated(*q, cfg, K);
  auto flow = integrate(build_el_system(make_euclidean_mirror(), q, polynomial_triple(2, *cfg.C)), cfg.x0, 0.1, 10.0,
                        IntegrateControls::adaptive());
  double worst = 1.0;
  auto c = make_check("discrete/continuous gap ratio within [1/10, 10]");
  auto os = out.open("c16_correspondence/ratio.csv");
  os << "k,t,gap_discrete,gap_flow,ratio\n";
  for (std::size_t k = static_cast<std::size_t>(std::lround(1.0 / delta)); k <= K; ++k) {
    const double t = delta * static_cast<double>(k);
    const Vector X = interpolate_state(flow, std::min(t, flow.times.back())).head(2);
    const double gf = q->value(X) - *q->min_value();
    const double ratio = run.gap_y[k] / gf;
    worst = std::max({worst, ratio, 1.0 / ratio});
    c.observe(std::max(ratio, 1.0 / ratio), 10.0, k);
    os << k << ',' << format_double(t) << ',' << format_double(run.gap_y[k]) << ',' << format_double(gf) << ','
       << format_double(ratio) << '\n';
  }
  e.absorb(c);
  e.measured = worst;
  e.bound = 10.0;
}

inline std::vector<Criterion> criteria() {
  return {
      {1, "continuous_rate", continuous_rate},
      {2, "lyapunov_monotonicity", lyapunov},
      {3, "time_dilation", time_dilation},
      {4, "accelerated_bound", accelerated_bound},
      {5, "estimate_sequence", estimate_sequence},
      {6, "step_certificates", step_certificates},
      {7, "plain_method", plain_method},
      {8, "rescaled_gradient_flow", rescaled_flow},
      {9, "naive_discretization_contrast", naive_contrast},
      {10, "hamiltonian_equivalence", hamiltonian},
      {11, "natural_motion", natural_motion_check},
      {12, "massless_limits", massless},
      {13, "euclidean_r_threshold", r_threshold},
      {14, "uniform_convexity_discrete", uniform_convexity_discrete},
      {15, "uniform_convexity_continuous", uniform_convexity_continuous},
      {16, "discrete_continuous_correspondence", correspondence},
  };
}

inline std::string entry_name(int id, const std::string& name) {
  std::ostringstream os;
  os << "criterion_" << (id < 10 ? "0" : "") << id << "_" << name;
  return os.str();
}

inline std::vector<CheckEntry> run_criteria(Context& ctx, OutputDir& out, const std::vector<int>& only) {
  std::vector<CheckEntry> entries;
  for (const auto& c : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    CheckEntry e;
    e.name = entry_name(c.id, c.name);
    Stopwatch sw;
    try {
      c.run(ctx, out, e);
    } catch (const std::exception& ex) {
      e.status = Status::fail;
      e.note(std::string("exception: ") + ex.what());
    }
    e.runtime_s = sw.seconds();
    entries.push_back(std::move(e));
  }
  return entries;
}

inline std::vector<std::string> data_files(const std::vector<std::string>& files) {
  std::vector<std::string> out;
  for (const auto& f : files) {
    if (f.size() >= 4 && (f.compare(f.size() - 4, 4, ".csv") == 0 || f.compare(f.size() - 4, 4, ".dat") == 0)) {
      out.push_back(f);
    }
  }
  return out;
}

inline std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

}  // namespace suite

/// Runs every acceptance criterion, writing traces under `out_dir`.
/// `only` restricts the run to the listed criterion ids (determinism, id 17,
/// then re-runs just those). Quick scale shortens discrete runs (K = 500, p = 4:
/// K = 200) and the step-certificate sweep (20 points per setting).
inline ReportSummary acceptance_suite(const std::string& scale, std::uint64_t seed, const fs::path& out_dir,
                                      const std::vector<int>& only = {},
                                      const std::function<void(const CheckEntry&)>& on_entry = {}) {
  if (scale != "quick" && scale != "full") throw ConfigError("scale must be quick or full");
  Stopwatch total;
  ReportSummary rep;
  rep.experiment = "acceptance";
  rep.scale = scale;
  rep.seed = seed;

  OutputDir out(out_dir);
  suite::Context ctx;
  ctx.quick = scale == "quick";
  ctx.seed = seed;
  std::vector<int> ids;
  for (int id : only) {
    if (id != 17) ids.push_back(id);
  }
  const bool run_determinism = only.empty() || std::find(only.begin(), only.end(), 17) != only.end();
  if (!only.empty() && ids.empty()) ids.push_back(-1);  // determinism alone still needs something to rerun
  if (ids.size() == 1 && ids[0] == -1) ids = {3, 9, 11};

  for (auto& e : suite::run_criteria(ctx, out, ids)) {
    if (on_entry) on_entry(e);
    rep.checks.push_back(std::move(e));
  }

  if (run_determinism) {
    CheckEntry e;
    e.name = suite::entry_name(17, "determinism");
    Stopwatch sw;
    try {
      OutputDir again(out_dir / "rerun");
      suite::Context ctx2;
      ctx2.quick = ctx.quick;
      ctx2.seed = seed;
      suite::run_criteria(ctx2, again, ids);
      std::size_t mismatched = 0, compared = 0;
      for (const auto& f : suite::data_files(out.files())) {
        ++compared;
        if (suite::slurp(out.root() / f) != suite::slurp(again.root() / f)) {
          ++mismatched;
          e.note("differs: " + f);
        }
      }
      e.require(compared > 0 && mismatched == 0,
                std::to_string(compared) + " data files compared byte-for-byte, " + std::to_string(mismatched) + " differ");
      e.measured = static_cast<double>(mismatched);
      e.bound = 0.0;
    } catch (const std::exception& ex) {
      e.status = Status::fail;
      e.note(std::string("exception: ") + ex.what());
    }
    e.runtime_s = sw.seconds();
    if (on_entry) on_entry(e);
    rep.checks.push_back(std::move(e));
  }
  rep.files = out.files();
  rep.runtime_s = total.seconds();
  out.summary(rep);
  return rep;
}

}  // namespace bregman::harness
