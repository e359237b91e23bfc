#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "bregman/core/types.hpp"
#include "bregman/flows/system.hpp"

namespace bregman {

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t field_evals = 0;
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
};

/// Sampled solution of a FlowSystem. `rates` holds the vector field at each
/// sample so the curve can be interpolated with cubic Hermite splines.
struct Trajectory {
  Index dim = 0;
  std::vector<std::string> layout;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> rates;
  std::vector<double> f_gap;
  std::vector<double> energy;
  StepStats stats;

  std::size_t size() const { return times.size(); }
  Vector position(std::size_t i) const { return states[i].head(dim); }
  Vector slice(std::size_t i, std::size_t k) const { return states[i].segment(static_cast<Index>(k) * dim, dim); }
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, Trajectory partial)
      : NumericalError(what), partial_(std::make_shared<Trajectory>(std::move(partial))) {}
  const Trajectory& partial() const { return *partial_; }

 private:
  std::shared_ptr<Trajectory> partial_;
};

enum class IntegrationMethod { rk4, rk4_adaptive };

struct IntegrateControls {
  IntegrationMethod method = IntegrationMethod::rk4;
  std::size_t steps = 10000;  ///< fixed-step rk4
  double rel_tol = 1e-8;      ///< adaptive
  double abs_tol = 1e-10;     ///< adaptive
  double initial_step = 0.0;  ///< adaptive; 0 picks (t_end - t0) * 1e-4
  std::size_t max_steps = 5'000'000;
  double divergence_threshold = 1e8;

  static IntegrateControls fixed(std::size_t n) {
    IntegrateControls c;
    c.steps = n;
    return c;
  }
  static IntegrateControls adaptive(double rel = 1e-8, double abs = 1e-10) {
    IntegrateControls c;
    c.method = IntegrationMethod::rk4_adaptive;
    c.rel_tol = rel;
    c.abs_tol = abs;
    return c;
  }
};

namespace detail {

class Recorder {
 public:
  Recorder(const FlowSystem& sys, double threshold) : sys_(sys), threshold_(threshold) {
    traj_.dim = sys.dim;
    traj_.layout = sys.layout;
  }

  void push(double t, const Vector& y, const Vector& rate) {
    if (!all_finite(y) || !all_finite(rate)) {
      std::ostringstream os;
      os << "integrate: non-finite state or field at t=" << t;
      throw NumericalError(os.str());
    }
    traj_.times.push_back(t);
    traj_.states.push_back(y);
    traj_.rates.push_back(rate);
    traj_.f_gap.push_back(sys_.f_gap ? sys_.f_gap(t, y) : std::numeric_limits<double>::quiet_NaN());
    traj_.energy.push_back(sys_.energy ? sys_.energy(t, y) : std::numeric_limits<double>::quiet_NaN());
    if (y.norm() > threshold_) {
      std::ostringstream os;
      os << "integrate: state norm exceeded " << threshold_ << " at t=" << t;
      throw DivergenceError(os.str(), traj_);
    }
  }

  Trajectory& trajectory() { return traj_; }

 private:
  const FlowSystem& sys_;
  double threshold_;
  Trajectory traj_;
};

// One classical Runge-Kutta step given the field value k1 at (t, y).
inline Vector rk4_step(const FlowSystem::Field& F, double t, const Vector& y, const Vector& k1, double h,
                       std::size_t& evals) {
  const Vector k2 = F(t + 0.5 * h, y + 0.5 * h * k1);
  const Vector k3 = F(t + 0.5 * h, y + 0.5 * h * k2);
  const Vector k4 = F(t + h, y + h * k3);
  evals += 3;
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace detail

/// Integrates from an explicit initial state.
inline Trajectory integrate_state(const FlowSystem& sys, const Vector& y0, double t0, double t_end,
                                  const IntegrateControls& ctl = {}) {
  if (!(t_end > t0)) throw InputError("integrate: t_end must exceed t0");
  if (t0 < sys.valid_from) throw InputError("integrate: t0 precedes the system's valid_from");
  if (y0.size() != sys.state_dim()) throw InputError("integrate: initial state has wrong dimension");
  require_finite(y0, "integrate initial state");

  const auto& F = sys.vector_field;
  detail::Recorder rec(sys, ctl.divergence_threshold);
  StepStats& st = rec.trajectory().stats;
  Vector y = y0;
  Vector k1 = F(t0, y);
  st.field_evals = 1;
  rec.push(t0, y, k1);

  if (ctl.method == IntegrationMethod::rk4) {
    if (ctl.steps < 1) throw InputError("integrate: steps must be positive");
    const double h = (t_end - t0) / static_cast<double>(ctl.steps);
    for (std::size_t i = 0; i < ctl.steps; ++i) {
      const double t = t0 + static_cast<double>(i) * h;
      y = detail::rk4_step(F, t, y, k1, h, st.field_evals);
      const double tn = (i + 1 == ctl.steps) ? t_end : t0 + static_cast<double>(i + 1) * h;
      k1 = F(tn, y);
      ++st.field_evals;
      ++st.accepted;
      rec.push(tn, y, k1);
    }
    st.min_step = st.max_step = h;
    return std::move(rec.trajectory());
  }

  // Step doubling: compare one step of size h against two of size h/2.
  if (!(ctl.rel_tol > 0.0) || !(ctl.abs_tol > 0.0)) throw InputError("integrate: tolerances must be positive");
  double h = ctl.initial_step > 0.0 ? ctl.initial_step : (t_end - t0) * 1e-4;
  double t = t0;
  const double h_min = (t_end - t0) * 1e-14;
  while (t < t_end) {
    if (st.accepted + st.rejected >= ctl.max_steps) throw NumericalError("integrate: step budget exhausted");
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    const Vector big = detail::rk4_step(F, t, y, k1, h, st.field_evals);
    const Vector mid = detail::rk4_step(F, t, y, k1, 0.5 * h, st.field_evals);
    const Vector kmid = F(t + 0.5 * h, mid);
    ++st.field_evals;
    const Vector two = detail::rk4_step(F, t + 0.5 * h, mid, kmid, 0.5 * h, st.field_evals);

    double err = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
      const double scale = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(two[i]));
      err = std::max(err, std::abs(two[i] - big[i]) / 15.0 / scale);
    }
    if (!std::isfinite(err)) {
      std::ostringstream os;
      os << "integrate: non-finite error estimate at t=" << t;
      throw NumericalError(os.str());
    }
    if (err <= 1.0) {
      y = two + (two - big) / 15.0;
      t = last ? t_end : t + h;
      k1 = F(t, y);
      ++st.field_evals;
      ++st.accepted;
      st.min_step = std::min(st.min_step, h);
      st.max_step = std::max(st.max_step, h);
      rec.push(t, y, k1);
    } else {
      ++st.rejected;
    }
    const double factor = err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
    h *= factor;
    if (h < h_min) throw NumericalError("integrate: step size underflow");
  }
  return std::move(rec.trajectory());
}

/// Integrates from x0 using the system's canonical initial state.
inline Trajectory integrate(const FlowSystem& sys, const Vector& x0, double t0, double t_end,
                            const IntegrateControls& ctl = {}) {
  if (x0.size() != sys.dim) throw InputError("integrate: x0 has wrong dimension");
  return integrate_state(sys, sys.initial_state_from(x0, t0), t0, t_end, ctl);
}

/// Cubic Hermite interpolation of the full state at time t.
inline Vector interpolate_state(const Trajectory& tr, double t) {
  if (tr.times.empty() || t < tr.times.front() || t > tr.times.back()) {
    throw InputError("interpolate_state: time outside trajectory range");
  }
  auto it = std::lower_bound(tr.times.begin(), tr.times.end(), t);
  std::size_t j = static_cast<std::size_t>(it - tr.times.begin());
  if (tr.times[j] == t) return tr.states[j];
  const std::size_t i = j - 1;
  const double h = tr.times[j] - tr.times[i];
  const double s = (t - tr.times[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * tr.states[i] + (h10 * h) * tr.rates[i] + h01 * tr.states[j] + (h11 * h) * tr.rates[j];
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV with columns t, X_0..X_{d-1}, <slice>_0.., f_gap, energy.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t";
  for (const auto& name : tr.layout) {
    for (Index i = 0; i < tr.dim; ++i) os << ',' << name << '_' << i;
  }
  os << ",f_gap,energy\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    os << format_double(tr.times[k]);
    for (Index i = 0; i < tr.states[k].size(); ++i) os << ',' << format_double(tr.states[k][i]);
    os << ',' << format_double(tr.f_gap[k]) << ',' << format_double(tr.energy[k]) << '\n';
  }
}

}  // namespace bregman
