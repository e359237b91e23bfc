#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "bregman/core/scaling.hpp"
#include "bregman/flows/integrate.hpp"

namespace bregman {

/// Time reparameterization t -> tau(t) with its first two derivatives.
/// `inverse` is optional and only used to carry valid_from over.
struct TimeDilation {
  std::function<double(double)> tau, tau_dot, tau_ddot, inverse;

  static TimeDilation identity() {
    return {[](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; },
            [](double t) { return t; }};
  }
  /// tau(t) = t^q, q > 0, on t > 0.
  static TimeDilation power(double q) {
    if (!(q > 0.0)) throw InputError("power dilation: exponent must be positive");
    return {[q](double t) { return std::pow(t, q); }, [q](double t) { return q * std::pow(t, q - 1.0); },
            [q](double t) { return q * (q - 1.0) * std::pow(t, q - 2.0); },
            [q](double s) { return std::pow(s, 1.0 / q); }};
  }
  /// tau(t) = e^{r t}, r > 0.
  static TimeDilation exponential(double r) {
    if (!(r > 0.0)) throw InputError("exponential dilation: rate must be positive");
    return {[r](double t) { return std::exp(r * t); }, [r](double t) { return r * std::exp(r * t); },
            [r](double t) { return r * r * std::exp(r * t); }, [r](double s) { return std::log(s) / r; }};
  }
};

/// alpha~ = alpha(tau) + log tau_dot, beta~ = beta(tau), gamma~ = gamma(tau).
inline ScalingTriple dilate_triple(const ScalingTriple& s, const TimeDilation& d) {
  if (!d.tau || !d.tau_dot || !d.tau_ddot) throw InputError("dilate_triple: incomplete dilation");
  ScalingTriple r;
  r.alpha = [s, d](double t) {
    const double td = d.tau_dot(t);
    if (!(td > 0.0)) throw InputError("dilate_triple: tau must be strictly increasing");
    return s.alpha(d.tau(t)) + std::log(td);
  };
  r.beta = [s, d](double t) { return s.beta(d.tau(t)); };
  r.gamma = [s, d](double t) { return s.gamma(d.tau(t)); };
  r.alpha_dot = [s, d](double t) {
    const double td = d.tau_dot(t);
    return s.alpha_dot(d.tau(t)) * td + d.tau_ddot(t) / td;
  };
  r.beta_dot = [s, d](double t) { return s.beta_dot(d.tau(t)) * d.tau_dot(t); };
  r.gamma_dot = [s, d](double t) { return s.gamma_dot(d.tau(t)) * d.tau_dot(t); };
  if (std::isfinite(s.valid_from) && d.inverse) {
    r.valid_from = d.inverse(s.valid_from);
  } else {
    r.valid_from = s.valid_from;
  }
  r.family = CustomFamily{"dilated"};
  return r;
}

/// Y_t = X_{tau(t)} sampled on `grid`, interpolated with cubic Hermite splines.
/// Stored rates are scaled by tau_dot. When `monitors` is given, f_gap and energy are
/// evaluated with it; otherwise they are NaN.
inline Trajectory dilate_trajectory(const Trajectory& tr, const TimeDilation& d, const std::vector<double>& grid,
                                    const FlowSystem* monitors = nullptr) {
  if (tr.times.empty()) throw InputError("dilate_trajectory: empty trajectory");
  Trajectory out;
  out.dim = tr.dim;
  out.layout = tr.layout;
  double prev = -std::numeric_limits<double>::infinity();
  for (double t : grid) {
    if (!(t > prev)) throw InputError("dilate_trajectory: grid must be strictly increasing");
    prev = t;
    const double s = d.tau(t);
    if (s < tr.times.front() || s > tr.times.back()) throw InputError("dilate_trajectory: tau(t) outside range");
    const Vector y = interpolate_state(tr, s);
    // Derivative of the Hermite interpolant (exact stored rate at sample points).
    auto it = std::lower_bound(tr.times.begin(), tr.times.end(), s);
    Vector rate;
    if (*it == s) {
      rate = tr.rates[static_cast<std::size_t>(it - tr.times.begin())];
    } else {
      const std::size_t j = static_cast<std::size_t>(it - tr.times.begin()), i = j - 1;
      const double h = tr.times[j] - tr.times[i];
      const double u = (s - tr.times[i]) / h;
      const double d00 = (6 * u * u - 6 * u) / h, d10 = 3 * u * u - 4 * u + 1, d01 = (-6 * u * u + 6 * u) / h,
                   d11 = 3 * u * u - 2 * u;
      rate = d00 * tr.states[i] + d10 * tr.rates[i] + d01 * tr.states[j] + d11 * tr.rates[j];
    }
    out.times.push_back(t);
    out.states.push_back(y);
    out.rates.push_back(d.tau_dot(t) * rate);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.f_gap.push_back(monitors && monitors->f_gap ? monitors->f_gap(t, y) : nan);
    out.energy.push_back(monitors && monitors->energy ? monitors->energy(t, y) : nan);
  }
  return out;
}

}  // namespace bregman
