#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "bregman/core/objective.hpp"
#include "bregman/core/scaling.hpp"
#include "bregman/core/types.hpp"

namespace bregman {

struct RescaledEnergy {
  double primary;      ///< gap^{-1/(p-1)}; +inf when gap <= 0
  double alternative;  ///< t^p * gap
};

inline RescaledEnergy rescaled_flow_energy(const Objective& f, int p, double t, const Vector& X,
                                           const Vector& x_star) {
  if (p < 2) throw InputError("rescaled_flow_energy: p must be at least 2");
  const double fstar = f.min_value() ? *f.min_value() : f.value(x_star);
  const double gap = f.value(X) - fstar;
  RescaledEnergy e;
  e.primary = gap > 0.0 ? std::pow(gap, -1.0 / (p - 1)) : std::numeric_limits<double>::infinity();
  e.alternative = std::pow(t, p) * gap;
  return e;
}

/// Least-squares slope of log(gap) against log(t) over samples with t in [t_lo, t_hi].
/// Gaps that are nonpositive or not above `floor` are excluded.
inline double fit_rate(const std::vector<double>& times, const std::vector<double>& gaps, double t_lo, double t_hi,
                       double floor = 0.0) {
  if (times.size() != gaps.size()) throw InputError("fit_rate: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i], g = gaps[i];
    if (t < t_lo || t > t_hi || !(t > 0.0) || !(g > 0.0) || !(g > floor) || !std::isfinite(g)) continue;
    const double x = std::log(t), y = std::log(g);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 10) throw InputError("fit_rate: fewer than 10 usable samples in window");
  const double nn = static_cast<double>(n);
  const double den = sxx - sx * sx / nn;
  if (!(den > 0.0)) throw InputError("fit_rate: degenerate time window");
  return (sxy - sx * sy / nn) / den;
}

/// Force-free solution X_t = a e^{-gamma_t} + b of an ideal-scaled flow started
/// at X_{t0} = x0 with Z = z0 (b = z0, a = (x0 - z0) e^{gamma_{t0}}).
inline Vector natural_motion(const ScalingTriple& s, double t0, const Vector& x0, const Vector& z0, double t) {
  return z0 + std::exp(s.gamma(t0) - s.gamma(t)) * (x0 - z0);
}

}  // namespace bregman
