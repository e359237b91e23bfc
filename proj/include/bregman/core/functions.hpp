#pragma once

#include <cstdint>

#include "bregman/core/mirror.hpp"
#include "bregman/core/objective.hpp"
#include "bregman/core/types.hpp"

namespace bregman {

/// D_h(y, x) = h(y) - h(x) - <grad h(x), y - x>.
inline double bregman_divergence(const MirrorMap& h, const Vector& y, const Vector& x) {
  require_same_dim(y, x, "bregman_divergence");
  return h.value(y) - h.value(x) - h.gradient(x).dot(y - x);
}

/// Rising factorial k (k+1) ... (k+m-1), m >= 1 factors.
///
/// Evaluated in double precision: exact while the product stays below 2^53,
/// relative error of order m * 1e-16 beyond that.
inline double rising_factorial(std::int64_t k, int m) {
  if (m < 1) throw InputError("rising_factorial: m must be at least 1");
  if (k < 0) throw InputError("rising_factorial: k must be nonnegative");
  double r = 1.0;
  for (int i = 0; i < m; ++i) r *= static_cast<double>(k + i);
  return r;
}

/// Taylor model of f at x of the given order, evaluated at y:
/// sum_{i=0}^{order} (1/i!) D^i f(x)[y-x]^i.
inline double taylor_model(const Objective& f, const Vector& x, int order, const Vector& y) {
  if (order < 1 || order > 3) throw CapabilityError("taylor_model: order must be 1, 2, or 3");
  if (order > f.derivative_order()) {
    throw CapabilityError("taylor_model: objective '" + f.name() + "' lacks derivatives of order " +
                          std::to_string(order));
  }
  require_same_dim(x, y, "taylor_model");
  const Vector u = y - x;
  double m = f.value(x) + f.gradient(x).dot(u);
  if (order >= 2) m += 0.5 * u.dot(f.hessian_apply(x, u));
  if (order >= 3) m += u.dot(f.third_apply(x, u)) / 6.0;
  return m;
}

/// Gradient in y of the Taylor model of the given order: sum_{i=1}^{order} (1/(i-1)!) D^i f(x)[y-x]^{i-1}.
inline Vector taylor_model_gradient(const Objective& f, const Vector& x, int order, const Vector& y) {
  if (order < 1 || order > 3) throw CapabilityError("taylor_model_gradient: order must be 1, 2, or 3");
  if (order > f.derivative_order()) {
    throw CapabilityError("taylor_model_gradient: objective lacks required derivatives");
  }
  const Vector u = y - x;
  Vector g = f.gradient(x);
  if (order >= 2) g += f.hessian_apply(x, u);
  if (order >= 3) g += 0.5 * f.third_apply(x, u);
  return g;
}

}  // namespace bregman
