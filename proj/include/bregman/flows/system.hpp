#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "bregman/core/functions.hpp"
#include "bregman/core/mirror.hpp"
#include "bregman/core/objective.hpp"
#include "bregman/core/scaling.hpp"
#include "bregman/core/types.hpp"

namespace bregman {

enum class FlowKind { euler_lagrange, hamiltonian, rescaled_gradient, natural_gradient, euclidean_r, massless_lagrangian };

inline const char* to_string(FlowKind k) {
  switch (k) {
    case FlowKind::euler_lagrange: return "euler_lagrange";
    case FlowKind::hamiltonian: return "hamiltonian";
    case FlowKind::rescaled_gradient: return "rescaled_gradient";
    case FlowKind::natural_gradient: return "natural_gradient";
    case FlowKind::euclidean_r: return "euclidean_r";
    case FlowKind::massless_lagrangian: return "massless_lagrangian";
  }
  return "unknown";
}

/// First-order ODE system in a state made of equally sized slices
/// (X first, then W, P or V depending on the kind).
struct FlowSystem {
  using Field = std::function<Vector(double, const Vector&)>;
  using Init = std::function<Vector(const Vector&, double)>;
  using Monitor = std::function<double(double, const Vector&)>;

  FlowKind kind = FlowKind::euler_lagrange;
  Index dim = 0;
  std::vector<std::string> layout;
  Field vector_field;
  Init initial_state_from;
  double valid_from = -std::numeric_limits<double>::infinity();
  /// f(X) - f* at a state; empty when f* is unknown.
  Monitor f_gap;
  /// Lyapunov functional at (t, state); empty when the flow has none or x* is unknown.
  Monitor energy;

  Index state_dim() const { return dim * static_cast<Index>(layout.size()); }
  Vector position(const Vector& state) const { return state.head(dim); }
};

namespace detail {

inline FlowSystem::Monitor gap_monitor(const ObjectivePtr& f) {
  if (!f->min_value()) return {};
  const double fstar = *f->min_value();
  const Index d = f->dim();
  return [f, fstar, d](double, const Vector& s) { return f->value(s.head(d)) - fstar; };
}

// Sample points on which a triple's ideal scaling is verified before building a flow.
inline std::vector<double> scaling_probe_grid(const ScalingTriple& s) {
  const double t0 = std::isfinite(s.valid_from) ? std::max(s.valid_from, 1e-3) : 0.0;
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(t0 + (i == 0 ? 0.0 : std::pow(2.0, i - 4)));
  return grid;
}

inline void require_gamma_ideal(const ScalingTriple& s, const char* what) {
  if (!ideal_scaling_check(s, scaling_probe_grid(s), 1e-10).gamma_ok) {
    throw PreconditionError(std::string(what) + ": triple violates gamma_dot = e^alpha");
  }
}

}  // namespace detail

/// D_h(x*, Z) + e^{beta_t} (f(X) - f*), with Z = grad h*(W) = X + e^{-alpha} Xdot.
inline double energy_at(const MirrorMap& h, const Objective& f, const ScalingTriple& s, double t, const Vector& X,
                        const Vector& W, const Vector& x_star) {
  const double fstar = f.min_value() ? *f.min_value() : f.value(x_star);
  const Vector Z = h.dual_gradient(W);
  return bregman_divergence(h, x_star, Z) + std::exp(s.beta(t)) * (f.value(X) - fstar);
}

/// Xdot = e^alpha (grad h*(W) - X), Wdot = -e^{alpha+beta} grad f(X).
inline FlowSystem build_el_system(const MirrorPtr& h, const ObjectivePtr& f, const ScalingTriple& s) {
  detail::require_gamma_ideal(s, "build_el_system");
  const Index d = f->dim();
  FlowSystem sys;
  sys.kind = FlowKind::euler_lagrange;
  sys.dim = d;
  sys.layout = {"X", "W"};
  sys.valid_from = s.valid_from;
  sys.vector_field = [h, f, s, d](double t, const Vector& y) {
    const Vector X = y.head(d);
    const double ea = std::exp(s.alpha(t));
    Vector out(2 * d);
    out.head(d) = ea * (h->dual_gradient(y.tail(d)) - X);
    out.tail(d) = -std::exp(s.alpha(t) + s.beta(t)) * f->gradient(X);
    return out;
  };
  sys.initial_state_from = [h, d](const Vector& x0, double) {
    Vector y(2 * d);
    y << x0, h->gradient(x0);
    return y;
  };
  sys.f_gap = detail::gap_monitor(f);
  if (f->minimizer()) {
    const Vector xs = *f->minimizer();
    sys.energy = [h, f, s, d, xs](double t, const Vector& y) {
      return energy_at(*h, *f, s, t, y.head(d), y.tail(d), xs);
    };
  }
  return sys;
}

/// Legendre-dual form in (X, P):
///   Z = grad h*(grad h(X) + e^{-gamma} P),
///   Xdot = e^alpha (Z - X),
///   Pdot = -e^{alpha+gamma} hess h(X) (Z - X) + e^alpha P - e^{alpha+beta+gamma} grad f(X).
inline FlowSystem build_hamiltonian_system(const MirrorPtr& h, const ObjectivePtr& f, const ScalingTriple& s) {
  detail::require_gamma_ideal(s, "build_hamiltonian_system");
  const Index d = f->dim();
  FlowSystem sys;
  sys.kind = FlowKind::hamiltonian;
  sys.dim = d;
  sys.layout = {"X", "P"};
  sys.valid_from = s.valid_from;
  sys.vector_field = [h, f, s, d](double t, const Vector& y) {
    const Vector X = y.head(d);
    const Vector P = y.tail(d);
    const double a = s.alpha(t), b = s.beta(t), g = s.gamma(t);
    const Vector Zm = h->dual_gradient(h->gradient(X) + std::exp(-g) * P) - X;
    Vector out(2 * d);
    out.head(d) = std::exp(a) * Zm;
    out.tail(d) = -std::exp(a + g) * (h->hessian(X) * Zm) + std::exp(a) * P - std::exp(a + b + g) * f->gradient(X);
    return out;
  };
  sys.initial_state_from = [d](const Vector& x0, double) {
    Vector y = Vector::Zero(2 * d);
    y.head(d) = x0;
    return y;
  };
  sys.f_gap = detail::gap_monitor(f);
  if (f->minimizer()) {
    const Vector xs = *f->minimizer();
    sys.energy = [h, f, s, d, xs](double t, const Vector& y) {
      const Vector X = y.head(d);
      const Vector W = h->gradient(X) + std::exp(-s.gamma(t)) * y.tail(d);
      return energy_at(*h, *f, s, t, X, W, xs);
    };
  }
  return sys;
}

inline constexpr double kGradientFloor = 1e-12;

/// Xdot = -grad f / ||grad f||^{(p-2)/(p-1)}; zero once ||grad f|| <= 1e-12.
inline FlowSystem build_rescaled_gradient_flow(const ObjectivePtr& f, int p) {
  if (p < 2) throw InputError("build_rescaled_gradient_flow: p must be at least 2");
  const Index d = f->dim();
  const double e = static_cast<double>(p - 2) / static_cast<double>(p - 1);
  FlowSystem sys;
  sys.kind = FlowKind::rescaled_gradient;
  sys.dim = d;
  sys.layout = {"X"};
  sys.vector_field = [f, e](double, const Vector& X) -> Vector {
    const Vector g = f->gradient(X);
    const double n = g.norm();
    if (n <= kGradientFloor) return Vector::Zero(X.size());
    return -g / std::pow(n, e);
  };
  sys.initial_state_from = [](const Vector& x0, double) { return x0; };
  sys.f_gap = detail::gap_monitor(f);
  return sys;
}

/// Xdot = -[hess h(X)]^{-1} grad f(X).
inline FlowSystem build_natural_gradient_flow(const MirrorPtr& h, const ObjectivePtr& f) {
  const Index d = f->dim();
  FlowSystem sys;
  sys.kind = FlowKind::natural_gradient;
  sys.dim = d;
  sys.layout = {"X"};
  sys.vector_field = [h, f](double t, const Vector& X) -> Vector {
    const Matrix H = h->hessian(X);
    Eigen::FullPivLU<Matrix> lu(H);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
      std::ostringstream os;
      os << "natural gradient flow: singular mirror Hessian at t=" << t << ", X=" << X.transpose();
      throw NumericalError(os.str());
    }
    return -lu.solve(f->gradient(X));
  };
  sys.initial_state_from = [](const Vector& x0, double) { return x0; };
  sys.f_gap = detail::gap_monitor(f);
  return sys;
}

/// Euler-Lagrange system of the massless triple: Xdot = (grad h*(W) - X)/m, Wdot = -grad f(X).
inline FlowSystem build_massless_system(const MirrorPtr& h, const ObjectivePtr& f, double m) {
  if (!(m > 0.0)) throw InputError("build_massless_system: m must be positive");
  FlowSystem sys = build_el_system(h, f, massless_triple(m));
  sys.kind = FlowKind::massless_lagrangian;
  return sys;
}

struct UnitForce {};
struct MatchedForce {
  double C;
};

/// Euclidean second-order form in (X, V):
///   Xddot + (e^alpha - alpha_dot) Xdot + e^{2 alpha + beta} grad f(X) = 0.
/// Unit force gives Xddot + (r/t) Xdot + grad f = 0; matched(C) is the polynomial
/// flow of order p = r - 1.
inline FlowSystem build_euclidean_r_system(const ObjectivePtr& f, double r,
                                           std::variant<UnitForce, MatchedForce> force = UnitForce{}) {
  if (!(r > 0.0)) throw InputError("build_euclidean_r_system: r must be positive");
  const Index d = f->dim();
  FlowSystem sys;
  sys.kind = FlowKind::euclidean_r;
  sys.dim = d;
  sys.layout = {"X", "V"};
  sys.valid_from = 0.1;

  std::function<double(double)> force_coeff;
  std::function<double(double)> z_coeff;  // e^{-alpha}: Z = X + e^{-alpha} V
  std::function<double(double)> weight;   // e^{beta}
  bool has_energy = true;
  if (const auto* mf = std::get_if<MatchedForce>(&force)) {
    const double p = r - 1.0;
    const double C = mf->C;
    if (!(p > 0.0) || !(C > 0.0)) throw InputError("build_euclidean_r_system: matched force needs r > 1 and C > 0");
    force_coeff = [p, C](double t) { return C * p * p * std::pow(t, p - 2.0); };
    z_coeff = [p](double t) { return t / p; };
    weight = [p, C](double t) { return C * std::pow(t, p); };
  } else {
    force_coeff = [](double) { return 1.0; };
    // Valid Lyapunov functional only when the triple is ideal, i.e. r >= 3.
    has_energy = r >= 3.0;
    z_coeff = [r](double t) { return t / (r - 1.0); };
    weight = [r](double t) { return t * t / ((r - 1.0) * (r - 1.0)); };
  }
  sys.vector_field = [f, r, force_coeff, d](double t, const Vector& y) {
    Vector out(2 * d);
    out.head(d) = y.tail(d);
    out.tail(d) = -(r / t) * y.tail(d) - force_coeff(t) * f->gradient(y.head(d));
    return out;
  };
  sys.initial_state_from = [d](const Vector& x0, double) {
    Vector y = Vector::Zero(2 * d);
    y.head(d) = x0;
    return y;
  };
  sys.f_gap = detail::gap_monitor(f);
  if (has_energy && f->minimizer() && f->min_value()) {
    const Vector xs = *f->minimizer();
    const double fstar = *f->min_value();
    sys.energy = [f, xs, fstar, z_coeff, weight, d](double t, const Vector& y) {
      const Vector Z = y.head(d) + z_coeff(t) * y.tail(d);
      return 0.5 * (Z - xs).squaredNorm() + weight(t) * (f->value(y.head(d)) - fstar);
    };
  }
  return sys;
}

}  // namespace bregman
