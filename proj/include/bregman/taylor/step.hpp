#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "bregman/core/functions.hpp"
#include "bregman/core/objective.hpp"
#include "bregman/core/types.hpp"

namespace bregman {

/// Parameters of the update operator G_{p,eps,N}.
struct StepConfig {
  int p = 2;
  double epsilon = 1.0;
  double N = 2.0;

  void validate() const {
    if (p < 2 || p > 4) throw CapabilityError("g_step: p must be 2, 3, or 4");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InputError("g_step: epsilon must be positive and finite");
    if (!(N > 0.0) || !std::isfinite(N)) throw InputError("g_step: N must be positive and finite");
  }
};

/// Quantities of the one-step progress lemma for y = G(x).
/// The lemma requires N > 1; for N <= 1 the bounds that need it are NaN/inf and
/// `applicable` is false.
struct StepCertificate {
  Vector x, y;
  double grad_y_norm = 0.0;
  double progress = 0.0;      ///< <grad f(y), x - y>
  double lemma1_lower = 0.0;  ///< M eps^{1/(p-1)} ||grad f(y)||^{p/(p-1)}
  double move_norm = 0.0;     ///< ||x - y||
  double move_lower = 0.0;    ///< M eps^{1/(p-1)} ||grad f(y)||^{1/(p-1)}
  double move_upper = 0.0;    ///< (eps ||grad f(y)|| / (N-1))^{1/(p-1)}
  double residual = 0.0;      ///< norm of the subproblem optimality condition at y
  bool applicable = true;
  bool progress_ok = true;
  bool move_ok = true;

  bool ok() const { return progress_ok && move_ok; }
};

struct StepResult {
  Vector y;
  StepCertificate cert;
  int inner_iterations = 0;
};

inline constexpr double kLemmaSlack = 1e-8;

/// M = (N^2 - 1)^{(p-2)/(2p-2)} / (2N); equals 1/(2N) for p = 2.
inline double lemma1_constant(int p, double N) {
  if (p == 2) return 1.0 / (2.0 * N);
  if (N < 1.0) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(N * N - 1.0, static_cast<double>(p - 2) / (2.0 * p - 2.0)) / (2.0 * N);
}

/// Gradient of the regularized Taylor model at y:
/// sum_{i=1}^{p-1} (1/(i-1)!) D^i f(x)[y-x]^{i-1} + (N/eps) ||y-x||^{p-2} (y-x).
inline Vector model_gradient(const Objective& f, const Vector& x, const Vector& y, const StepConfig& cfg) {
  const Vector u = y - x;
  return taylor_model_gradient(f, x, cfg.p - 1, y) + (cfg.N / cfg.epsilon) * std::pow(u.norm(), cfg.p - 2) * u;
}

/// f_{p-1}(y; x) + (N/(eps p)) ||y - x||^p.
inline double model_value(const Objective& f, const Vector& x, const Vector& y, const StepConfig& cfg) {
  return taylor_model(f, x, cfg.p - 1, y) + cfg.N / (cfg.epsilon * cfg.p) * std::pow((y - x).norm(), cfg.p);
}

/// Evaluates both progress inequalities and the optimality residual at (x, y).
/// Violations are reported in the flags, never thrown.
inline StepCertificate verify_lemma1(const Objective& f, const Vector& x, const Vector& y, const StepConfig& cfg) {
  cfg.validate();
  StepCertificate c;
  c.x = x;
  c.y = y;
  const Vector gy = f.gradient(y);
  const double q = 1.0 / (cfg.p - 1);
  c.grad_y_norm = gy.norm();
  c.progress = gy.dot(x - y);
  c.move_norm = (x - y).norm();
  c.residual = model_gradient(f, x, y, cfg).norm();
  const double M = lemma1_constant(cfg.p, cfg.N);
  c.applicable = cfg.N > 1.0 || cfg.p == 2;
  c.lemma1_lower = M * std::pow(cfg.epsilon, q) * std::pow(c.grad_y_norm, cfg.p * q);
  c.move_lower = M * std::pow(cfg.epsilon, q) * std::pow(c.grad_y_norm, q);
  c.move_upper = cfg.N > 1.0 ? std::pow(cfg.epsilon * c.grad_y_norm / (cfg.N - 1.0), q)
                             : std::numeric_limits<double>::infinity();
  if (c.applicable) {
    c.progress_ok = c.progress >= c.lemma1_lower - kLemmaSlack;
    c.move_ok = c.move_norm >= c.move_lower - kLemmaSlack && c.move_norm <= c.move_upper + kLemmaSlack;
  }
  return c;
}

/// eps = (p-1)!/L_{p-1} from the declared smoothness; +inf when L_{p-1} = 0
/// (the Taylor model is exact and any step size satisfies the premise).
inline double smoothness_epsilon(const Objective& f, int p) {
  if (p < 2) throw InputError("smoothness_epsilon: p must be at least 2");
  const auto L = f.smoothness(p - 1);
  if (!L) {
    throw CapabilityError("smoothness_epsilon: '" + f.name() + "' declares no smoothness of order " +
                          std::to_string(p - 1));
  }
  if (*L < 0.0) throw InputError("smoothness_epsilon: negative Lipschitz constant");
  if (*L == 0.0) return std::numeric_limits<double>::infinity();
  return factorial(p - 1) / *L;
}

namespace detail {

// Cubic model: u = -(H + c r I)^{-1} g with r = ||u||, c = N/eps. phi(r) = ||(H + c r I)^{-1} g|| - r
// is convex and decreasing, so Newton from the left never overshoots the root; bisection guards it.
inline Vector solve_cubic_subproblem(const Matrix& H, const Vector& g, double c, int& iterations) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (H + H.transpose()));
  if (es.info() != Eigen::Success) throw SolverError("g_step p=3: eigendecomposition failed", Vector(), NAN);
  const Vector lam = es.eigenvalues();
  const Vector gt = es.eigenvectors().transpose() * g;
  const double scale = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < -1e-12 * scale) {
    throw SolverError("g_step p=3: Taylor model is nonconvex (negative Hessian eigenvalue)", Vector(), NAN);
  }
  auto eval = [&](double r, double& phi, double& dphi) {
    double s2 = 0.0, s3 = 0.0;
    for (Index i = 0; i < lam.size(); ++i) {
      const double den = std::max(lam[i], 0.0) + c * r;
      if (gt[i] == 0.0) continue;
      if (den <= 0.0) {
        phi = std::numeric_limits<double>::infinity();
        dphi = -std::numeric_limits<double>::infinity();
        return;
      }
      s2 += gt[i] * gt[i] / (den * den);
      s3 += gt[i] * gt[i] / (den * den * den);
    }
    const double n = std::sqrt(s2);
    phi = n - r;
    dphi = (n > 0.0 ? -c * s3 / n : 0.0) - 1.0;
  };

  double lo = 0.0, hi = std::sqrt(g.norm() / c);
  double phi_lo, dphi_lo;
  eval(lo, phi_lo, dphi_lo);
  double r = hi;
  iterations = 0;
  for (; iterations < 200; ++iterations) {
    double cand = std::isfinite(phi_lo) ? lo - phi_lo / dphi_lo : 0.5 * (lo + hi);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    double phi, dphi;
    eval(cand, phi, dphi);
    r = cand;
    if (phi == 0.0) break;
    if (phi > 0.0) {
      lo = cand;
      phi_lo = phi;
      dphi_lo = dphi;
    } else {
      hi = cand;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi || std::abs(phi) <= 1e-15 * (1.0 + r)) break;
  }
  Vector ut(lam.size());
  for (Index i = 0; i < lam.size(); ++i) {
    const double den = std::max(lam[i], 0.0) + c * r;
    ut[i] = den > 0.0 ? -gt[i] / den : 0.0;
  }
  return es.eigenvectors() * ut;
}

// Quartic-regularized third-order model, minimized by damped Newton with an
// Armijo line search and a Levenberg shift whenever the model Hessian is indefinite.
inline Vector solve_quartic_subproblem(const Objective& f, const Vector& x, const StepConfig& cfg, double target,
                                       int& iterations, double& residual) {
  const Index d = x.size();
  const double c = cfg.N / cfg.epsilon;
  const Vector g = f.gradient(x);
  const Matrix H = f.hessian(x);
  auto value = [&](const Vector& u) {
    return g.dot(u) + 0.5 * u.dot(H * u) + u.dot(f.third_apply(x, u)) / 6.0 + 0.25 * c * std::pow(u.squaredNorm(), 2);
  };
  auto grad = [&](const Vector& u) {
    return Vector(g + H * u + 0.5 * f.third_apply(x, u) + c * u.squaredNorm() * u);
  };
  Vector u = Vector::Zero(d);
  Vector gr = g;
  double val = 0.0;
  residual = gr.norm();
  iterations = 0;
  for (; iterations < 500 && residual > target; ++iterations) {
    Matrix Hm = H + f.third_matrix(x, u) + c * (u.squaredNorm() * Matrix::Identity(d, d) + 2.0 * u * u.transpose());
    Hm = 0.5 * (Hm + Hm.transpose());
    Vector dir;
    double mu = 0.0;
    for (int k = 0; k < 60; ++k) {
      Eigen::LLT<Matrix> llt(Hm + mu * Matrix::Identity(d, d));
      if (llt.info() == Eigen::Success) {
        dir = -llt.solve(gr);
        if (all_finite(dir) && dir.dot(gr) < 0.0) break;
      }
      mu = mu == 0.0 ? 1e-12 * std::max(1.0, Hm.cwiseAbs().maxCoeff()) : 10.0 * mu;
      dir.resize(0);
    }
    if (dir.size() == 0) break;
    // Full Newton step first: near the solution model values differ by less than
    // their rounding error, so halving the residual is accepted in lieu of Armijo.
    const double slope = gr.dot(dir);
    Vector un = u + dir;
    double vn = value(un);
    if (!(vn <= val + 1e-4 * slope) && !(grad(un).norm() <= 0.5 * residual)) {
      double step = 0.5;
      bool moved = false;
      for (int k = 0; k < 60; ++k, step *= 0.5) {
        un = u + step * dir;
        vn = value(un);
        if (vn <= val + 1e-4 * step * slope) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    u = un;
    val = vn;
    gr = grad(u);
    residual = gr.norm();
  }
  return u;
}

}  // namespace detail

/// y = argmin_y f_{p-1}(y; x) + (N/(eps p)) ||y - x||^p with its certificate.
///
/// p = 2 is the closed-form gradient step, p = 3 a scalar secular solve on the
/// Hessian's eigenbasis, p = 4 an inner damped-Newton solve checked against the
/// optimality residual (target 1e-6).
inline StepResult g_step(const Objective& f, const Vector& x, const StepConfig& cfg) {
  cfg.validate();
  require_finite(x, "g_step x");
  if (x.size() != f.dim()) throw InputError("g_step: x has wrong dimension");
  if (f.derivative_order() < cfg.p - 1) {
    throw CapabilityError("g_step: '" + f.name() + "' lacks derivatives of order " + std::to_string(cfg.p - 1));
  }
  StepResult out;
  const Vector g = f.gradient(x);
  if (cfg.p == 2) {
    out.y = x - (cfg.epsilon / cfg.N) * g;
  } else if (cfg.p == 3) {
    if (g.norm() == 0.0) {
      out.y = x;
    } else {
      out.y = x + detail::solve_cubic_subproblem(f.hessian(x), g, cfg.N / cfg.epsilon, out.inner_iterations);
    }
    const double res = model_gradient(f, x, out.y, cfg).norm();
    if (!(res <= 1e-9 * (1.0 + g.norm()))) {
      throw SolverError("g_step p=3: residual " + std::to_string(res) + " above target", out.y, res);
    }
  } else {
    double res = 0.0;
    const double target = std::max(1e-13 * (1.0 + g.norm()), 1e-15);
    out.y = x + detail::solve_quartic_subproblem(f, x, cfg, target, out.inner_iterations, res);
    if (!(res <= 1e-6)) {
      throw SolverError("g_step p=4: residual " + std::to_string(res) + " above 1e-6", out.y, res);
    }
  }
  if (!all_finite(out.y)) throw NumericalError("g_step: non-finite result");
  out.cert = verify_lemma1(f, x, out.y, cfg);
  return out;
}

}  // namespace bregman
