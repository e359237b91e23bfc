#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bregman/core/mirror.hpp"
#include "bregman/core/types.hpp"
#include "bregman/flows/integrate.hpp"
#include "bregman/taylor/step.hpp"

namespace bregman {

/// Configuration of the rate-matching accelerated method.
/// Unset C defaults to M^{p-1}/p^p; an unset mirror to the Euclidean map (p = 2)
/// or d_p anchored at x0 (p > 2).
struct AccelConfig {
  int p = 2;
  double epsilon = 1.0;
  double N = 2.0;
  std::optional<double> C;
  MirrorPtr mirror;
  Vector x0;
  std::size_t max_iters = 1000;

  double max_C() const { return std::pow(lemma1_constant(p, N), p - 1) / std::pow(p, p); }
};

enum class Termination { completed, diverged, solver_error };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::diverged: return "diverged";
    case Termination::solver_error: return "solver_error";
  }
  return "unknown";
}

struct RestartSummary {
  std::size_t epoch_length = 0;  ///< m
  double kappa = 0.0;
  std::size_t epochs = 0;
  std::vector<double> dist_p;       ///< ||xhat - x*||^p at the start of each epoch and at the end
  std::vector<double> contraction;  ///< dist_p[i+1] / dist_p[i]
  double final_gap = 0.0;           ///< f(yhat) - f* after the trailing step
  double final_bound = 0.0;
  std::size_t total_iters = 0;
};

/// Per-iteration trace of a discrete method. Sequences are indexed by k; a
/// sequence the method does not produce is left empty.
struct RunRecord {
  std::string method;
  int p = 2;
  double epsilon = 0.0;
  double N = 0.0;
  double C = std::numeric_limits<double>::quiet_NaN();
  std::string mirror;
  std::optional<double> f_star;
  std::optional<double> R;
  std::size_t k_start = 0;

  std::vector<Vector> x, y, z;
  std::vector<Vector> grad_y;
  std::vector<double> f_y;
  std::vector<double> gap_x, gap_y;
  std::vector<StepCertificate> certs;
  std::vector<double> psi, psi_grad_norm, psi_grad_scale, ckp_fy, bound;
  std::vector<double> recursion_rhs;
  std::vector<double> progress_ratio;

  Termination termination = Termination::completed;
  std::optional<std::size_t> termination_k;
  std::string message;
  std::optional<RestartSummary> restart;

  std::size_t rows() const { return std::max({x.size(), y.size(), gap_x.size(), gap_y.size()}); }
};

namespace detail {
inline double at_or_nan(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
}
}  // namespace detail

/// CSV with columns k, f_gap_x, f_gap_y, bound, psi_zk, Ckp_fyk, progress, lemma1_lower, move_norm.
inline void write_run_csv(std::ostream& os, const RunRecord& r) {
  os << "k,f_gap_x,f_gap_y,bound,psi_zk,Ckp_fyk,progress,lemma1_lower,move_norm\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < r.rows(); ++i) {
    const bool has_cert = i < r.certs.size();
    os << (r.k_start + i) << ',' << format_double(detail::at_or_nan(r.gap_x, i)) << ','
       << format_double(detail::at_or_nan(r.gap_y, i)) << ',' << format_double(detail::at_or_nan(r.bound, i)) << ','
       << format_double(detail::at_or_nan(r.psi, i)) << ',' << format_double(detail::at_or_nan(r.ckp_fy, i)) << ','
       << format_double(has_cert ? r.certs[i].progress : nan) << ','
       << format_double(has_cert ? r.certs[i].lemma1_lower : nan) << ','
       << format_double(has_cert ? r.certs[i].move_norm : nan) << '\n';
  }
}

}  // namespace bregman
