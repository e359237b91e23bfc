#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bregman/core/types.hpp"

namespace bregman {

/// Order-s smoothness: the s-th derivative is L-Lipschitz.
struct Smoothness {
  int order;
  double lipschitz;
};

/// sigma-uniform convexity of order p: D_f(y,x) >= (sigma/p)||y-x||^p.
struct UniformConvexity {
  int order;
  double sigma;
};

/// Objective f with derivatives up to order 3 and optional metadata.
///
/// Derived classes fill the metadata in their constructors; the oracle is
/// immutable afterwards, so instances may be shared across threads.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double value(const Vector& x) const = 0;
  virtual Vector gradient(const Vector& x) const = 0;

  virtual Matrix hessian(const Vector& x) const {
    (void)x;
    throw CapabilityError(name_ + ": Hessian not available");
  }

  virtual Vector hessian_apply(const Vector& x, const Vector& v) const { return hessian(x) * v; }

  /// Third derivative contracted twice with v, returned as a vector: D^3 f(x)[v, v, .].
  virtual Vector third_apply(const Vector& x, const Vector& v) const {
    (void)x;
    (void)v;
    throw CapabilityError(name_ + ": third derivative not available");
  }

  /// Third derivative contracted once with u, as a symmetric matrix D^3 f(x)[u, ., .].
  /// The default recovers it from third_apply by polarization.
  virtual Matrix third_matrix(const Vector& x, const Vector& u) const {
    const Index d = dim();
    Matrix m(d, d);
    for (Index j = 0; j < d; ++j) {
      Vector e = Vector::Zero(d);
      e(j) = 1.0;
      m.col(j) = 0.25 * (third_apply(x, u + e) - third_apply(x, u - e));
    }
    return 0.5 * (m + m.transpose());
  }

  /// Radius of {x : f(x) <= level} around the minimizer, when known in closed form.
  virtual std::optional<double> level_set_radius(double level) const {
    (void)level;
    return std::nullopt;
  }

  const std::string& name() const { return name_; }
  Index dim() const { return dim_; }
  int derivative_order() const { return derivative_order_; }

  /// Lipschitz constant of the given derivative order, if declared.
  std::optional<double> smoothness(int order) const {
    for (const auto& s : smoothness_) {
      if (s.order == order) return s.lipschitz;
    }
    return std::nullopt;
  }
  const std::vector<Smoothness>& smoothness_table() const { return smoothness_; }
  const std::optional<UniformConvexity>& uniform_convexity() const { return uniform_convexity_; }
  const std::optional<Vector>& minimizer() const { return minimizer_; }
  const std::optional<double>& min_value() const { return min_value_; }

 protected:
  Objective(std::string name, Index dim, int derivative_order)
      : name_(std::move(name)), dim_(dim), derivative_order_(derivative_order) {
    if (dim < 1) throw InputError("objective dimension must be at least 1");
  }

  void check_dim(const Vector& x) const {
    if (x.size() != dim_) {
      throw InputError(name_ + ": expected dimension " + std::to_string(dim_) + ", got " +
                       std::to_string(x.size()));
    }
  }

  std::string name_;
  Index dim_;
  int derivative_order_;
  std::vector<Smoothness> smoothness_;
  std::optional<UniformConvexity> uniform_convexity_;
  std::optional<Vector> minimizer_;
  std::optional<double> min_value_;
};

using ObjectivePtr = std::shared_ptr<const Objective>;

/// f(x) = 1/2 (x-c)^T Q (x-c) + f_min with Q symmetric positive definite.
/// Covers diagonal quadratics and least squares.
class Quadratic final : public Objective {
 public:
  Quadratic(std::string name, Matrix q, Vector center, double f_min = 0.0)
      : Objective(std::move(name), q.rows(), 3), q_(std::move(q)), center_(std::move(center)) {
    if (q_.rows() != q_.cols() || center_.size() != q_.rows()) {
      throw InputError(name_ + ": inconsistent quadratic dimensions");
    }
    q_ = 0.5 * (q_ + q_.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(q_, Eigen::EigenvaluesOnly);
    lambda_min_ = eig.eigenvalues().minCoeff();
    lambda_max_ = eig.eigenvalues().maxCoeff();
    if (!(lambda_min_ > 0.0)) throw InputError(name_ + ": Q must be positive definite");
    smoothness_ = {{1, lambda_max_}, {2, 0.0}, {3, 0.0}};
    uniform_convexity_ = UniformConvexity{2, lambda_min_};
    minimizer_ = center_;
    min_value_ = f_min;
    f_min_ = f_min;
  }

  double value(const Vector& x) const override {
    check_dim(x);
    const Vector r = x - center_;
    return 0.5 * r.dot(q_ * r) + f_min_;
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return q_ * (x - center_);
  }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    return q_;
  }
  Vector third_apply(const Vector& x, const Vector& v) const override {
    check_dim(x);
    (void)v;
    return Vector::Zero(dim_);
  }
  Matrix third_matrix(const Vector& x, const Vector& u) const override {
    check_dim(x);
    (void)u;
    return Matrix::Zero(dim_, dim_);
  }

  std::optional<double> level_set_radius(double level) const override {
    const double excess = std::max(0.0, level - f_min_);
    return std::sqrt(2.0 * excess / lambda_min_);
  }

  const Matrix& q() const { return q_; }
  double lambda_min() const { return lambda_min_; }
  double lambda_max() const { return lambda_max_; }

 private:
  Matrix q_;
  Vector center_;
  double f_min_ = 0.0;
  double lambda_min_ = 0.0;
  double lambda_max_ = 0.0;
};

/// f(x) = (1/p)||x||^p, p >= 2. Uniformly convex of order p with sigma = 2^{2-p};
/// the (p-1)-st derivative is (p-1)!-Lipschitz.
class PowerNorm final : public Objective {
 public:
  PowerNorm(Index dim, double p)
      : Objective("power_norm", dim, (p == 2.0 || p >= 4.0) ? 3 : 2), p_(p) {
    if (p < 2.0) throw InputError("power_norm: p must be at least 2");
    const double ip = std::round(p);
    if (ip == p) {
      smoothness_.push_back({static_cast<int>(ip) - 1, factorial(static_cast<int>(ip) - 1)});
    }
    uniform_convexity_ = UniformConvexity{static_cast<int>(std::round(p)), std::pow(2.0, 2.0 - p)};
    minimizer_ = Vector::Zero(dim);
    min_value_ = 0.0;
  }

  double value(const Vector& x) const override {
    check_dim(x);
    return std::pow(x.norm(), p_) / p_;
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    const double r = x.norm();
    if (r == 0.0) return Vector::Zero(dim_);
    return std::pow(r, p_ - 2.0) * x;
  }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    const double r = x.norm();
    if (p_ == 2.0) return Matrix::Identity(dim_, dim_);
    if (r == 0.0) return Matrix::Zero(dim_, dim_);
    return std::pow(r, p_ - 2.0) * Matrix::Identity(dim_, dim_) +
           (p_ - 2.0) * std::pow(r, p_ - 4.0) * x * x.transpose();
  }
  Vector third_apply(const Vector& x, const Vector& v) const override {
    check_dim(x);
    if (derivative_order_ < 3) return Objective::third_apply(x, v);
    if (p_ == 2.0) return Vector::Zero(dim_);
    const double r = x.norm();
    if (r == 0.0) return Vector::Zero(dim_);
    const double xv = x.dot(v);
    const double vv = v.squaredNorm();
    Vector out = (p_ - 2.0) * std::pow(r, p_ - 4.0) * (2.0 * xv * v + vv * x);
    if (p_ != 4.0) out += (p_ - 2.0) * (p_ - 4.0) * std::pow(r, p_ - 6.0) * xv * xv * x;
    return out;
  }

  std::optional<double> level_set_radius(double level) const override {
    return std::pow(std::max(0.0, p_ * level), 1.0 / p_);
  }

  double p() const { return p_; }

 private:
  double p_;
};

/// f(x) = log sum_i exp(a_i^T x + b_i), analytic derivatives to order 3.
class LogSumExp final : public Objective {
 public:
  LogSumExp(Matrix a, Vector b) : Objective("log_sum_exp", a.cols(), 3), a_(std::move(a)), b_(std::move(b)) {
    if (a_.rows() != b_.size()) throw InputError("log_sum_exp: rows of A must match b");
    // Hessian of lse is A^T (diag(pi) - pi pi^T) A, whose spectral norm is at most ||A||^2 / 2.
    Eigen::JacobiSVD<Matrix> svd(a_);
    const double s = svd.singularValues()(0);
    smoothness_ = {{1, 0.5 * s * s}};
  }

  double value(const Vector& x) const override {
    check_dim(x);
    const Vector z = a_ * x + b_;
    const double zmax = z.maxCoeff();
    return zmax + std::log((z.array() - zmax).exp().sum());
  }
  Vector gradient(const Vector& x) const override { return a_.transpose() * softmax(x); }
  Matrix hessian(const Vector& x) const override {
    const Vector pi = softmax(x);
    const Matrix w = Matrix(pi.asDiagonal()) - pi * pi.transpose();
    return a_.transpose() * w * a_;
  }
  Vector third_apply(const Vector& x, const Vector& v) const override {
    const Vector pi = softmax(x);
    const Vector s = a_ * v;
    const double m1 = pi.dot(s);
    const double m2 = pi.dot(s.cwiseProduct(s));
    const Vector inner = pi.cwiseProduct(s.cwiseProduct(s)) - m2 * pi - 2.0 * m1 * pi.cwiseProduct(s) +
                         2.0 * m1 * m1 * pi;
    return a_.transpose() * inner;
  }

 private:
  Vector softmax(const Vector& x) const {
    check_dim(x);
    const Vector z = a_ * x + b_;
    const double zmax = z.maxCoeff();
    Vector e = (z.array() - zmax).exp().matrix();
    return e / e.sum();
  }

  Matrix a_;
  Vector b_;
};

/// f == 0 in d dimensions.
class ZeroObjective final : public Objective {
 public:
  explicit ZeroObjective(Index dim) : Objective("zero", dim, 3) {
    smoothness_ = {{1, 0.0}, {2, 0.0}, {3, 0.0}};
    min_value_ = 0.0;
  }
  double value(const Vector& x) const override {
    check_dim(x);
    return 0.0;
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return Vector::Zero(dim_);
  }
  Matrix hessian(const Vector& x) const override {
    check_dim(x);
    return Matrix::Zero(dim_, dim_);
  }
  Vector third_apply(const Vector& x, const Vector& v) const override {
    check_dim(x);
    (void)v;
    return Vector::Zero(dim_);
  }
};

/// f = a + b where both terms share a dimension. Metadata is supplied by the caller,
/// since smoothness and convexity constants of a sum are not derivable in general.
class SumObjective final : public Objective {
 public:
  SumObjective(std::string name, ObjectivePtr a, ObjectivePtr b)
      : Objective(std::move(name), a->dim(), std::min(a->derivative_order(), b->derivative_order())),
        a_(std::move(a)), b_(std::move(b)) {
    if (a_->dim() != b_->dim()) throw InputError("sum objective: dimension mismatch");
  }

  SumObjective& with_uniform_convexity(UniformConvexity uc) {
    uniform_convexity_ = uc;
    return *this;
  }
  SumObjective& with_smoothness(Smoothness s) {
    smoothness_.push_back(s);
    return *this;
  }
  SumObjective& with_minimizer(Vector x, double f) {
    minimizer_ = std::move(x);
    min_value_ = f;
    return *this;
  }

  double value(const Vector& x) const override { return a_->value(x) + b_->value(x); }
  Vector gradient(const Vector& x) const override { return a_->gradient(x) + b_->gradient(x); }
  Matrix hessian(const Vector& x) const override { return a_->hessian(x) + b_->hessian(x); }
  Vector third_apply(const Vector& x, const Vector& v) const override {
    return a_->third_apply(x, v) + b_->third_apply(x, v);
  }

 private:
  ObjectivePtr a_;
  ObjectivePtr b_;
};

/// Objective assembled from callables. Used for user-supplied oracles and tests.
class FunctionObjective final : public Objective {
 public:
  using ValueFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using HessFn = std::function<Matrix(const Vector&)>;
  using ThirdFn = std::function<Vector(const Vector&, const Vector&)>;

  FunctionObjective(std::string name, Index dim, ValueFn value, GradFn grad, HessFn hess = {},
                    ThirdFn third = {})
      : Objective(std::move(name), dim, third ? 3 : (hess ? 2 : 1)),
        value_(std::move(value)), grad_(std::move(grad)), hess_(std::move(hess)), third_(std::move(third)) {}

  FunctionObjective& with_smoothness(Smoothness s) {
    smoothness_.push_back(s);
    return *this;
  }
  FunctionObjective& with_uniform_convexity(UniformConvexity uc) {
    uniform_convexity_ = uc;
    return *this;
  }
  FunctionObjective& with_minimizer(Vector x, double f) {
    minimizer_ = std::move(x);
    min_value_ = f;
    return *this;
  }

  double value(const Vector& x) const override {
    check_dim(x);
    return value_(x);
  }
  Vector gradient(const Vector& x) const override {
    check_dim(x);
    return grad_(x);
  }
  Matrix hessian(const Vector& x) const override {
    if (!hess_) return Objective::hessian(x);
    check_dim(x);
    return hess_(x);
  }
  Vector third_apply(const Vector& x, const Vector& v) const override {
    if (!third_) return Objective::third_apply(x, v);
    check_dim(x);
    return third_(x, v);
  }

 private:
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
  ThirdFn third_;
};

// ---------------------------------------------------------------------------
// Benchmark catalog

inline std::shared_ptr<Quadratic> make_diagonal_quadratic(const std::vector<double>& lambda) {
  if (lambda.empty()) throw InputError("quadratic: lambda must be nonempty");
  Vector l(static_cast<Index>(lambda.size()));
  for (std::size_t i = 0; i < lambda.size(); ++i) l(static_cast<Index>(i)) = lambda[i];
  return std::make_shared<Quadratic>("quadratic", Matrix(l.asDiagonal()),
                                     Vector::Zero(static_cast<Index>(lambda.size())));
}

/// The 2-D ill-conditioned quadratic 1/2 (x1^2 + 10 x2^2).
inline std::shared_ptr<Quadratic> make_ill_conditioned_quadratic() {
  auto q = make_diagonal_quadratic({1.0, 10.0});
  return std::make_shared<Quadratic>("ill_conditioned_quadratic", q->q(), Vector::Zero(2));
}

/// f(x) = 1/2 ||Ax - b||^2 with seeded Gaussian A (rows x dim) and b. The minimizer is
/// computed at construction by a direct solve of the normal equations.
inline std::shared_ptr<Quadratic> make_least_squares(Index rows, Index dim, std::uint64_t seed) {
  if (rows < dim) throw InputError("least_squares: need rows >= dim for a unique minimizer");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(rows, dim);
  Vector b(rows);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = normal(rng) / std::sqrt(static_cast<double>(rows));
    b(i) = normal(rng);
  }
  const Matrix q = a.transpose() * a;
  const Vector x_star = q.ldlt().solve(a.transpose() * b);
  const double f_star = 0.5 * (a * x_star - b).squaredNorm();
  return std::make_shared<Quadratic>("least_squares", q, x_star, f_star);
}

/// Log-sum-exp over `terms` seeded affine forms in `dim` dimensions.
inline std::shared_ptr<LogSumExp> make_log_sum_exp(Index terms, Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(terms, dim);
  Vector b(terms);
  for (Index i = 0; i < terms; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = normal(rng);
    b(i) = 0.5 * normal(rng);
  }
  return std::make_shared<LogSumExp>(a, b);
}

inline std::shared_ptr<PowerNorm> make_power_norm(Index dim, double p) {
  return std::make_shared<PowerNorm>(dim, p);
}

/// f(x) = 1/2 ||x||^2 + (c/4) ||x||^4: 1-strongly convex, minimizer 0.
inline std::shared_ptr<SumObjective> make_quadratic_plus_quartic(Index dim, double c) {
  auto quad = std::make_shared<Quadratic>("half_norm_sq", Matrix::Identity(dim, dim), Vector::Zero(dim));
  auto quart = std::make_shared<FunctionObjective>(
      "quartic", dim, [c](const Vector& x) { return 0.25 * c * std::pow(x.squaredNorm(), 2); },
      [c](const Vector& x) -> Vector { return c * x.squaredNorm() * x; },
      [c](const Vector& x) -> Matrix {
        return c * (x.squaredNorm() * Matrix::Identity(x.size(), x.size()) + 2.0 * x * x.transpose());
      },
      [c](const Vector& x, const Vector& v) -> Vector {
        return c * (4.0 * x.dot(v) * v + 2.0 * v.squaredNorm() * x);
      });
  auto sum = std::make_shared<SumObjective>("quadratic_plus_quartic", quad, quart);
  sum->with_uniform_convexity({2, 1.0}).with_minimizer(Vector::Zero(dim), 0.0);
  return sum;
}

/// Identifier and factory for each built-in problem.
struct ProblemEntry {
  std::string id;
  std::function<ObjectivePtr()> make;
};

/// Built-in problems with their default parameters.
inline std::vector<ProblemEntry> builtin_problems(std::uint64_t seed = 7) {
  return {
      {"quadratic", [] { return make_diagonal_quadratic({1.0, 10.0}); }},
      {"ill_conditioned_quadratic", [] { return make_ill_conditioned_quadratic(); }},
      {"log_sum_exp", [seed] { return make_log_sum_exp(6, 3, seed); }},
      {"power_norm", [] { return make_power_norm(2, 4.0); }},
      {"least_squares", [seed] { return make_least_squares(20, 10, seed); }},
  };
}

}  // namespace bregman
