#include <gtest/gtest.h>

#include <random>

#include "bregman/core.hpp"
#include "oracles.hpp"

using namespace bregman;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// f(x) = x^4 in one dimension, with derivatives up to order 3.
std::shared_ptr<FunctionObjective> quartic_1d() {
  return std::make_shared<FunctionObjective>(
      "x4", 1, [](const Vector& x) { return std::pow(x[0], 4); },
      [](const Vector& x) { return Vector::Constant(1, 4 * std::pow(x[0], 3)); },
      [](const Vector& x) { return Matrix::Constant(1, 1, 12 * x[0] * x[0]); },
      [](const Vector& x, const Vector& u) { return Vector::Constant(1, 24 * x[0] * u[0] * u[0]); });
}

}  // namespace

TEST(BregmanDivergence, EuclideanIsHalfSquaredDistance) {
  auto h = make_euclidean_mirror();
  EXPECT_NEAR(bregman_divergence(*h, vec({1, 2}), vec({0, 0})), 2.5, 1e-15);
}

TEST(BregmanDivergence, VanishesOnDiagonal) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  for (const auto& e : builtin_mirror_maps()) {
    const Vector x = vec({n(rng), n(rng)});
    auto h = e.make(vec({0.3, -0.2}), 3.0);
    EXPECT_NEAR(bregman_divergence(*h, x, x), 0.0, 1e-14) << e.id;
  }
}

TEST(BregmanDivergence, QuarticMatchesQuadrature) {
  auto h = make_pth_power_mirror(4.0, vec({0}));
  const double got = bregman_divergence(*h, vec({2}), vec({1}));
  const double ref = oracle::bregman_by_quadrature([&](const Vector& v) { return h->gradient(v); }, vec({2}), vec({1}));
  EXPECT_NEAR(ref, 2.75, 1e-10);
  EXPECT_NEAR(got, ref, 1e-10);
}

TEST(BregmanDivergence, NonnegativeForConvexMirrors) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  for (const auto& e : builtin_mirror_maps()) {
    auto h = e.make(vec({0.5, 1.0}), 3.0);
    for (int i = 0; i < 50; ++i) {
      const Vector x = vec({n(rng), n(rng)}), y = vec({n(rng), n(rng)});
      EXPECT_GE(bregman_divergence(*h, y, x), -1e-12) << e.id;
    }
  }
}

TEST(BregmanDivergence, RejectsDimensionMismatch) {
  auto h = make_euclidean_mirror();
  EXPECT_THROW(bregman_divergence(*h, vec({1, 2}), vec({1})), InputError);
}

TEST(RisingFactorial, SmallCases) {
  EXPECT_EQ(rising_factorial(3, 2), 12.0);
  EXPECT_EQ(rising_factorial(7, 1), 7.0);
  EXPECT_EQ(rising_factorial(2, 3), 24.0);
  EXPECT_EQ(rising_factorial(0, 3), 0.0);
}

TEST(RisingFactorial, MatchesProductLoop) {
  for (int k = 0; k < 30; ++k) {
    for (int m = 1; m <= 4; ++m) {
      double prod = 1;
      for (int i = 0; i < m; ++i) prod *= k + i;
      EXPECT_EQ(rising_factorial(k, m), prod);
    }
  }
}

TEST(RisingFactorial, RejectsBadArguments) {
  EXPECT_THROW(rising_factorial(-1, 2), InputError);
  EXPECT_THROW(rising_factorial(3, 0), InputError);
}

TEST(TaylorModel, FirstOrderAtMinimumOfHalfSquare) {
  auto f = make_diagonal_quadratic({1.0});
  EXPECT_NEAR(taylor_model(*f, vec({0}), 1, vec({1})), 0.0, 1e-15);
}

TEST(TaylorModel, QuadraticIsItsOwnSecondOrderModel) {
  auto f = make_ill_conditioned_quadratic();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int i = 0; i < 20; ++i) {
    const Vector x = vec({n(rng), n(rng)}), y = vec({n(rng), n(rng)});
    EXPECT_NEAR(taylor_model(*f, x, 2, y), f->value(y), 1e-12);
  }
}

TEST(TaylorModel, QuarticSecondOrderByHand) {
  auto f = quartic_1d();
  EXPECT_NEAR(taylor_model(*f, vec({1}), 2, vec({1.5})), 1 + 4 * 0.5 + 6 * 0.25, 1e-14);
}

TEST(TaylorModel, ThirdOrderOfCubicPolynomialIsExact) {
  auto f = quartic_1d();
  // Error of the order-3 model of x^4 at x is exactly (y - x)^4.
  EXPECT_NEAR(f->value(vec({1.5})) - taylor_model(*f, vec({1}), 3, vec({1.5})), std::pow(0.5, 4), 1e-13);
}

TEST(TaylorModel, GradientMatchesFiniteDifference) {
  auto f = make_log_sum_exp(6, 3, 7);
  const Vector x = vec({0.2, -0.1, 0.4}), y = vec({0.5, 0.3, -0.2});
  for (int order = 1; order <= 3; ++order) {
    const Vector g = taylor_model_gradient(*f, x, order, y);
    const Vector ref = oracle::gradient([&](const Vector& v) { return taylor_model(*f, x, order, v); }, y);
    EXPECT_LT((g - ref).norm(), 1e-7) << "order " << order;
  }
}

TEST(TaylorModel, RejectsUnsupportedOrder) {
  auto f = make_ill_conditioned_quadratic();
  EXPECT_THROW(taylor_model(*f, vec({0, 0}), 4, vec({1, 1})), CapabilityError);
}

TEST(IdealScaling, PolynomialIsTightOnBeta) {
  const auto r = ideal_scaling_check(polynomial_triple(2, 1), {1, 2, 5});
  EXPECT_TRUE(r.beta_ok);
  EXPECT_TRUE(r.gamma_ok);
  EXPECT_TRUE(r.beta_tight);
}

TEST(IdealScaling, ExponentialIsTightOnBeta) {
  const auto r = ideal_scaling_check(exponential_triple(1), {0.5, 1});
  EXPECT_TRUE(r.beta_ok);
  EXPECT_TRUE(r.gamma_ok);
  EXPECT_TRUE(r.beta_tight);
}

TEST(IdealScaling, EuclideanRWithLargeRIsNotTight) {
  const auto r = ideal_scaling_check(euclidean_r_triple(5), {0.5, 1, 2, 10});
  EXPECT_TRUE(r.beta_ok);
  EXPECT_FALSE(r.beta_tight);
  EXPECT_TRUE(r.gamma_ok);
}

TEST(IdealScaling, DerivativesMatchFiniteDifferences) {
  for (const auto& s : {polynomial_triple(3, 2), exponential_triple(0.7), euclidean_r_triple(4), massless_triple(0.1)}) {
    for (double t : {0.5, 1.3, 4.0}) {
      const double h = 1e-6;
      EXPECT_NEAR(s.alpha_dot(t), (s.alpha(t + h) - s.alpha(t - h)) / (2 * h), 1e-6);
      EXPECT_NEAR(s.beta_dot(t), (s.beta(t + h) - s.beta(t - h)) / (2 * h), 1e-6);
      EXPECT_NEAR(s.gamma_dot(t), (s.gamma(t + h) - s.gamma(t - h)) / (2 * h), 1e-5);
    }
  }
}

TEST(ScalingTriple, RejectsInvalidParameters) {
  EXPECT_THROW(polynomial_triple(0), InputError);
  EXPECT_THROW(polynomial_triple(2, -1), InputError);
  EXPECT_THROW(exponential_triple(0), InputError);
  EXPECT_THROW(massless_triple(0), InputError);
}

TEST(Mirror, EuclideanDualIsIdentity) {
  auto h = make_euclidean_mirror();
  const Vector w = vec({3, -1.5});
  EXPECT_EQ(h->dual_gradient(w), w);
}

TEST(Mirror, QuarticDualGradientByHand) {
  auto h = make_pth_power_mirror(4, vec({0, 0}));
  EXPECT_LT((h->dual_gradient(vec({8, 0})) - vec({2, 0})).norm(), 1e-14);
  EXPECT_LT((h->gradient(vec({2, 0})) - vec({8, 0})).norm(), 1e-14);
}

TEST(Mirror, DeclaredUniformConvexity) {
  for (int p : {2, 3, 4, 5}) {
    auto h = make_pth_power_mirror(p, vec({0, 0}));
    EXPECT_EQ(h->uniform_convexity().order, p);
    EXPECT_DOUBLE_EQ(h->uniform_convexity().sigma, std::pow(2.0, 2 - p));
  }
  auto d3 = make_scaled_pth_power_mirror(3, vec({1, 1}));
  EXPECT_DOUBLE_EQ(d3->uniform_convexity().sigma, 1.0);
}

TEST(Mirror, UniformConvexityInequalityHoldsOnSamples) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n;
  for (int p : {3, 4}) {
    auto h = make_scaled_pth_power_mirror(p, vec({0.2, -0.4}));
    const auto uc = h->uniform_convexity();
    for (int i = 0; i < 200; ++i) {
      const Vector x = vec({n(rng), n(rng)}), y = vec({n(rng), n(rng)});
      EXPECT_GE(bregman_divergence(*h, y, x), uc.sigma / p * std::pow((y - x).norm(), p) - 1e-12);
    }
  }
}

TEST(Mirror, DualGradientInvertsGradient) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (const auto& e : builtin_mirror_maps()) {
    for (double p : {2.0, 3.0, 4.0}) {
      auto h = e.make(vec({0.4, -1.0}), p);
      for (int i = 0; i < 20; ++i) {
        const Vector x = vec({n(rng), n(rng)});
        EXPECT_LT((h->dual_gradient(h->gradient(x)) - x).norm(), 1e-10 * (1 + x.norm())) << e.id << " p=" << p;
      }
    }
  }
}

TEST(Mirror, GradientAndHessianMatchFiniteDifferences) {
  const Vector x = vec({0.7, -0.3});
  for (const auto& e : builtin_mirror_maps()) {
    auto h = e.make(vec({-0.2, 0.5}), 3.0);
    const Vector g = oracle::gradient([&](const Vector& v) { return h->value(v); }, x);
    EXPECT_LT((h->gradient(x) - g).norm(), 1e-8) << e.id;
    const Matrix H = oracle::jacobian([&](const Vector& v) { return h->gradient(v); }, x);
    EXPECT_LT((h->hessian(x) - H).norm(), 1e-7) << e.id;
  }
}

TEST(Problems, QuadraticValueAndGradient) {
  auto f = make_diagonal_quadratic({1, 1});
  EXPECT_NEAR(f->value(vec({3, 4})), 12.5, 1e-15);
  EXPECT_EQ(f->gradient(vec({3, 4})), vec({3, 4}));
}

TEST(Problems, PowerNormGradientVanishesAtMinimizer) {
  auto f = make_power_norm(3, 4);
  EXPECT_EQ(f->gradient(Vector::Zero(3)).norm(), 0.0);
}

TEST(Problems, LogSumExpGradientMatchesFiniteDifferences) {
  auto f = make_log_sum_exp(8, 4, 13);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n;
  for (int i = 0; i < 20; ++i) {
    Vector x(4);
    for (Index j = 0; j < 4; ++j) x[j] = n(rng);
    const Vector ref = oracle::gradient([&](const Vector& v) { return f->value(v); }, x);
    EXPECT_LE((f->gradient(x) - ref).norm(), 1e-5 * ref.norm());
  }
}

TEST(Problems, DerivativesMatchFiniteDifferencesOnCatalog) {
  for (const auto& e : builtin_problems(7)) {
    const auto f = e.make();
    Vector x = Vector::LinSpaced(f->dim(), -0.6, 0.9);
    const Vector g = oracle::gradient([&](const Vector& v) { return f->value(v); }, x);
    EXPECT_LT((f->gradient(x) - g).norm(), 1e-6 * (1 + g.norm())) << e.id;
    const Matrix H = oracle::jacobian([&](const Vector& v) { return f->gradient(v); }, x);
    EXPECT_LT((f->hessian(x) - H).norm(), 1e-5 * (1 + H.norm())) << e.id;
    const Vector u = Vector::LinSpaced(f->dim(), 1.0, -0.5);
    const Vector T = oracle::gradient([&](const Vector& v) { return u.dot(f->hessian(v) * u); }, x);
    EXPECT_LT((f->third_apply(x, u) - T).norm(), 1e-5 * (1 + T.norm())) << e.id;
  }
}

TEST(Problems, DeclaredMinimizersAreStationary) {
  for (const auto& e : builtin_problems(7)) {
    const auto f = e.make();
    if (!f->minimizer()) continue;
    EXPECT_LT(f->gradient(*f->minimizer()).norm(), 1e-9) << e.id;
    EXPECT_NEAR(f->value(*f->minimizer()), *f->min_value(), 1e-10) << e.id;
  }
}

TEST(Problems, LevelSetRadiusContainsSublevelSet) {
  auto f = make_ill_conditioned_quadratic();
  const double level = f->value(vec({1, 1}));
  const double R = *f->level_set_radius(level);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int i = 0; i < 2000; ++i) {
    const Vector x = vec({u(rng), u(rng)});
    if (f->value(x) <= level) EXPECT_LE(x.norm(), R + 1e-12);
  }
}

TEST(Problems, RejectWrongDimension) {
  auto f = make_ill_conditioned_quadratic();
  EXPECT_THROW(f->value(vec({1, 2, 3})), InputError);
}

TEST(CheckResult, CountsViolationsAndWorstMargin) {
  auto c = make_check("demo");
  c.observe(1.0, 2.0, 0);
  c.observe(3.0, 2.0, 1);
  c.observe(2.0, 2.0, 2, 1e-9);
  EXPECT_FALSE(c.passed);
  EXPECT_EQ(c.checked, 3u);
  EXPECT_EQ(c.violations, 1u);
  ASSERT_TRUE(c.first_violation.has_value());
  EXPECT_EQ(*c.first_violation, 1u);
  EXPECT_DOUBLE_EQ(c.worst_margin, 1.0);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-13, 1e-18);
}
