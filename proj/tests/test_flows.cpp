#include <gtest/gtest.h>

#include <sstream>

#include "bregman/flows.hpp"
#include "oracles.hpp"

using namespace bregman;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Vector state(const Vector& a, const Vector& b) {
  Vector y(a.size() + b.size());
  y << a, b;
  return y;
}

double sup_x_distance(const Trajectory& a, const Trajectory& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, (a.position(i) - interpolate_state(b, a.times[i]).head(a.dim)).norm());
  return s;
}

const auto kQuad = [] { return make_ill_conditioned_quadratic(); };

}  // namespace

TEST(ElSystem, PolynomialFieldMatchesClosedForm) {
  auto f = kQuad();
  auto h = make_pth_power_mirror(3, vec({-1, 2}));
  const double p = 3, t = 1.7;
  auto sys = build_el_system(h, f, polynomial_triple(p, 1));
  const Vector X = vec({0.4, -0.8}), W = vec({1.1, 0.2});
  const Vector out = sys.vector_field(t, state(X, W));
  EXPECT_LT((out.head(2) - (p / t) * (h->dual_gradient(W) - X)).norm(), 1e-13);
  EXPECT_LT((out.tail(2) + p * std::pow(t, p - 1) * f->gradient(X)).norm(), 1e-12);
}

TEST(ElSystem, ZeroObjectiveKeepsWConstant) {
  auto sys = build_el_system(make_euclidean_mirror(), std::make_shared<ZeroObjective>(2), polynomial_triple(2));
  const Vector out = sys.vector_field(3.0, state(vec({1, 2}), vec({-4, 5})));
  EXPECT_EQ(out.tail(2).norm(), 0.0);
}

TEST(ElSystem, ExponentialFieldMatchesClosedForm) {
  auto f = kQuad();
  auto h = make_euclidean_mirror();
  const double c = 0.8, t = 2.5;
  auto sys = build_el_system(h, f, exponential_triple(c));
  const Vector X = vec({0.4, -0.8}), W = vec({1.1, 0.2});
  const Vector out = sys.vector_field(t, state(X, W));
  EXPECT_LT((out.head(2) - c * (W - X)).norm(), 1e-14);
  EXPECT_LT((out.tail(2) + c * std::exp(c * t) * f->gradient(X)).norm(), 1e-11);
}

TEST(ElSystem, RejectsNonIdealTriple) {
  auto s = polynomial_triple(2);
  s.gamma_dot = [](double t) { return 1.0 / t; };
  EXPECT_THROW(build_el_system(make_euclidean_mirror(), kQuad(), s), PreconditionError);
}

TEST(HamiltonianSystem, EuclideanReduction) {
  auto f = kQuad();
  const auto s = polynomial_triple(2, 1);
  auto sys = build_hamiltonian_system(make_euclidean_mirror(), f, s);
  const double t = 1.3;
  const Vector X = vec({0.5, 0.1}), P = vec({-0.3, 0.9});
  const Vector out = sys.vector_field(t, state(X, P));
  EXPECT_LT((out.head(2) - std::exp(s.alpha(t) - s.gamma(t)) * P).norm(), 1e-13);
  EXPECT_LT((out.tail(2) + std::exp(s.alpha(t) + s.beta(t) + s.gamma(t)) * f->gradient(X)).norm(), 1e-12);
}

TEST(HamiltonianSystem, StationaryAtCriticalPointWithZeroMomentum) {
  auto f = kQuad();
  auto sys = build_hamiltonian_system(make_pth_power_mirror(3, vec({1, 1})), f, polynomial_triple(2));
  const Vector out = sys.vector_field(2.0, state(*f->minimizer(), Vector::Zero(2)));
  EXPECT_LT(out.head(2).norm(), 1e-15);
}

TEST(HamiltonianSystem, TracksEulerLagrangeTrajectory) {
  auto f = kQuad();
  auto h = make_pth_power_mirror(3, vec({-3, 4}));
  const auto ctl = IntegrateControls::fixed(10000);
  auto a = integrate(build_el_system(h, f, polynomial_triple(2)), vec({1, 1}), 0.1, 10, ctl);
  auto b = integrate(build_hamiltonian_system(h, f, polynomial_triple(2)), vec({1, 1}), 0.1, 10, ctl);
  EXPECT_LT(sup_x_distance(a, b), 1e-6);
}

TEST(RescaledFlow, PTwoIsGradientFlow) {
  auto f = kQuad();
  auto sys = build_rescaled_gradient_flow(f, 2);
  const Vector x = vec({0.3, -1.2});
  EXPECT_LT((sys.vector_field(0.0, x) + f->gradient(x)).norm(), 1e-15);
}

TEST(RescaledFlow, PowerNormFieldIsMinusX) {
  for (int p : {3, 4}) {
    auto sys = build_rescaled_gradient_flow(make_power_norm(2, p), p);
    const Vector x = vec({0.3, -1.2});
    EXPECT_LT((sys.vector_field(0.0, x) + x).norm(), 1e-14);
  }
}

TEST(RescaledFlow, ExplicitExponentialSolution) {
  auto tr = integrate(build_rescaled_gradient_flow(make_power_norm(2, 3), 3), vec({1, 1}), 0, 10,
                      IntegrateControls::adaptive());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    EXPECT_LT((tr.position(i) - std::exp(-tr.times[i]) * vec({1, 1})).norm(), 1e-5);
  }
}

TEST(RescaledFlow, ZeroGradientGivesZeroField) {
  auto f = kQuad();
  EXPECT_EQ(build_rescaled_gradient_flow(f, 3).vector_field(0.0, *f->minimizer()).norm(), 0.0);
}

TEST(NaturalGradientFlow, EuclideanIsGradientFlow) {
  auto f = kQuad();
  auto sys = build_natural_gradient_flow(make_euclidean_mirror(), f);
  const Vector x = vec({0.3, -1.2});
  EXPECT_LT((sys.vector_field(0.0, x) + f->gradient(x)).norm(), 1e-15);
}

TEST(NaturalGradientFlow, QuarticMirrorOneDimensionByHand) {
  auto sys = build_natural_gradient_flow(make_pth_power_mirror(4, vec({0})), make_diagonal_quadratic({1}));
  for (double x : {0.5, -1.5, 2.0}) EXPECT_NEAR(sys.vector_field(0.0, vec({x}))[0], -1.0 / (3 * x), 1e-13);
}

TEST(NaturalGradientFlow, SingularHessianIsReported) {
  auto sys = build_natural_gradient_flow(make_pth_power_mirror(3, vec({0, 0})), kQuad());
  EXPECT_THROW(sys.vector_field(0.0, vec({0, 0})), NumericalError);
}

TEST(MasslessSystem, EuclideanIsDampedSecondOrderEquation) {
  // m X'' + X' + grad f(X) = 0 integrated independently in (X, X').
  auto f = kQuad();
  const double m = 0.1;
  auto tr = integrate(build_massless_system(make_euclidean_mirror(), f, m), vec({1, 1}), 0, 2,
                      IntegrateControls::fixed(4000));
  const Vector ref = oracle::rk4(
      [&](double, const Vector& y) { return state(y.tail(2), (-y.tail(2) - f->gradient(y.head(2))) / m); },
      state(vec({1, 1}), Vector::Zero(2)), 0, 2, 4000);
  EXPECT_LT((tr.position(tr.size() - 1) - ref.head(2)).norm(), 1e-8);
}

TEST(MasslessSystem, ZeroForceRelaxesAtRateOneOverM) {
  const double m = 0.05;
  auto h = make_euclidean_mirror();
  auto sys = build_massless_system(h, std::make_shared<ZeroObjective>(2), m);
  const Vector x0 = vec({1, 1}), w = vec({-1, 3});
  auto tr = integrate_state(sys, state(x0, w), 0, 0.5, IntegrateControls::fixed(2000));
  for (std::size_t i = 0; i < tr.size(); i += 100) {
    EXPECT_LT((tr.position(i) - (w + std::exp(-tr.times[i] / m) * (x0 - w))).norm(), 1e-9);
    EXPECT_EQ(tr.states[i].tail(2), w);
  }
}

TEST(MasslessSystem, ApproachesNaturalGradientFlow) {
  auto f = kQuad();
  auto h = make_pth_power_mirror(3, vec({-3, 4}));
  auto ref = integrate(build_natural_gradient_flow(h, f), vec({1, 1}), 0, 2, IntegrateControls::adaptive(1e-10, 1e-12));
  std::vector<double> d;
  for (double m : {0.1, 0.01, 0.001}) {
    auto tr = integrate(build_massless_system(h, f, m), vec({1, 1}), 0, 2, IntegrateControls::adaptive());
    d.push_back(sup_x_distance(tr, ref));
  }
  EXPECT_LT(d[1], d[0]);
  EXPECT_LT(d[2], d[1]);
  EXPECT_LE(d[2], 0.05);
}

TEST(EuclideanR, UnitForceIsSecondOrderEquation) {
  auto f = kQuad();
  auto sys = build_euclidean_r_system(f, 3);
  const Vector X = vec({0.2, 0.7}), V = vec({-1, 0.5});
  const Vector out = sys.vector_field(2.0, state(X, V));
  EXPECT_EQ(out.head(2), V);
  EXPECT_LT((out.tail(2) - (-(3 / 2.0) * V - f->gradient(X))).norm(), 1e-14);
}

TEST(EuclideanR, MatchedForceCoincidesWithPolynomialFlow) {
  auto f = kQuad();
  const auto ctl = IntegrateControls::adaptive(1e-10, 1e-12);
  auto a = integrate(build_euclidean_r_system(f, 3, MatchedForce{0.25}), vec({1, 1}), 0.1, 10, ctl);
  auto b = integrate(build_el_system(make_euclidean_mirror(), f, polynomial_triple(2, 0.25)), vec({1, 1}), 0.1, 10, ctl);
  EXPECT_LT(sup_x_distance(a, b), 1e-6);
}

TEST(EuclideanR, RFiveKeepsInverseSquareRate) {
  auto tr = integrate(build_euclidean_r_system(kQuad(), 5), vec({1, 1}), 0.1, 50, IntegrateControls::adaptive());
  EXPECT_LE(fit_rate(tr.times, tr.f_gap, 1, 50, 1e-10), -2 + 0.2);
}

TEST(Integrate, NaturalMotionAtRestStaysPut) {
  auto sys = build_el_system(make_euclidean_mirror(), std::make_shared<ZeroObjective>(2), polynomial_triple(2));
  auto tr = integrate(sys, vec({1, -2}), 0.1, 10, IntegrateControls::fixed(1000));
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_LT((tr.position(i) - vec({1, -2})).norm(), 1e-14);
}

TEST(Integrate, NaturalMotionMatchesClosedForm) {
  auto h = make_pth_power_mirror(3, vec({-3, 4}));
  const Vector x0 = vec({1, 1}), z0 = vec({-0.5, 2});
  for (double p : {2.0, 3.0}) {
    const auto s = polynomial_triple(p);
    auto sys = build_el_system(h, std::make_shared<ZeroObjective>(2), s);
    auto tr = integrate_state(sys, state(x0, h->gradient(z0)), 0.1, 10, IntegrateControls::fixed(10000));
    for (std::size_t i = 0; i < tr.size(); ++i) {
      // X_t = z0 + (x0 - z0) (t0 / t)^p
      const Vector ref = z0 + std::pow(0.1 / tr.times[i], p) * (x0 - z0);
      ASSERT_LT((tr.position(i) - ref).norm(), 1e-6) << "p=" << p << " t=" << tr.times[i];
    }
  }
}

TEST(Integrate, FixedStepIsFourthOrder) {
  // Scalar test problem y' = -t y^2 with y(0) = 1, exact y = 2 / (2 + t^2).
  FlowSystem sys;
  sys.dim = 1;
  sys.layout = {"X"};
  sys.vector_field = [](double t, const Vector& y) { return Vector::Constant(1, -t * y[0] * y[0]); };
  sys.initial_state_from = [](const Vector& x, double) { return x; };
  auto err = [&](std::size_t n) {
    auto tr = integrate(sys, vec({1}), 0, 3, IntegrateControls::fixed(n));
    return std::abs(tr.states.back()[0] - 2.0 / 11.0);
  };
  const double e1 = err(50), e2 = err(100), e3 = err(200);
  EXPECT_GE(e1 / e2, 8.0);
  EXPECT_GE(e2 / e3, 8.0);
}

TEST(Integrate, FixedStepMatchesIndependentRk4) {
  auto f = kQuad();
  auto sys = build_el_system(make_euclidean_mirror(), f, polynomial_triple(2));
  auto tr = integrate(sys, vec({1, 1}), 0.1, 5, IntegrateControls::fixed(500));
  const Vector ref = oracle::rk4(sys.vector_field, sys.initial_state_from(vec({1, 1}), 0.1), 0.1, 5, 500);
  EXPECT_LT((tr.states.back() - ref).norm(), 1e-12);
}

TEST(Integrate, AdaptiveMeetsTolerance) {
  FlowSystem sys;
  sys.dim = 2;
  sys.layout = {"X"};
  sys.vector_field = [](double, const Vector& y) { return vec({y[1], -y[0]}); };
  sys.initial_state_from = [](const Vector& x, double) { return x; };
  auto tr = integrate(sys, vec({1, 0}), 0, 20, IntegrateControls::adaptive(1e-9, 1e-11));
  double worst = 0;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    worst = std::max(worst, (tr.states[i] - vec({std::cos(tr.times[i]), -std::sin(tr.times[i])})).norm());
  }
  EXPECT_LT(worst, 1e-7);
  EXPECT_GT(tr.stats.accepted, 10u);
}

TEST(Integrate, DivergenceCarriesPartialTrajectory) {
  FlowSystem sys;
  sys.dim = 1;
  sys.layout = {"X"};
  sys.vector_field = [](double, const Vector& y) { return Vector::Constant(1, y[0] * y[0]); };
  sys.initial_state_from = [](const Vector& x, double) { return x; };
  try {
    integrate(sys, vec({1}), 0, 2, IntegrateControls::fixed(10000));
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GT(e.partial().size(), 1u);
    EXPECT_LT(e.partial().times.back(), 1.0 + 1e-3);
  }
}

TEST(Integrate, RejectsBadInterval) {
  auto sys = build_rescaled_gradient_flow(kQuad(), 2);
  EXPECT_THROW(integrate(sys, vec({1, 1}), 1, 1), InputError);
  auto el = build_el_system(make_euclidean_mirror(), kQuad(), polynomial_triple(2));
  EXPECT_THROW(integrate(el, vec({1, 1}), 0.0, 1), InputError);
}

TEST(Energy, PolynomialFlowIsNonincreasing) {
  auto tr = integrate(build_el_system(make_euclidean_mirror(), kQuad(), polynomial_triple(2)), vec({1, 1}), 0.1, 100,
                      IntegrateControls::adaptive());
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) ASSERT_LE(tr.energy[i + 1], tr.energy[i] * (1 + 1e-6));
}

TEST(Energy, VanishesAtOptimum) {
  auto f = kQuad();
  auto h = make_pth_power_mirror(3, vec({1, 2}));
  const Vector xs = *f->minimizer();
  EXPECT_NEAR(energy_at(*h, *f, polynomial_triple(3), 2.0, xs, h->gradient(xs), xs), 0.0, 1e-15);
}

TEST(Energy, EuclideanFormula) {
  auto f = kQuad();
  const auto s = polynomial_triple(2);
  const double t = 1.5;
  const Vector X = vec({0.3, 0.4}), Xdot = vec({-0.2, 0.1});
  const Vector Z = X + std::exp(-s.alpha(t)) * Xdot;
  const double ref = 0.5 * Z.squaredNorm() + std::exp(s.beta(t)) * f->value(X);
  EXPECT_NEAR(energy_at(*make_euclidean_mirror(), *f, s, t, X, Z, Vector::Zero(2)), ref, 1e-14);
}

TEST(Energy, EndpointBelowStartForCubicFlow) {
  auto tr = integrate(build_el_system(make_scaled_pth_power_mirror(3, vec({1, 1})), kQuad(), polynomial_triple(3)),
                      vec({1, 1}), 0.1, 20, IntegrateControls::adaptive());
  EXPECT_LE(tr.energy.back(), tr.energy.front());
}

TEST(RescaledEnergy, SmallCases) {
  auto f = make_diagonal_quadratic({2});
  // f(0.5) = 0.25
  EXPECT_NEAR(rescaled_flow_energy(*f, 2, 1, vec({0.5}), vec({0})).primary, 4.0, 1e-14);
  // f(1/sqrt 2) = 0.5
  EXPECT_NEAR(rescaled_flow_energy(*f, 3, 2, vec({std::sqrt(0.5)}), vec({0})).alternative, 4.0, 1e-14);
}

TEST(RescaledEnergy, PrimaryGrowsLinearly) {
  const int p = 3;
  auto f = kQuad();
  const Vector x0 = vec({1, 1});
  auto tr = integrate(build_rescaled_gradient_flow(f, p), x0, 0, 10, IntegrateControls::adaptive());
  const double R = *f->level_set_radius(f->value(x0));
  const double e0 = rescaled_flow_energy(*f, p, 0, x0, *f->minimizer()).primary;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (tr.f_gap[i] <= 1e-10) break;
    const double e = rescaled_flow_energy(*f, p, tr.times[i], tr.position(i), *f->minimizer()).primary;
    ASSERT_GE(e, (e0 + tr.times[i] / ((p - 1) * std::pow(R, p / (p - 1.0)))) * (1 - 1e-6));
  }
}

TEST(Dilation, SquareDilatesQuadraticTripleToQuartic) {
  const auto d = dilate_triple(polynomial_triple(2, 1), TimeDilation::power(2));
  const auto q = polynomial_triple(4, 1);
  for (double t : {0.5, 1.0, 3.0, 7.5}) {
    EXPECT_NEAR(d.alpha(t), std::log(4.0) - std::log(t), 1e-13);
    EXPECT_NEAR(d.beta(t), q.beta(t), 1e-13);
    EXPECT_NEAR(d.gamma(t), q.gamma(t), 1e-13);
    EXPECT_NEAR(d.alpha_dot(t), q.alpha_dot(t), 1e-13);
  }
}

TEST(Dilation, IdentityLeavesTripleUnchanged) {
  const auto s = polynomial_triple(3, 2);
  const auto d = dilate_triple(s, TimeDilation::identity());
  for (double t : {0.4, 2.0}) {
    EXPECT_DOUBLE_EQ(d.alpha(t), s.alpha(t));
    EXPECT_DOUBLE_EQ(d.beta(t), s.beta(t));
    EXPECT_DOUBLE_EQ(d.gamma_dot(t), s.gamma_dot(t));
  }
}

TEST(Dilation, ExponentialSpeedupGivesLinearBeta) {
  const double c = 1.5, p = 2;
  const auto d = dilate_triple(polynomial_triple(p, 1), TimeDilation::exponential(c / p));
  for (double t : {0.2, 1.0, 4.0}) {
    EXPECT_NEAR(d.beta(t), c * t, 1e-12);
    EXPECT_NEAR(d.beta_dot(t), c, 1e-12);
    EXPECT_NEAR(d.gamma_dot(t), std::exp(d.alpha(t)), 1e-12);
  }
}

TEST(Dilation, IdentityTrajectoryUnchanged) {
  auto tr = integrate(build_rescaled_gradient_flow(kQuad(), 2), vec({1, 1}), 0, 2, IntegrateControls::fixed(100));
  auto d = dilate_trajectory(tr, TimeDilation::identity(), tr.times);
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_EQ(d.states[i], tr.states[i]);
}

TEST(Dilation, GapIsRelabeled) {
  auto f = kQuad();
  auto sys = build_el_system(make_euclidean_mirror(), f, polynomial_triple(2));
  auto tr = integrate(sys, vec({1, 1}), 0.25, 16, IntegrateControls::adaptive(1e-10, 1e-12));
  const auto tau = TimeDilation::power(2);
  const std::vector<double> grid = {0.5, 1.0, 2.0, 3.0, 4.0};
  auto d = dilate_trajectory(tr, tau, grid, &sys);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector x = interpolate_state(tr, tau.tau(grid[i])).head(2);
    EXPECT_NEAR(d.f_gap[i], f->value(x), 1e-14);
  }
}

TEST(Dilation, QuadraticFlowDilatesToQuarticFlow) {
  auto f = kQuad();
  auto h = make_euclidean_mirror();
  const auto ctl = IntegrateControls::adaptive(1e-10, 1e-12);
  const auto tau = TimeDilation::power(2);
  auto base = integrate(build_el_system(h, f, polynomial_triple(2)), vec({1, 1}), tau.tau(0.5), tau.tau(10), ctl);
  auto direct = integrate(build_el_system(h, f, polynomial_triple(4)), vec({1, 1}), 0.5, 10, ctl);
  auto dil = dilate_trajectory(base, tau, direct.times);
  double sup = 0;
  for (std::size_t i = 0; i < direct.size(); ++i) sup = std::max(sup, (dil.position(i) - direct.position(i)).norm());
  EXPECT_LE(sup, 1e-3);
}

TEST(FitRate, ExactPowerLaw) {
  std::vector<double> t, g;
  for (int i = 0; i < 100; ++i) {
    t.push_back(1 + i * 0.5);
    g.push_back(std::pow(t.back(), -2.0));
  }
  EXPECT_NEAR(fit_rate(t, g, 1, 100), -2.0, 1e-12);
}

TEST(FitRate, AgreesWithOlsOnNoisyData) {
  std::vector<double> t, g, lx, ly;
  for (int i = 0; i < 60; ++i) {
    t.push_back(1 + i);
    g.push_back(std::pow(t.back(), -3.0) * (1 + 0.1 * std::sin(i)));
    lx.push_back(std::log(t.back()));
    ly.push_back(std::log(g.back()));
  }
  EXPECT_NEAR(fit_rate(t, g, 1, 100), oracle::ols_slope(lx, ly), 1e-12);
}

TEST(FitRate, ExcludesFloorAndRequiresSamples) {
  std::vector<double> t = {1, 2, 3}, g = {1, 0.5, 0.3};
  EXPECT_THROW(fit_rate(t, g, 1, 3), InputError);
}

TEST(FitRate, CubicFlowRate) {
  auto tr = integrate(build_el_system(make_euclidean_mirror(), kQuad(), polynomial_triple(3)), vec({1, 1}), 0.1, 50,
                      IntegrateControls::adaptive());
  EXPECT_LE(fit_rate(tr.times, tr.f_gap, 1, 50, 1e-10), -3 + 0.3);
}

TEST(FitRate, RescaledFlowRate) {
  auto tr = integrate(build_rescaled_gradient_flow(kQuad(), 3), vec({1, 1}), 0, 30, IntegrateControls::adaptive());
  EXPECT_LE(fit_rate(tr.times, tr.f_gap, 1, 30, 1e-10), -2 + 0.3);
}

TEST(Csv, HeaderAndDeterminism) {
  auto run = [] {
    auto tr = integrate(build_el_system(make_euclidean_mirror(), kQuad(), polynomial_triple(2)), vec({1, 1}), 0.1, 5,
                        IntegrateControls::adaptive());
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    return os.str();
  };
  const std::string a = run();
  EXPECT_EQ(a.substr(0, a.find('\n')), "t,X_0,X_1,W_0,W_1,f_gap,energy");
  EXPECT_EQ(a, run());
}
