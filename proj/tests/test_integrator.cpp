#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "bautin/cycles.hpp"
#include "bautin/errors.hpp"
#include "bautin/integrator.hpp"
#include "bautin/spectrum.hpp"
#include "support/linear_dde.hpp"
#include "support/reference_points.hpp"

namespace bautin {
namespace {

DelayedRhs negative_feedback() {
  return [](double, double xd) { return -xd; };
}

double max_error(const Trajectory& traj, const testing::LinearDelayOracle& exact) {
  double err = 0.0;
  const auto t = traj.times();
  const auto x = traj.states();
  for (std::size_t i = 0; i < t.size(); ++i) {
    err = std::max(err, std::abs(x[i] - exact(t[i])));
  }
  return err;
}

TEST(LinearOracle, KnownPieces) {
  const testing::LinearDelayOracle exact(2);
  EXPECT_DOUBLE_EQ(exact(0.5), 0.5);
  EXPECT_DOUBLE_EQ(exact(1.5), 1.0 - 1.5 + 0.5 * 0.25);
  EXPECT_DOUBLE_EQ(exact(-0.3), 1.0);
}

TEST(Integrate, LinearDelayEquationMatchesClosedForm) {
  const testing::LinearDelayOracle exact(6);
  IntegrationOptions opt;
  opt.t_end = 6.0;
  const auto traj = integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 1.0), opt);
  EXPECT_LT(max_error(traj, exact), 1e-6);
  for (double t : {0.25, 0.5, 1.5, 2.7, 5.9}) {
    EXPECT_NEAR(traj.eval(t), exact(t), 1e-6) << "t=" << t;
  }
}

TEST(Integrate, BreakpointsAreMeshNodes) {
  IntegrationOptions opt;
  opt.t_end = 6.0;
  opt.rel_tol = 1e-4;
  const auto traj = integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 1.0), opt);
  const auto t = traj.times();
  for (double b : {1.0, 2.0, 3.0, 4.0}) {
    EXPECT_TRUE(std::binary_search(t.begin(), t.end(), b)) << b;
  }
  EXPECT_EQ(traj.t_end(), 6.0);
}

TEST(Integrate, FixedStepOrderOfConvergence) {
  const testing::LinearDelayOracle exact(6);
  double prev = 0.0;
  for (double h : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
    IntegrationOptions opt;
    opt.t_end = 6.0;
    opt.fixed_step = h;
    const auto traj =
        integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 1.0), opt);
    const double err = max_error(traj, exact);
    if (prev > 0.0) {
      EXPECT_GE(std::log2(prev / err), 2.7) << "h=" << h << " err=" << err;
    }
    prev = err;
  }
}

TEST(Integrate, EquilibriumHistoryStaysPut) {
  const ModelParams p = testing::p1();
  const double x2 = nontrivial_equilibrium(p);
  IntegrationOptions opt;
  opt.t_end = 1000.0 * p.r;
  const auto traj = integrate(p, HistoryFunction::constant(x2, p.r), opt);
  double sup = 0.0;
  for (double x : traj.states()) {
    sup = std::max(sup, std::abs(x - x2));
  }
  EXPECT_LT(sup, 10.0 * opt.abs_tol);
  EXPECT_EQ(traj.eval_derivative(0.5 * opt.t_end), rhs(traj.eval(0.5 * opt.t_end),
                                                        traj.eval(0.5 * opt.t_end - p.r), p));
  EXPECT_LT(std::abs(traj.eval_derivative(0.5 * opt.t_end)), 1e-12);
}

TEST(Eval, MeshNodesAreExactAndHistoryDelegates) {
  IntegrationOptions opt;
  opt.t_end = 3.0;
  opt.rel_tol = 1e-5;
  const auto history = HistoryFunction::table({-1.0, -0.5, 0.0}, {0.0, 2.0, 1.0});
  const auto traj = integrate(negative_feedback(), 1.0, history, opt);
  const auto t = traj.times();
  const auto x = traj.states();
  for (std::size_t i = 0; i < t.size(); ++i) {
    ASSERT_EQ(traj.eval(t[i]), x[i]);
  }
  EXPECT_EQ(traj.eval(-0.75), 1.0);
  EXPECT_EQ(traj.eval(-0.5), 2.0);
  EXPECT_THROW(traj.eval(-1.5), DomainError);
  EXPECT_THROW(traj.eval(3.5), DomainError);
  EXPECT_THROW(traj.eval_derivative(-0.5), DomainError);
}

TEST(Eval, StepMidpointsMatchClosedForm) {
  const testing::LinearDelayOracle exact(6);
  IntegrationOptions opt;
  opt.t_end = 6.0;
  const auto traj = integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 1.0), opt);
  const auto t = traj.times();
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double m = 0.5 * (t[i - 1] + t[i]);
    ASSERT_NEAR(traj.eval(m), exact(m), 1e-6) << "t=" << m;
  }
}

TEST(EvalDerivative, LinearProblemAndFiniteDifferences) {
  IntegrationOptions opt;
  opt.t_end = 6.0;
  const auto traj = integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 1.0), opt);
  EXPECT_EQ(traj.eval_derivative(0.5), -1.0);
  const double h = 1e-4;
  for (double t = 0.3; t < 5.9; t += 0.37) {
    const double fd = (traj.eval(t + h) - traj.eval(t - h)) / (2.0 * h);
    EXPECT_LT(std::abs(traj.eval_derivative(t) - fd), 1e-4) << "t=" << t;
  }
}

TEST(EvalDerivative, ModelTrajectoryFiniteDifferences) {
  const ModelParams p = testing::p2();
  IntegrationOptions opt;
  opt.t_end = 2000.0;
  const auto traj = integrate(p, make_history(p, leading_root(p), 0.2), opt);
  const double h = 1e-3;
  for (double t = 10.0; t < 1990.0; t += 97.3) {
    const double fd = (traj.eval(t + h) - traj.eval(t - h)) / (2.0 * h);
    EXPECT_LT(std::abs(traj.eval_derivative(t) - fd), 1e-4) << "t=" << t;
  }
}

TEST(Integrate, FocusAtP1HasShrinkingMaxima) {
  const ModelParams p = testing::p1();
  IntegrationOptions opt;
  opt.t_end = 20000.0;
  const auto traj = integrate(p, make_history(p, leading_root(p), 0.5), opt);
  const double x2 = nontrivial_equilibrium(p);
  const auto maxima = peaks(traj, 1000.0, {.reference = x2, .floor = 1e-4 * x2});
  ASSERT_GT(maxima.size(), 20u);
  for (std::size_t i = 1; i < maxima.size(); ++i) {
    EXPECT_LT(maxima[i].amplitude, maxima[i - 1].amplitude) << "peak " << i;
  }
}

TEST(Integrate, Deterministic) {
  const ModelParams p = testing::p3();
  IntegrationOptions opt;
  opt.t_end = 5000.0;
  const auto a = integrate(p, make_history(p, leading_root(p), 0.45), opt);
  const auto b = integrate(p, make_history(p, leading_root(p), 0.45), opt);
  ASSERT_EQ(a.times().size(), b.times().size());
  EXPECT_TRUE(std::equal(a.times().begin(), a.times().end(), b.times().begin()));
  EXPECT_TRUE(std::equal(a.states().begin(), a.states().end(), b.states().begin()));
}

TEST(Integrate, IncrementalAdvanceMatchesOneShot) {
  const ModelParams p = testing::p2();
  IntegrationOptions opt;
  opt.t_end = 3000.0;
  DdeSolver solver(p, make_history(p, leading_root(p), 0.2), opt);
  solver.advance_to(1000.0);
  const std::size_t n_first = solver.trajectory().times().size();
  const double x_1000 = solver.trajectory().eval(1000.0);
  solver.advance_to(3000.0);
  EXPECT_EQ(solver.trajectory().eval(1000.0), x_1000);
  EXPECT_GT(solver.trajectory().times().size(), n_first);
}

TEST(Integrate, MaxStepMustNotExceedDelay) {
  IntegrationOptions opt;
  opt.max_step = 1.5;
  EXPECT_THROW(integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 1.0), opt),
               DomainError);
  opt.max_step = 0.0;
  opt.fixed_step = 2.0;
  EXPECT_THROW(integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 1.0), opt),
               DomainError);
}

TEST(Integrate, ShortHistoryRejected) {
  EXPECT_THROW(integrate(negative_feedback(), 1.0, HistoryFunction::constant(1.0, 0.5)),
               DomainError);
}

TEST(Integrate, BlowUpReportsLastValidTime) {
  IntegrationOptions opt;
  opt.t_end = 10.0;
  opt.divergence_bound = 1e6;
  try {
    integrate([](double x, double) { return x * x; }, 1.0, HistoryFunction::constant(1.0, 1.0),
              opt);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    // x(t) = 1 / (1 - t) leaves the bound just before t = 1.
    EXPECT_GT(e.last_valid_time(), 0.99);
    EXPECT_LT(e.last_valid_time(), 1.0);
  }
}

TEST(Integrate, NonFiniteRhsFails) {
  IntegrationOptions opt;
  opt.t_end = 2.0;
  EXPECT_THROW(integrate([](double, double xd) { return xd > 0.0 ? NAN : 0.0; }, 1.0,
                         HistoryFunction::constant(1.0, 1.0), opt),
               IntegrationError);
}

TEST(HistoryFunction, RejectsEvaluationOutsideSpan) {
  const auto h = HistoryFunction::constant(2.0, 3.0);
  EXPECT_EQ(h(-3.0), 2.0);
  EXPECT_EQ(h(0.0), 2.0);
  EXPECT_THROW(h(0.1), DomainError);
  EXPECT_THROW(h(-3.1), DomainError);
  EXPECT_EQ(h.source(), HistoryFunction::Source::Constant);
  EXPECT_THROW(HistoryFunction::table({-1.0, -0.5}, {1.0, 2.0}), DomainError);
}

}  // namespace
}  // namespace bautin
