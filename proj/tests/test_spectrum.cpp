#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "bautin/errors.hpp"
#include "bautin/spectrum.hpp"
#include "support/reference_points.hpp"

namespace bautin {
namespace {

using testing::at;
using cplx = std::complex<double>;

TEST(CharResidual, ZeroRootWhenDeltaEqualsKMinusOneTimesB1) {
  // delta = (k - 1) B1 makes lambda = 0 a root.
  const CharacteristicCoefficients c{0.5 * 0.8, 0.8, 1.5, 3.0};
  EXPECT_EQ(char_residual(cplx(0.0, 0.0), c), cplx(0.0, 0.0));
}

TEST(CharResidual, SyntheticCoefficients) {
  const CharacteristicCoefficients c{1.0, 1.0, 1.0, 0.0};
  EXPECT_EQ(char_residual(cplx(1.0, 0.0), c), cplx(2.0, 0.0));
}

TEST(CharResidual, PurelyImaginaryRootOnHopfCurve) {
  const ModelParams rest = at(testing::kBautinDelta, 1.0);
  const HopfPoint h = hopf_r(testing::kBautinDelta, rest);
  ModelParams p = rest;
  p.r = h.r_star;
  EXPECT_LT(std::abs(char_residual(cplx(0.0, h.omega_star), p)), 1e-10);
}

TEST(CharResidual, ConjugateSymmetry) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const ModelParams p = testing::p3();
  for (int i = 0; i < 200; ++i) {
    const cplx z(0.05 * u(rng), 0.5 * u(rng));
    const cplx a = char_residual(std::conj(z), p);
    const cplx b = std::conj(char_residual(z, p));
    EXPECT_NEAR(a.real(), b.real(), 1e-15);
    EXPECT_NEAR(a.imag(), b.imag(), 1e-15);
  }
}

TEST(CharResidual, InfeasibleThrows) {
  ModelParams p = at(0.002, 5.0);
  p.k = 1.0;
  EXPECT_THROW(char_residual(cplx(0.0, 0.1), p), InfeasibleError);
}

TEST(HopfR, BautinFixture) {
  const HopfPoint h = hopf_r(testing::kBautinDelta, at(testing::kBautinDelta, 1.0));
  EXPECT_NEAR(h.r_star / 5.301432998 - 1.0, 0.0, 1e-6);
  // 40-digit evaluation of the same closed form.
  EXPECT_NEAR(h.r_star, 5.3014329957826203, 1e-11);
  EXPECT_NEAR(h.omega_star, 0.039679052934476667, 1e-14);
  EXPECT_EQ(h.delta, testing::kBautinDelta);
}

TEST(HopfR, BothDefiningConditionsHold) {
  for (double delta : {0.0012, 0.0015, 0.002, 0.0023073665, 0.0024, 0.0026}) {
    const ModelParams rest = at(delta, 1.0);
    const HopfPoint h = hopf_r(delta, rest);
    const double b1 = linearization_coefficient(rest).b1;
    const double kb1 = rest.k * b1;
    EXPECT_NEAR(kb1 * std::cos(h.omega_star * h.r_star), delta + b1, 1e-10);
    EXPECT_NEAR(kb1 * std::sin(h.omega_star * h.r_star), -h.omega_star, 1e-10);
    EXPECT_NEAR(h.omega_star, std::sqrt(kb1 * kb1 - (delta + b1) * (delta + b1)), 1e-15);
  }
}

TEST(HopfR, MinimalPositiveDelay) {
  for (double delta : {0.0012, 0.0018, 0.0024}) {
    const HopfPoint h = hopf_r(delta, at(delta, 1.0));
    EXPECT_GT(h.r_star, 0.0);
    EXPECT_LT(h.r_star - 2.0 * std::numbers::pi / h.omega_star, 0.0);
  }
}

TEST(HopfR, BranchForPositiveKB1) {
  // k B1 > 0 forces the 2 pi - theta branch for the sine condition.
  const HopfPoint h = hopf_r_from_coefficients(-0.9, 0.5, 1.5);
  const double kb1 = 0.75;
  EXPECT_NEAR(kb1 * std::cos(h.omega_star * h.r_star), -0.4, 1e-12);
  EXPECT_NEAR(kb1 * std::sin(h.omega_star * h.r_star), -h.omega_star, 1e-12);
}

TEST(HopfR, DegenerateDiscriminantThrows) {
  // (k B1)^2 == (delta + B1)^2 exactly: B1 = -0.5, k = 1.5, delta = 1.25.
  EXPECT_THROW(hopf_r_from_coefficients(1.25, -0.5, 1.5), NoHopfError);
  EXPECT_THROW(hopf_r_from_coefficients(2.0, -0.5, 1.5), NoHopfError);
}

TEST(HopfR, ReferencePointsLieOnTheirSides) {
  // Below the curve (r < r*) the focus is stable, above it unstable.
  EXPECT_NEAR(hopf_r(0.002, at(0.002, 1.0)).r_star, 5.9364250247237987, 1e-10);
  EXPECT_NEAR(hopf_r(0.0024, at(0.0024, 1.0)).r_star, 5.1437510645990716, 1e-10);
  EXPECT_NEAR(hopf_r(0.0015, at(0.0015, 1.0)).r_star, 7.5540872031018754, 1e-10);
  EXPECT_LT(5.93, hopf_r(0.002, at(0.002, 1.0)).r_star);    // P1
  EXPECT_LT(5.14, hopf_r(0.0024, at(0.0024, 1.0)).r_star);  // P1'
  EXPECT_GT(5.2, hopf_r(0.0024, at(0.0024, 1.0)).r_star);   // P2
  EXPECT_GT(7.56, hopf_r(0.0015, at(0.0015, 1.0)).r_star);  // P2'
  EXPECT_LT(7.55, hopf_r(0.0015, at(0.0015, 1.0)).r_star);  // P3
}

TEST(LeadingRoot, ZeroRealPartOnHopfCurve) {
  const HopfPoint h = hopf_r(testing::kBautinDelta, at(testing::kBautinDelta, 1.0));
  const Eigenvalue e =
      leading_root(at(testing::kBautinDelta, h.r_star), cplx(0.0, h.omega_star));
  EXPECT_LT(std::abs(e.mu), 1e-8);
  EXPECT_NEAR(e.omega, h.omega_star, 1e-10);
}

TEST(LeadingRoot, ReferencePoints) {
  // Roots polished with 40-digit arithmetic from the same starting guess.
  struct Case {
    ModelParams p;
    double mu;
    double omega;
  };
  const Case cases[] = {
      {testing::p1(), -0.00018169582890929, 0.0351718069784591},
      {testing::p1_prime(), -0.000141209585849852, 0.0410186945490656},
      {testing::p2(), 0.00208494023813396, 0.0406490497927957},
      {testing::p2_prime(), 0.00010301959696929, 0.0272614255626639},
      {testing::p3(), -7.13379544925171e-5, 0.0272856165127633},
  };
  for (const auto& c : cases) {
    const Eigenvalue e = leading_root(c.p);
    EXPECT_NEAR(e.mu, c.mu, 1e-12);
    EXPECT_NEAR(e.omega, c.omega, 1e-12);
    EXPECT_LT(std::abs(char_residual(e.value(), c.p)), 1e-12);
  }
  EXPECT_LT(leading_root(testing::p1()).mu, 0.0);
  EXPECT_GT(leading_root(testing::p2()).mu, 0.0);
}

TEST(LeadingRoot, ReturnsUpperHalfPlaneMember) {
  const Eigenvalue e = leading_root(testing::p3(), cplx(0.0, -0.027));
  EXPECT_GT(e.omega, 0.0);
  EXPECT_NEAR(e.omega, 0.0272856165127633, 1e-12);
}

TEST(LeadingRoot, NonConvergenceCarriesLastIterate) {
  try {
    leading_root(testing::p3(), cplx(0.0, 0.03), NewtonOptions{.max_iterations = 1});
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.residual(), 1e-12);
    EXPECT_TRUE(std::isfinite(e.last_re()));
    EXPECT_TRUE(std::isfinite(e.last_im()));
  }
}

TEST(LeadingRoot, RealPartChangesSignAcrossTheCurve) {
  for (double delta : {0.0021, 0.0023073665, 0.0025}) {
    const HopfPoint h = hopf_r(delta, at(delta, 1.0));
    // Track the root continuously from the curve outwards in both directions.
    auto track = [&](double r_to) {
      cplx z(0.0, h.omega_star);
      const int steps = 10;
      for (int i = 1; i <= steps; ++i) {
        const double r = h.r_star + (r_to - h.r_star) * i / steps;
        z = leading_root(at(delta, r), z).value();
      }
      return z.real();
    };
    EXPECT_GT(track(h.r_star + 0.01), 0.0);
    EXPECT_LT(track(h.r_star - 0.01), 0.0);
  }
}

TEST(HopfCurve, SingleSampleMatchesHopfR) {
  const auto curve = hopf_curve(testing::kBautinDelta, testing::kBautinDelta, 1,
                                at(testing::kBautinDelta, 1.0));
  ASSERT_EQ(curve.size(), 1u);
  ASSERT_TRUE(curve[0].point);
  const HopfPoint h = hopf_r(testing::kBautinDelta, at(testing::kBautinDelta, 1.0));
  EXPECT_EQ(curve[0].point->r_star, h.r_star);
  EXPECT_EQ(curve[0].point->omega_star, h.omega_star);
}

TEST(HopfCurve, UniformSamplesAndFlaggedFailures) {
  // Hopf points exist for delta near 0.01; by 0.015 B1 > 0 and (k B1)^2 <
  // (delta + B1)^2, and beyond beta0 (k - 1) = 0.025 x2 does not exist.
  const auto curve = hopf_curve(0.01, 0.03, 11, at(0.002, 1.0));
  ASSERT_EQ(curve.size(), 11u);
  EXPECT_DOUBLE_EQ(curve[5].delta, 0.02);
  EXPECT_NE(curve[5].failure.find("no purely imaginary"), std::string::npos);
  EXPECT_TRUE(curve.front().point.has_value());
  EXPECT_FALSE(curve.back().point.has_value());
  EXPECT_FALSE(curve.back().failure.empty());
}

TEST(HopfCurve, EmptyWhenNoSampleAdmitsHopf) {
  EXPECT_TRUE(hopf_curve(0.03, 0.04, 5, at(0.002, 1.0)).empty());
}

TEST(HopfCurve, PassesThroughBautinPointAndCsvHeader) {
  const auto curve = hopf_curve(0.0012, 0.0026, 141, at(0.002, 1.0));
  ASSERT_EQ(curve.size(), 141u);
  // Linear interpolation between the samples bracketing delta*_0.
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i - 1].delta <= testing::kBautinDelta && curve[i].delta >= testing::kBautinDelta) {
      const double w =
          (testing::kBautinDelta - curve[i - 1].delta) / (curve[i].delta - curve[i - 1].delta);
      const double r = (1 - w) * curve[i - 1].point->r_star + w * curve[i].point->r_star;
      EXPECT_NEAR(r, 5.3014, 1e-3);
    }
  }
  std::ostringstream csv;
  write_hopf_csv(csv, curve);
  EXPECT_EQ(csv.str().substr(0, 24), "delta,r_star,omega_star\n");
}

}  // namespace
}  // namespace bautin
