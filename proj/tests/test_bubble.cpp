#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sphcov/bubble.hpp"
#include "sphcov/quadrature.hpp"

using namespace sphcov;

TEST(Bubble, MatchesDirectFormula) {
  for (double a : {0.0, 0.25, 0.5, 0.9})
    for (double l : {0.1, 1.0, 7.5, 100.0})
      for (double r : {0.0, 1e-4, 0.3, 1.0, 12.0}) {
        if (r == 0.0 && a > 0.0) continue;
        const double ref = oracle::bubble(l, a, r);
        EXPECT_NEAR(eval_bubble(BubbleParams(l, a), r), ref, 1e-13 * std::max(1.0, std::abs(ref)));
      }
}

TEST(Bubble, CenterValue) {
  EXPECT_NEAR(eval_bubble(BubbleParams(2.0, 0.0), 0.0), std::log(4.0), 1e-15);
  EXPECT_NEAR(eval_bubble(BubbleParams(4.0, 0.0), 0.0), std::log(16.0), 1e-15);
}

TEST(Bubble, RejectsBadParameters) {
  EXPECT_THROW(BubbleParams(0.0, 0.0), Error);
  EXPECT_THROW(BubbleParams(-1.0, 0.0), Error);
  EXPECT_THROW(BubbleParams(1.0, 1.0), Error);
  EXPECT_THROW(BubbleParams(1.0, -0.1), Error);
}

TEST(Bubble, SatisfiesEquationOnCartesianStencil) {
  for (double a : {0.0, 0.25, 0.5})
    for (double l : {0.5, 2.0, 6.0}) {
      const auto U = [&](double r) { return oracle::bubble(l, a, r); };
      for (auto [x, y] : {std::pair{0.3, 0.4}, std::pair{-0.7, 0.2}, std::pair{1.1, -0.9}}) {
        const double r = std::hypot(x, y);
        const double lap = oracle::cartesian_laplacian(U, x, y, 1e-3);
        const double src = oracle::bubble_source(l, a, r);
        EXPECT_NEAR(lap + src, 0.0, 1e-6 * std::max(1.0, src)) << "a=" << a << " l=" << l;
      }
    }
}

TEST(Bubble, ResidualsSmallOnGrid) {
  const auto grid = geomspace(1e-6, 10.0, 200);
  for (double l : geomspace(0.1, 100.0, 10))
    for (double a : {0.0, 0.25, 0.5, 0.9}) {
      const BubbleParams p(l, a);
      EXPECT_LT(bubble_residual(p, grid), 1e-12);
      EXPECT_LT(bubble_residual_fd(p, 1e-3, 10.0, 4000), 1e-6);
    }
}

TEST(Bubble, MassClosedFormAgainstSimpson) {
  for (double a : {0.0, 0.25, 0.5, 0.9})
    for (double l : {0.3, 2.0, 20.0})
      for (double R : {0.5, 1.0, 3.0}) {
        const double ref = oracle::bubble_mass_simpson(l, a, R);
        EXPECT_NEAR(bubble_mass(BubbleParams(l, a), R) / ref, 1.0, 1e-10) << a << " " << l << " " << R;
      }
}

TEST(Bubble, MassExamples) {
  EXPECT_NEAR(bubble_mass(BubbleParams(2.0, 0.0), 1.0), 8.0 * kPi / 3.0, 1e-14);
  EXPECT_NEAR(bubble_mass(BubbleParams(4.0, 0.0), 1.0), 16.0 * kPi / 3.0, 1e-13);
  EXPECT_NEAR(bubble_mass(BubbleParams(1.0, 0.5), kInfinity), 4.0 * kPi, 1e-14);
  EXPECT_NEAR(full_mass(0.25), 6.0 * kPi, 1e-14);
}

TEST(Bubble, MassIncreasesWithLambda) {
  for (double a : {0.0, 0.5})
    for (double R : {0.5, 2.0}) {
      double prev = 0.0;
      for (double l : geomspace(1e-2, 1e2, 60)) {
        const double m = bubble_mass(BubbleParams(l, a), R);
        EXPECT_GT(m, prev);
        EXPECT_LT(m, full_mass(a));
        prev = m;
      }
    }
}

TEST(Bubble, MassRadiusInvertsMass) {
  for (double a : {0.0, 0.5, 0.9}) {
    const BubbleParams p(3.0, a);
    for (double R : {0.01, 0.5, 2.0, 40.0}) {
      const double m = bubble_mass(p, R);
      EXPECT_NEAR(bubble_mass_radius(p, m) / R, 1.0, 1e-12);
    }
  }
}

TEST(Bubble, LambdaForMassInverts) {
  for (double a : {0.0, 0.5})
    for (double l : {0.2, 3.0, 50.0}) EXPECT_NEAR(lambda_for_mass(bubble_mass(BubbleParams(l, a), 1.0), a, 1.0) / l, 1.0, 1e-10);
}

TEST(BubblePair, ProductAndMassSum) {
  const double l2 = pair_lambda(2.0, 0.0, 1.0);
  EXPECT_NEAR(l2, 4.0, 1e-14);
  for (double a : {0.0, 0.3, 0.8})
    for (double R : {0.3, 1.0, 5.0})
      for (double l : {0.05, 1.0, 30.0}) {
        const double p = pair_lambda(l, a, R);
        EXPECT_NEAR(l * p * std::pow(R, 2.0 * (1.0 - a)) / 8.0, 1.0, 1e-13);
        const double sum = bubble_mass(BubbleParams(l, a), R) + bubble_mass(BubbleParams(p, a), R);
        EXPECT_NEAR(sum / full_mass(a), 1.0, 1e-12);
        EXPECT_NEAR(oracle::bubble(l, a, R), oracle::bubble(p, a, R), 1e-12 * std::max(1.0, std::abs(oracle::bubble(l, a, R))));
      }
}

TEST(BubblePair, CriticalLambdaIsSelfPaired) {
  for (double a : {0.0, 0.5})
    for (double R : {0.5, 1.0, 4.0}) {
      const double c = critical_lambda(a, R);
      EXPECT_NEAR(pair_lambda(c, a, R) / c, 1.0, 1e-14);
      EXPECT_NEAR(bubble_mass(BubbleParams(c, a), R), 0.5 * full_mass(a), 1e-12);
    }
}

TEST(BubblePair, LargerLambdaLiesAbove) {
  const double a = 0.25, R = 1.3;
  const double l1 = 0.7, l2 = pair_lambda(l1, a, R);
  ASSERT_GT(l2, l1);
  for (double r : geomspace(1e-4, 0.999 * R, 40)) EXPECT_GT(oracle::bubble(l2, a, r), oracle::bubble(l1, a, r));
  for (double r : {1.01 * R, 3.0 * R, 50.0 * R}) EXPECT_LT(oracle::bubble(l2, a, r), oracle::bubble(l1, a, r));
}

TEST(BubblePair, MatchBoundaryValue) {
  const double a = 0.4, R = 2.0;
  const double u = eval_bubble(BubbleParams(1.5, a), R);
  const auto pair = match_boundary_value(u, a, R);
  ASSERT_TRUE(pair.has_value());
  EXPECT_NEAR(pair->lambda1, std::min(1.5, pair_lambda(1.5, a, R)), 1e-12);
  EXPECT_NEAR(pair->lambda2, std::max(1.5, pair_lambda(1.5, a, R)), 1e-12);
  EXPECT_FALSE(match_boundary_value(u + 10.0, a, R).has_value());
}

TEST(Bubble, BolEqualityOnBoundary) {
  for (double a : {0.0, 0.5, 0.9})
    for (double l : {0.3, 2.0, 9.0}) {
      const BubbleParams p(l, a);
      const double R = 0.8;
      const double L = 2.0 * kPi * std::pow(R, 1.0 - a) * std::sqrt(oracle::bubble_source(l, a, R) * std::pow(R, 2.0 * a));
      EXPECT_NEAR(boundary_root_integral(p, R) / L, 1.0, 1e-13);
      const double m = bubble_mass(p, R);
      EXPECT_NEAR(L * L / (0.5 * m * (full_mass(a) - m)), 1.0, 1e-12);
    }
}

TEST(Bubble, SampledProfileInterpolates) {
  const BubbleParams p(2.0, 0.3);
  const auto psi = sample_bubble(p, geomspace(1e-4, 1.0, 800));
  for (double r : {3e-4, 0.01, 0.2, 0.77}) EXPECT_NEAR(psi(r), oracle::bubble(2.0, 0.3, r), 1e-9);
}
