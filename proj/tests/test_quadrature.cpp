#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sphcov/bubble.hpp"
#include "sphcov/quadrature.hpp"

using namespace sphcov;

TEST(AnnulusIntegral, PolynomialExact) {
  for (double a : {0.0, 0.25, 0.5, 0.9}) {
    WeightedRadialDensity w{a, [a](double r) { return std::pow(r, 2.0 * a) * (1.0 + 2.0 * r * r + 3.0 * std::pow(r, 4)); }};
    for (double R : {0.4, 1.0, 2.5}) {
      const double ref = kPi * (R * R + std::pow(R, 4) + std::pow(R, 6));
      EXPECT_NEAR(annulus_integral(w, 0.0, R) / ref, 1.0, 1e-12);
    }
  }
}

TEST(AnnulusIntegral, ConstantDensityIsConeArea) {
  // 2 pi int_0^R r^{1-2 alpha} dr = pi R^{2a} / a.
  for (double a : {0.0, 0.5, 0.9}) {
    const double R = 1.7;
    const double ref = kPi * std::pow(R, 2.0 * (1.0 - a)) / (1.0 - a);
    EXPECT_NEAR(annulus_integral(constant_density(1.0, a), 0.0, R) / ref, 1.0, 1e-12);
  }
}

TEST(AnnulusIntegral, BubbleAgainstSimpsonAndClosedForm) {
  for (double a : {0.0, 0.25, 0.5, 0.9})
    for (double l : {0.1, 2.0, 100.0})
      for (double R : {0.5, 2.0}) {
        const BubbleParams p(l, a);
        const double q = annulus_integral(bubble_density_of(p), 0.0, R);
        EXPECT_NEAR(q / bubble_mass(p, R), 1.0, 1e-10);
        EXPECT_NEAR(q / oracle::bubble_mass_simpson(l, a, R), 1.0, 1e-9);
      }
}

TEST(AnnulusIntegral, InfiniteRadius) {
  for (double a : {0.0, 0.25, 0.5, 0.9})
    for (double l : {0.1, 1.0, 100.0})
      EXPECT_NEAR(annulus_integral(bubble_density_of(BubbleParams(l, a)), 0.0, kInfinity) / full_mass(a), 1.0, 1e-10);
}

TEST(AnnulusIntegral, Additivity) {
  const auto w = bubble_density_of(BubbleParams(3.0, 0.4));
  for (auto [r1, r2] : {std::pair{0.1, 1.0}, std::pair{0.5, 0.6}, std::pair{1e-3, 100.0}}) {
    const double whole = annulus_integral(w, 0.0, r2);
    EXPECT_NEAR((annulus_integral(w, 0.0, r1) + annulus_integral(w, r1, r2)) / whole, 1.0, 1e-12);
  }
}

TEST(AnnulusIntegral, ErrorsAreReported) {
  const auto w = bubble_density_of(BubbleParams(1.0, 0.0));
  EXPECT_THROW(annulus_integral(w, 1.0, 0.5), Error);
  WeightedRadialDensity neg{0.0, [](double r) { return r - 0.5; }};
  try {
    annulus_integral(neg, 0.0, 1.0);
    FAIL() << "negative density accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NegativeDensity);
  }
  WeightedRadialDensity slow{0.0, [](double r) { return 1.0 / (1.0 + r * r); }};
  EXPECT_THROW(annulus_integral(slow, 0.0, kInfinity), Error);
  try {
    annulus_integral(w, 0.0, 1.0, 1e-18);
    FAIL() << "unreachable tolerance accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonConvergent);
  }
}

TEST(CumulativeMass, RoundTrip) {
  for (double a : {0.0, 0.5, 0.9}) {
    const auto w = bubble_density_of(BubbleParams(2.0, a));
    const auto radii = geomspace(1e-3, 10.0, 80);
    const auto table = cumulative_mass_table(w, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) EXPECT_NEAR(invert_mass(table, table.masses[i]) / radii[i], 1.0, 1e-9);
    // Between nodes the inverse tracks the closed form.
    const BubbleParams p(2.0, a);
    for (std::size_t i : {10, 40, 70}) {
      const double m = 0.5 * (table.masses[i] + table.masses[i + 1]);
      EXPECT_NEAR(invert_mass(table, m) / bubble_mass_radius(p, m), 1.0, 2e-3);
    }
    EXPECT_THROW(invert_mass(table, 2.0 * table.max_mass()), Error);
  }
}

TEST(CircleRootIntegral, Bubble) {
  const BubbleParams p(2.0, 0.3);
  EXPECT_NEAR(circle_root_integral(bubble_density_of(p), 1.2) / boundary_root_integral(p, 1.2), 1.0, 1e-13);
}

TEST(ProfileMass, SampledBubble) {
  for (double a : {0.0, 0.25, 0.5, 0.9}) {
    const BubbleParams p(2.0, a);
    const auto psi = sample_bubble(p, geomspace(resolvable_radius(p), 1.0, 2000));
    const ProfileMass pm(psi, a);
    EXPECT_NEAR(pm.total() / bubble_mass(p, 1.0), 1.0, 1e-9);
    for (double r : {0.01, 0.3, 0.9}) EXPECT_NEAR(pm.mass(r) / bubble_mass(p, r), 1.0, 1e-8);
    const double m = 0.5 * pm.total();
    EXPECT_NEAR(pm.radius_for_mass(m) / bubble_mass_radius(p, m), 1.0, 1e-8);
  }
}

TEST(RadialMeasure, Kinds) {
  const auto leb = RadialMeasure::lebesgue();
  EXPECT_NEAR(leb.mass(2.0), 4.0 * kPi, 1e-12);
  const auto bub = RadialMeasure::bubble(BubbleParams(2.0, 0.0));
  EXPECT_NEAR(bub.mass(1.0), 8.0 * kPi / 3.0, 1e-12);
  EXPECT_NEAR(bub.radius_for_mass(8.0 * kPi / 3.0), 1.0, 1e-10);
  EXPECT_NEAR(bub.total(), kEightPi, 1e-12);
}
