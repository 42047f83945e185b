#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sphcov/onsager.hpp"

using namespace sphcov;

TEST(Onsager, WeightExamples) {
  EXPECT_NEAR(onsager_weight(0.0, OnsagerParams(2 * kEightPi, 0.0)), 8.0, 1e-14);
  EXPECT_NEAR(onsager_weight(1.0, OnsagerParams(12 * kPi, 0.0)), 16.0, 1e-13);
  const OnsagerParams p = OnsagerParams::from_b(1.3, 0.7);
  for (double r : {0.0, 0.5, 3.0}) EXPECT_NEAR(std::log(onsager_weight(r, p)), oracle::onsager_log_weight(p.beta, 0.7, r), 1e-13);
}

TEST(Onsager, ParameterRange) {
  EXPECT_THROW(OnsagerParams(kEightPi, 1.0), Error);
  EXPECT_THROW(OnsagerParams(2.1 * kEightPi, 1.0), Error);
  EXPECT_THROW(OnsagerParams(1.5 * kEightPi, -1.0), Error);
  EXPECT_NO_THROW(OnsagerParams(2 * kEightPi, 0.0));
}

TEST(Onsager, LaplacianAgainstCartesianStencil) {
  for (double b : {1.1, 1.5, 2.0})
    for (double g : {0.0, 0.8, 3.0}) {
      const OnsagerParams p = OnsagerParams::from_b(b, g);
      const auto H = [&](double r) { return oracle::onsager_log_weight(p.beta, g, r); };
      for (auto [x, y] : {std::pair{0.2, 0.1}, std::pair{-1.0, 0.7}, std::pair{2.0, -1.5}}) {
        const double lap = oracle::cartesian_laplacian(H, x, y, 1e-3);
        EXPECT_NEAR(laplacian_H(std::hypot(x, y), p), lap, 1e-7);
        EXPECT_NEAR(laplacian_H_fd(std::hypot(x, y), p), lap, 1e-7);
      }
    }
}

TEST(Onsager, PositiveCoreAndRadius) {
  const OnsagerParams p = OnsagerParams::from_b(1.5, 1.0);
  ASSERT_TRUE(has_positive_core(p));
  const double r = positivity_radius(p);
  EXPECT_NEAR(r * r, 1.0 / 3.0, 1e-15);
  EXPECT_LT(laplacian_H(0.99 * r, p), 0.0);
  EXPECT_GT(laplacian_H(1.01 * r, p), 0.0);
  const OnsagerParams sub = OnsagerParams::from_b(1.5, 0.4);
  EXPECT_FALSE(has_positive_core(sub));
  for (double s : linspace(0.0, 10.0, 50)) EXPECT_GE(laplacian_H(s, sub), -1e-15);
  try {
    positivity_radius(sub);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SubharmonicRegime);
  }
  EXPECT_TRUE(symmetry_forced(sub));
}

TEST(Onsager, GammaThreshold) {
  const auto top = gamma_threshold(2 * kEightPi);
  EXPECT_NEAR(top.paper_bound, 1.0, 1e-15);
  EXPECT_NEAR(top.exact_root, 1.0, 1e-15);
  for (double b : linspace(1.02, 1.98, 49)) {
    const auto g = gamma_threshold(b * kEightPi);
    EXPECT_LT(g.paper_bound, g.exact_root);
    // The exact root solves gamma^2 + 2 gamma (b - 3) + (b - 1)^2 = 0.
    const double x = g.exact_root;
    EXPECT_NEAR(x * x + 2 * x * (b - 3) + (b - 1) * (b - 1), 0.0, 1e-12);
    EXPECT_NEAR(contradiction_value(OnsagerParams::from_b(b, x)), 2.0, 1e-12);
  }
}

TEST(Onsager, DeficitChainAgainstMidpoint) {
  const OnsagerParams p = OnsagerParams::from_b(1.5, 2.0);
  const auto c = deficit_chain(p);
  EXPECT_NEAR(c.bound, deficit_bound(p), 0.0);
  EXPECT_NEAR(c.disk_quadrature, c.bound, 1e-9);
  EXPECT_NEAR(c.disk_closed, c.bound, 1e-12);
  EXPECT_NEAR(2 * c.half_disk_quadrature, c.bound, 1e-9);
  const auto H = [&](double r) { return oracle::onsager_log_weight(p.beta, 2.0, r); };
  const double half = oracle::half_disk_midpoint(
      [&](double x, double y) { return -oracle::cartesian_laplacian(H, x, y, 1e-3); }, c.radius, 800);
  EXPECT_NEAR(2 * half / c.bound, 1.0, 1e-3);
}

TEST(Onsager, ContradictionExamples) {
  const OnsagerParams p = OnsagerParams::from_b(1.5, 1.0);
  EXPECT_NEAR(contradiction_value(p), 1.5625, 1e-14);
  EXPECT_NEAR(deficit_bound(p), kPi / 2, 1e-14);
  EXPECT_TRUE(symmetry_forced(p));
  EXPECT_FALSE(symmetry_forced(OnsagerParams::from_b(1.5, 6.0)));
}

TEST(Onsager, ContradictionIncreasesPastCore) {
  for (double b : {1.1, 1.5, 1.9}) {
    double prev = contradiction_value(OnsagerParams::from_b(b, b - 1 + 1e-6));
    EXPECT_NEAR(prev, b, 1e-9);
    for (double g : linspace(b - 1 + 1e-3, 8.0, 100)) {
      const double v = contradiction_value(OnsagerParams::from_b(b, g));
      EXPECT_GT(v, prev);
      prev = v;
    }
  }
}

TEST(Onsager, Remark) {
  for (double b : linspace(1.0 + 1e-6, 2.0, 101)) {
    const auto r = remark_check(b * kEightPi);
    EXPECT_TRUE(r.holds);
    EXPECT_EQ(r.equality, b == 2.0);
  }
}

TEST(Onsager, Json) {
  const auto j = to_json(OnsagerParams::from_b(1.5, 1.0), true);
  EXPECT_EQ(j["regime"], "positive-core");
  EXPECT_EQ(j["symmetry_forced"], true);
  const auto s = to_json(OnsagerParams::from_b(1.5, 0.1));
  EXPECT_TRUE(s["positivity_radius"].is_null());
  EXPECT_EQ(s["regime"], "subharmonic");
}
