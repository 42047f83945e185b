#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "sphcov/bubble.hpp"
#include "sphcov/rearrange.hpp"

using namespace sphcov;

namespace {

RadialProfile radial(const std::vector<double>& r, double (*f)(double)) {
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = f(r[i]);
  return RadialProfile(r, v, f(0.0));
}

double wavy(double r) { return std::cos(6.0 * r) * std::exp(-r) + 0.3 * r; }

double pyramid(double x, double y) { return 1.0 - std::max(std::abs(x), std::abs(y)); }

}  // namespace

TEST(Distribution, LinearConeLebesgue) {
  const auto phi = radial(linspace(1e-3, 1.0, 1000), [](double r) { return 1.0 - r; });
  const RadialDistribution d(phi, RadialMeasure::lebesgue());
  for (double t : {0.0, 0.2, 0.5, 0.9}) EXPECT_NEAR(d(t), kPi * (1 - t) * (1 - t), 1e-12);
  EXPECT_EQ(d(1.0), 0.0);
  EXPECT_NEAR(d(-0.1), kPi, 1e-12);
}

TEST(Distribution, BubbleQuotient) {
  // phi = U_4 - U_2 decreases from ln 4 to 0 on B_1; {phi > t} = B_{r(t)}.
  const auto grid = geomspace(1e-4, 1.0, 4000);
  std::vector<double> v(grid.size());
  const auto f = [](double r) { return oracle::bubble(4.0, 0.0, r) - oracle::bubble(2.0, 0.0, r); };
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = f(grid[i]);
  const RadialProfile phi(grid, v, f(0.0));
  const RadialDistribution d(phi, RadialMeasure::bubble(BubbleParams(2.0, 0.0)));
  EXPECT_NEAR(d(0.0) / (8.0 * kPi / 3.0), 1.0, 1e-9);
  double prev = d(0.0);
  for (double t : linspace(0.05, std::log(4.0) - 1e-3, 20)) {
    // Invert f by bisection, then the mass by Simpson.
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 200; ++k) ((f(0.5 * (lo + hi)) > t) ? lo : hi) = 0.5 * (lo + hi);
    const double ref = oracle::bubble_mass_simpson(2.0, 0.0, lo, 20000);
    // phi is linear between nodes, so the match is second order in the spacing.
    EXPECT_NEAR(d(t), ref, 1e-5 * ref);
    EXPECT_LT(d(t), prev);
    prev = d(t);
  }
  EXPECT_EQ(d(std::log(4.0)), 0.0);
}

TEST(Distribution, Constant) {
  const RadialProfile c(linspace(0.1, 1.0, 10), std::vector<double>(10, 2.0), 2.0);
  const RadialDistribution d(c, RadialMeasure::lebesgue());
  EXPECT_NEAR(d(1.9), kPi, 1e-14);
  EXPECT_EQ(d(2.0), 0.0);
}

TEST(Rearrange, IdentityTransport) {
  for (double a : {0.0, 0.25, 0.5}) {
    const BubbleParams p(2.0, a);
    const auto phi = radial(geomspace(1e-3, 1.0, 400), [](double r) { return 1.0 - r * r + 0.1 * std::cos(r); });
    const auto m = RadialMeasure::bubble(p);
    const auto star = rearrange_two_measures(phi, m, m);
    ASSERT_EQ(star.size(), phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
      EXPECT_NEAR(star.nodes[i], phi.nodes[i], 1e-9 * phi.nodes[i]);
      EXPECT_EQ(star.values[i], phi.values[i]);
    }
    EXPECT_TRUE(equimeasurability_report(phi, star, m, m).ok());
  }
}

TEST(Rearrange, NonMonotoneAgainstSortedShells) {
  // Brute force: split B_1 into thin shells, sort the shells by value, stack
  // them from the center outwards in the target measure.
  const auto grid = linspace(1e-3, 1.0, 2000);
  const auto phi = radial(grid, wavy);
  const auto src = RadialMeasure::lebesgue();
  const auto tgt = RadialMeasure::bubble(BubbleParams(1.0, 0.25));
  const auto star = rearrange_two_measures(phi, src, tgt);
  const int n = 20000;
  std::vector<double> val(n), mass(n);
  for (int i = 0; i < n; ++i) {
    const double r0 = double(i) / n, r1 = double(i + 1) / n;
    val[i] = wavy(0.5 * (r0 + r1));
    mass[i] = kPi * (r1 * r1 - r0 * r0);
  }
  const auto sorted = oracle::cell_sort(val, mass);
  for (std::size_t k = 500; k < sorted.value.size(); k += 1500) {
    const double r = tgt.radius_for_mass(sorted.cumulative[k]);
    EXPECT_NEAR(star.linear(r), sorted.value[k], 2e-3);
  }
  EXPECT_TRUE(star.nonincreasing());
  EXPECT_NEAR(tgt.mass(star.outer()) / kPi, 1.0, 1e-9);
}

TEST(Rearrange, EquimeasurableAtSampledLevels) {
  const auto phi = radial(linspace(1e-3, 1.0, 500), wavy);
  const auto src = RadialMeasure::lebesgue();
  const auto tgt = RadialMeasure::bubble(BubbleParams(1.0, 0.25));
  const auto star = rearrange_two_measures(phi, src, tgt);
  const auto r = equimeasurability_report(phi, star, src, tgt);
  EXPECT_TRUE(r.ok()) << dump_json(to_json(r));
  EXPECT_LT(r.lhs, 1e-9);
  EXPECT_LE(r.inputs["between_levels"].get<double>(), r.inputs["shell_bound"].get<double>());
}

TEST(Rearrange, ConstantProfile) {
  const RadialProfile c(linspace(0.1, 1.0, 10), std::vector<double>(10, 2.0), 2.0);
  const auto tgt = RadialMeasure::bubble(BubbleParams(2.0, 0.0));
  const auto star = rearrange_two_measures(c, RadialMeasure::lebesgue(), tgt);
  EXPECT_EQ(star.size(), 1u);
  EXPECT_EQ(star.values.front(), 2.0);
  EXPECT_NEAR(tgt.mass(star.outer()), kPi, 1e-12);
  const auto r = equimeasurability_report(c, star, RadialMeasure::lebesgue(), tgt);
  EXPECT_EQ(r.lhs, 0.0);
}

TEST(Rearrange, TargetExhausted) {
  const auto phi = radial(linspace(0.01, 3.0, 50), [](double r) { return -r; });
  try {
    rearrange_two_measures(phi, RadialMeasure::lebesgue(), RadialMeasure::bubble(BubbleParams(1.0, 0.0)));
    FAIL() << "expected TargetExhausted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TargetExhausted);
  }
}

TEST(Rearrange, OrderPreservation) {
  Rng rng(99);
  const auto grid = linspace(1e-3, 1.0, 400);
  const auto src = RadialMeasure::lebesgue();
  const auto tgt = RadialMeasure::bubble(BubbleParams(1.5, 0.0));
  const auto phi = radial(grid, wavy);
  const auto s1 = rearrange_two_measures(phi, src, tgt);
  for (int k = 0; k < 10; ++k) {
    const double amp = rng.uniform(0.01, 0.5), c = rng.uniform(0.0, 1.0);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = wavy(grid[i]) + amp * std::exp(-50.0 * (grid[i] - c) * (grid[i] - c));
    const RadialProfile hat(grid, v, wavy(0.0) + amp * std::exp(-50.0 * c * c));
    const auto s2 = rearrange_two_measures(hat, src, tgt);
    // Exact at the nodes of s1; s2 is read between its own nodes.
    for (std::size_t k = 0; k < s1.size(); ++k) EXPECT_LE(s1.values[k], s2.linear(s1.nodes[k]) + 1e-5);
    EXPECT_GE(s2.outer(), s1.outer());
  }
}

TEST(Rearrange, CellsMatchBruteForceSort) {
  const std::size_t n = 64;
  const auto g = CellGrid2D::sample([](double x, double y) { return std::sin(3 * x) * std::cos(2 * y) + x * y; }, n);
  const auto tgt = RadialMeasure::lebesgue();
  const auto star = rearrange_two_measures(g, tgt);
  EXPECT_TRUE(star.nonincreasing());
  const auto sorted = oracle::cell_sort(g.phi, g.mass);
  for (double t : linspace(-1.5, 1.5, 101)) {
    const double ref = oracle::cell_distribution(g.phi, g.mass, t);
    EXPECT_NEAR(superlevel_target_mass(star, tgt, t, true), ref, 1e-12 * g.total_mass());
  }
  EXPECT_NEAR(tgt.mass(star.outer()), sorted.cumulative.back(), 1e-12);
}

TEST(Rearrange, SchwarzPyramidFirstOrder) {
  std::vector<double> mism;
  for (std::size_t n : {32, 64, 128}) {
    const auto g = CellGrid2D::sample(pyramid, n);
    const auto star = rearrange_two_measures(g, RadialMeasure::lebesgue());
    double worst = 0.0;
    for (std::size_t k = 0; k < star.size(); ++k) {
      const double t = star.values[k];
      const double exact = 4.0 * (1.0 - t) * (1.0 - t);
      worst = std::max(worst, std::abs(kPi * star.nodes[k] * star.nodes[k] - exact));
      if (k > 0) worst = std::max(worst, std::abs(kPi * star.nodes[k - 1] * star.nodes[k - 1] - exact));
    }
    mism.push_back(worst / 4.0);
    EXPECT_LT(mism.back(), 2.0 / double(n));
  }
  for (int i = 0; i < 2; ++i) {
    EXPECT_GE(mism[i] / mism[i + 1], 1.5);
    EXPECT_LE(mism[i] / mism[i + 1], 2.5);
  }
}

TEST(Rearrange, CellReportBoundHalves) {
  std::vector<double> b;
  for (std::size_t n : {32, 64, 128}) {
    const auto g = CellGrid2D::sample(pyramid, n);
    const auto t = RadialMeasure::lebesgue();
    const auto r = equimeasurability_report(g, rearrange_two_measures(g, t), t);
    EXPECT_TRUE(r.ok());
    b.push_back(r.tolerance);
  }
  EXPECT_NEAR(b[0] / b[1], 2.0, 0.5);
  EXPECT_NEAR(b[1] / b[2], 2.0, 0.5);
}

TEST(Rearrange, CellsCsvRoundTrip) {
  const auto g = CellGrid2D::sample(pyramid, 5);
  std::stringstream ss;
  write_cells_csv(ss, g);
  const auto h = read_cells_csv(ss);
  EXPECT_EQ(h.n, g.n);
  EXPECT_EQ(h.phi, g.phi);
  EXPECT_EQ(h.mass, g.mass);
  std::stringstream bad("i,j,phi,mass\n0,0,1,1\n");
  EXPECT_THROW(read_cells_csv(bad), Error);
}

TEST(GradientLevel, EqualityConfiguration) {
  const BubbleParams p(2.0, 0.0);
  const auto m = RadialMeasure::bubble(p);
  const auto grid = linspace(1e-4, 1.0 - 1e-4, 4000);
  const auto phi = radial(grid, [](double r) { return 1.0 - r; });
  const auto r = gradient_level_check(phi, m, m);
  EXPECT_TRUE(r.ok());
  EXPECT_LT(std::abs(r.deficit), 1e-6 * r.rhs + 1e-12);
}

TEST(GradientLevel, ShiftInvariant) {
  const auto m = RadialMeasure::bubble(BubbleParams(2.0, 0.0));
  const auto grid = linspace(1e-3, 1.0, 1000);
  const auto phi = radial(grid, [](double r) { return 1.0 - r * r; });
  const auto shifted = phi.shifted(3.0);
  const auto a = gradient_level_check(phi, m, m);
  const auto b = gradient_level_check(shifted, m, m);
  EXPECT_NEAR(a.deficit, b.deficit, 1e-10 * a.rhs);
  EXPECT_NEAR(b.deficit, 0.0, 1e-9);
}

TEST(GradientLevel, NeedsDecreasingProfile) {
  const auto m = RadialMeasure::lebesgue();
  const auto phi = radial(linspace(1e-3, 1.0, 100), wavy);
  EXPECT_THROW(gradient_level_check(phi, m, m), Error);
}
