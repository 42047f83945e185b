#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sphcov/bubble.hpp"
#include "sphcov/meanfield.hpp"

using namespace sphcov;

TEST(Stereographic, MatchesInverseFormula) {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const double x = rng.uniform(-5, 5), y = rng.uniform(-5, 5);
    const auto s = inverse_stereographic({x, y});
    const auto o = oracle::inverse_stereo(x, y);
    EXPECT_NEAR(s.x1, o[0], 1e-15);
    EXPECT_NEAR(s.x2, o[1], 1e-15);
    EXPECT_NEAR(s.x3, o[2], 1e-15);
    const auto q = stereographic(s);
    EXPECT_NEAR(q.x, x, 1e-12);
    EXPECT_NEAR(q.y, y, 1e-12);
  }
  const auto south = stereographic({0, 0, -1});
  EXPECT_EQ(south.x, 0.0);
  EXPECT_EQ(south.y, 0.0);
}

TEST(Stereographic, NorthPoleThrows) {
  try {
    stereographic({0, 0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AtPole);
  }
}

TEST(Reduction, WeightExponent) {
  const std::vector<SphereAtom> none;
  EXPECT_NEAR(reduce_sphere_to_plane(4.0 * kPi, none).smooth_exponent, 1.0, 1e-15);
  EXPECT_NEAR(reduce_sphere_to_plane(kEightPi, none).smooth_exponent, 0.0, 1e-15);
  const std::vector<SphereAtom> two{{-0.5, {1, 0, 0}}, {-0.25, {0, 0, -1}}};
  const auto d = reduce_sphere_to_plane(2.0 * kPi, two);
  EXPECT_NEAR(d.smooth_exponent, 2.0 - 0.75 - 0.5, 1e-15);
  ASSERT_EQ(d.atoms.size(), 2u);
  EXPECT_NEAR(d.atoms[0].location.x, 1.0, 1e-15);
  EXPECT_NEAR(d.atoms[1].location.x, 0.0, 1e-15);
  EXPECT_THROW(reduce_sphere_to_plane(0.0, none), Error);
}

TEST(AreaFraction, AgainstMidpointRule) {
  const auto dens = [](double x, double y) {
    const double q = 1.0 + x * x + y * y;
    return 4.0 / (q * q) / (4.0 * oracle::pi);
  };
  for (double r : {0.5, 1.0, 2.0}) {
    const double half = oracle::half_disk_midpoint(dens, r, 2000);
    EXPECT_NEAR(sphere_area_fraction(RegionDescriptor::half_disk(r)), half, 1e-5);
    EXPECT_NEAR(sphere_area_fraction(RegionDescriptor::disk(r)), 2.0 * half, 2e-5);
    EXPECT_NEAR(sphere_area_fraction_quadrature(RegionDescriptor::disk(r)), r * r / (1 + r * r), 1e-12);
  }
  EXPECT_EQ(sphere_area_fraction(RegionDescriptor::plane()), 1.0);
  EXPECT_NEAR(sphere_area_fraction(RegionDescriptor::annulus(1.0, std::sqrt(3.0))), 0.25, 1e-15);
  EXPECT_NEAR(sphere_area_fraction_filled(RegionDescriptor::annulus(1.0, std::sqrt(3.0))), 0.75, 1e-15);
}

TEST(Regions, Membership) {
  const auto up = RegionDescriptor::half_disk(1.0), down = RegionDescriptor::half_disk(1.0, true);
  EXPECT_TRUE(up.contains({0.1, 0.5}));
  EXPECT_FALSE(up.contains({0.1, -0.5}));
  EXPECT_TRUE(down.contains({0.1, -0.5}));
  EXPECT_FALSE(up.contains({0.0, 0.0}));
  const auto ann = RegionDescriptor::annulus(1.0, 2.0);
  EXPECT_FALSE(ann.contains({0.0, 0.0}));
  EXPECT_TRUE(fill_holes(ann).contains({0.0, 0.0}));
  EXPECT_THROW(RegionDescriptor::annulus(2.0, 1.0), Error);
  EXPECT_THROW(RegionDescriptor::disk(-1.0), Error);
}

TEST(AlphaRegion, AtomsAndSmoothPart) {
  const SingularData d{{weight_atom(0.3, {0.1, 0.0}), weight_atom(0.5, {5.0, 0.0})}, 0.0};
  EXPECT_NEAR(alpha_region(d, RegionDescriptor::disk(1.0)), 0.3, 1e-15);
  EXPECT_NEAR(alpha_region(d, RegionDescriptor::plane()), 0.8, 1e-15);
  // A hole swallows the atom at the origin.
  const SingularData h{{{-0.4, {0.0, 0.0}}}, 1.0};
  EXPECT_NEAR(alpha_region(h, RegionDescriptor::annulus(0.5, 1.0)), 0.5 + 0.4, 1e-15);
  // Positive orders and negative smooth exponents contribute nothing.
  const SingularData p{{{0.7, {0.0, 0.0}}}, -0.5};
  EXPECT_EQ(alpha_region(p, RegionDescriptor::disk(2.0)), 0.0);
}

TEST(AlphaRegion, DisjointHalvesStayBelowChain) {
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    std::vector<SphereAtom> atoms;
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double z = rng.uniform(-1.0, 0.9), th = rng.uniform(0.0, 2 * kPi), s = std::sqrt(1 - z * z);
      atoms.push_back({rng.uniform(-0.6, -0.05), {s * std::cos(th), s * std::sin(th), z}});
      sum += atoms.back().order;
    }
    const double rho = rng.uniform(0.05, 0.95) * 4 * kPi * (2 + sum);
    const auto d = reduce_sphere_to_plane(rho, atoms);
    const double r1 = rng.log_uniform(0.1, 10), r2 = rng.log_uniform(0.1, 10);
    const double a12 =
        alpha_region(d, RegionDescriptor::half_disk(r1)) + alpha_region(d, RegionDescriptor::half_disk(r2, true));
    EXPECT_LE(a12, (kEightPi - rho) / (4 * kPi) + 1e-12);
  }
}

TEST(Thresholds, NamedValues) {
  const std::vector<double> three{-0.5, -0.5, -0.5}, none, disk{-0.5};
  const auto s3 = thresholds(three, Domain::Sphere);
  EXPECT_NEAR(*s3.sphere_uniqueness, 2 * kPi, 1e-14);
  EXPECT_TRUE(s3.polytope_applicable);
  EXPECT_TRUE(s3.necessity_ok);
  EXPECT_NEAR(s3.coercivity, 4 * kPi, 1e-14);
  EXPECT_NEAR(*thresholds(none, Domain::Sphere).sphere_uniqueness, kEightPi, 1e-14);
  const auto d = thresholds(disk, Domain::Disk);
  EXPECT_NEAR(*d.disk_uniqueness, 4 * kPi, 1e-14);
  EXPECT_FALSE(d.open_gap.has_value());
  EXPECT_FALSE(d.sphere_uniqueness.has_value());
}

TEST(Thresholds, NecessityAndGap) {
  const std::vector<double> heavy{-0.9, -0.9, -0.9};
  EXPECT_FALSE(thresholds(heavy, Domain::Sphere).necessity_ok);
  const std::vector<double> two{-0.25, -0.25};
  const auto d = thresholds(two, Domain::Disk);
  ASSERT_TRUE(d.open_gap.has_value());
  EXPECT_NEAR(d.open_gap->first, 4 * kPi, 1e-14);
  EXPECT_NEAR(d.open_gap->second, 6 * kPi, 1e-14);
  for (int n = 1; n <= 6; ++n) {
    const std::vector<double> o(n, -0.3);
    const auto t = thresholds(o, Domain::Sphere);
    EXPECT_NEAR(*t.sphere_uniqueness - t.coercivity, 4 * kPi * (n - 2) * -0.3, 1e-12);
  }
}

TEST(Thresholds, OrderRange) {
  const std::vector<double> pos{0.5}, low{-1.0};
  try {
    thresholds(pos, Domain::Sphere);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::OrderOutOfRange);
  }
  EXPECT_NO_THROW(thresholds(pos, Domain::Disk));
  EXPECT_THROW(thresholds(low, Domain::Disk), Error);
}

TEST(Thresholds, Json) {
  const std::vector<double> three{-0.5, -0.5, -0.5};
  const auto j = to_json(thresholds(three, Domain::Sphere), true);
  EXPECT_EQ(j["domain"], "sphere");
  EXPECT_EQ(j["pi_multiples"]["sphere_uniqueness"], "2 pi");
  EXPECT_TRUE(j["disk_uniqueness"].is_null());
}

TEST(DiskShooting, ReproducesBubble) {
  for (double a : {0.1, 0.5, 0.9})
    for (double l : {0.3, 2.0, 30.0}) {
      const auto s = shoot_disk_lambda(a, l);
      for (double r : {1e-3, 0.1, 0.5, 1.0})
        EXPECT_NEAR(s.profile(r), oracle::bubble(l, a, r), 1e-7 * std::max(1.0, std::abs(oracle::bubble(l, a, r))));
      EXPECT_NEAR(s.rho / oracle::bubble_mass_simpson(l, a, 1.0), 1.0, 1e-7);
    }
}

TEST(DiskShooting, AgainstRk4) {
  // Start RK4 from the two-term series at r0 and integrate in ln r.
  const double alpha = 0.5, a = 0.5, v0 = 0.3;
  const double r0 = 1e-6, q = std::exp(v0) * std::pow(r0, 2 * a) / (4 * a * a);
  const auto rk = oracle::rk4_radial([&](double r) { return std::pow(r, -2 * alpha); }, std::log(r0), v0 - q,
                                     -2 * a * q, 0.0, 20000);
  const auto s = shoot_disk_center(alpha, v0);
  for (std::size_t i = 0; i < rk.t.size(); i += 4000) EXPECT_NEAR(s.profile(std::exp(rk.t[i])), rk.v[i], 1e-8);
  EXPECT_NEAR(s.profile(1.0), rk.v.back(), 1e-8);
}

TEST(DiskShooting, RhoRoundTrip) {
  const auto s = shoot_disk_rho(0.5, 2 * kPi);
  EXPECT_NEAR(s.lambda, std::sqrt(8.0), 1e-6 * std::sqrt(8.0));
  EXPECT_NEAR(s.rho, 2 * kPi, 1e-8);
  try {
    shoot_disk_rho(0.5, 4 * kPi);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RhoOutOfRange);
  }
  EXPECT_THROW(shoot_disk_center(0.0, 1.0), Error);
}

TEST(SphereShooting, ExactSolutions) {
  for (double k : {4.0, 6.0}) {
    const double rho = k * kPi;
    const auto s = shoot_sphere(rho, std::log(rho / oracle::pi));
    double worst = 0.0;
    for (double r : linspace(0.0, 100.0, 501))
      worst = std::max(worst, std::abs(s.profile(r) - (std::log(rho / oracle::pi) - rho / (4 * oracle::pi) * std::log1p(r * r))));
    EXPECT_LT(worst, 1e-6) << rho;
    EXPECT_NEAR(s.mass, rho, s.tail + 1e-8 * rho);
  }
  const auto s4 = shoot_sphere(4 * kPi, std::log(4.0));
  for (double r : {0.0, 1.0, 10.0, 100.0}) EXPECT_NEAR(s4.profile(r), std::log(4 / (1 + r * r)), 1e-6);
}

TEST(SphereShooting, CenterFromMassAlone) {
  const double rho = 6 * kPi;
  EXPECT_NEAR(sphere_center_for_mass(rho), std::log(6.0), 1e-6);
  EXPECT_THROW(shoot_sphere(kEightPi, 0.0), Error);
}

TEST(SphereShooting, ScanIsMonotoneAndThreadIndependent) {
  const auto a = uniqueness_scan(7 * kPi, 12, 3.0, {}, {}, 1);
  const auto b = uniqueness_scan(7 * kPi, 12, 3.0, {}, {}, 4);
  EXPECT_TRUE(a.strictly_monotone);
  EXPECT_EQ(a.crossings, 1u);
  EXPECT_EQ(a.mass, b.mass);
}
