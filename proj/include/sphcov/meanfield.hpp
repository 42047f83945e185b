#pragma once

// Mean field reductions on the sphere and the disk: stereographic pullback,
// the singular curvature mass alpha(omega) of a region, the uniqueness and
// coercivity thresholds, and radial shooting for the reduced equations.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "sphcov/bubble.hpp"
#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/ode.hpp"
#include "sphcov/profile.hpp"
#include "sphcov/quadrature.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

struct SpherePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

/// Projection from the north pole (0,0,1) onto the plane x3 = 0.
inline PlanePoint stereographic(const SpherePoint& p) {
  const double d = 1.0 - p.x3;
  require(d > 0.0, Errc::AtPole, "stereographic projection is undefined at the north pole");
  return {p.x1 / d, p.x2 / d};
}

inline SpherePoint inverse_stereographic(const PlanePoint& q) {
  const double n = q.x * q.x + q.y * q.y;
  const double d = 1.0 + n;
  return {2.0 * q.x / d, 2.0 * q.y / d, (n - 1.0) / d};
}

/// A Dirac source 4 pi order delta_location on the right-hand side of
/// Delta u + h e^u = 4 pi sum order_j delta_{q_j}. Negative orders carry
/// positive curvature.
struct Atom {
  double order = 0.0;
  PlanePoint location;
};

/// An atom of the weight itself, H containing 4 pi mass G_p; on the
/// equation side it is an atom of order -mass.
inline Atom weight_atom(double mass, PlanePoint location) { return {-mass, location}; }

struct SingularData {
  std::vector<Atom> atoms;
  /// h(x) = (1 + |x|^2)^{-l}.
  double smooth_exponent = 0.0;

  void validate() const {
    for (const auto& a : atoms)
      require(a.order > -1.0 && std::isfinite(a.order), Errc::OrderOutOfRange, "atom orders must exceed -1");
  }

  double order_sum() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.order;
    return s;
  }

  double weight(double r) const { return std::pow(1.0 + r * r, -smooth_exponent); }
};

struct SphereAtom {
  double order = 0.0;
  SpherePoint location;
};

/// Pulls a sphere problem with total mass rho back to the plane. The weight
/// exponent is l = (4 pi (2 + sum alpha_j) - rho) / 4 pi.
inline SingularData reduce_sphere_to_plane(double rho, std::span<const SphereAtom> atoms) {
  require(rho > 0.0, Errc::InvalidArgument, "rho must be > 0");
  SingularData d;
  double sum = 0.0;
  for (const auto& a : atoms) {
    d.atoms.push_back({a.order, stereographic(a.location)});
    sum += a.order;
  }
  d.validate();
  d.smooth_exponent = (4.0 * kPi * (2.0 + sum) - rho) / (4.0 * kPi);
  return d;
}

enum class RegionKind { Disk, Annulus, Plane, HalfDisk };

/// Centered regions: disk(r_out), annulus(r_in, r_out), the plane, and the
/// upper (or lower) half of disk(r_out).
struct RegionDescriptor {
  RegionKind kind = RegionKind::Plane;
  double r_in = 0.0;
  double r_out = kInfinity;
  bool lower = false;

  static RegionDescriptor disk(double r) {
    require(r > 0.0 && std::isfinite(r), Errc::InvalidArgument, "disk radius must be positive");
    return {RegionKind::Disk, 0.0, r};
  }
  static RegionDescriptor annulus(double r_in, double r_out) {
    require(r_in > 0.0 && r_out > r_in && std::isfinite(r_out), Errc::InvalidArgument,
            "annulus radii must satisfy 0 < r_in < r_out");
    return {RegionKind::Annulus, r_in, r_out};
  }
  static RegionDescriptor plane() { return {RegionKind::Plane, 0.0, kInfinity}; }
  static RegionDescriptor half_disk(double r, bool lower_half = false) {
    require(r > 0.0 && std::isfinite(r), Errc::InvalidArgument, "half-disk radius must be positive");
    return {RegionKind::HalfDisk, 0.0, r, lower_half};
  }

  bool simply_connected() const { return kind != RegionKind::Annulus; }

  /// Open-set membership.
  bool contains(const PlanePoint& p) const {
    const double r = std::hypot(p.x, p.y);
    switch (kind) {
      case RegionKind::Disk: return r < r_out;
      case RegionKind::Annulus: return r > r_in && r < r_out;
      case RegionKind::Plane: return true;
      case RegionKind::HalfDisk: return r < r_out && (lower ? p.y < 0.0 : p.y > 0.0);
    }
    return false;
  }
};

inline const char* to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Disk: return "disk";
    case RegionKind::Annulus: return "annulus";
    case RegionKind::Plane: return "plane";
    case RegionKind::HalfDisk: return "half-disk";
  }
  return "plane";
}

/// The region together with its holes.
inline RegionDescriptor fill_holes(const RegionDescriptor& w) {
  if (w.kind == RegionKind::Annulus) return RegionDescriptor::disk(w.r_out);
  return w;
}

namespace detail {
inline double disk_fraction(double r) { return std::isinf(r) ? 1.0 : r * r / (1.0 + r * r); }
}  // namespace detail

/// I(omega) = (1/4 pi) int_omega 4 / (1 + |x|^2)^2 dx, the share of the
/// sphere's area seen through the stereographic chart.
inline double sphere_area_fraction(const RegionDescriptor& w) {
  switch (w.kind) {
    case RegionKind::Disk: return detail::disk_fraction(w.r_out);
    case RegionKind::Annulus: return detail::disk_fraction(w.r_out) - detail::disk_fraction(w.r_in);
    case RegionKind::Plane: return 1.0;
    case RegionKind::HalfDisk: return 0.5 * detail::disk_fraction(w.r_out);
  }
  return 0.0;
}

/// I_s: I of the hole-filled region when the region is not simply connected.
inline double sphere_area_fraction_filled(const RegionDescriptor& w) {
  return sphere_area_fraction(w.simply_connected() ? w : fill_holes(w));
}

/// The same fraction by quadrature of the spherical density.
inline double sphere_area_fraction_quadrature(const RegionDescriptor& w, double tol = 1e-12) {
  WeightedRadialDensity d{0.0, [](double r) { return 4.0 / ((1.0 + r * r) * (1.0 + r * r)); }, 4.0};
  const double r0 = w.kind == RegionKind::Annulus ? w.r_in : 0.0;
  const double full = annulus_integral(d, r0, w.r_out, tol) / (4.0 * kPi);
  return w.kind == RegionKind::HalfDisk ? 0.5 * full : full;
}

/// alpha(omega) = mu_+(omega~) / 4 pi for the weight (1 + |x|^2)^{-l} with
/// atoms: the smooth part contributes l I_s(omega) when l > 0, every atom of
/// negative order inside the hole-filled region contributes -order, and
/// atoms of positive order belong to mu_- and contribute nothing.
inline double alpha_region(const SingularData& data, const RegionDescriptor& w) {
  data.validate();
  const auto filled = fill_holes(w);
  double a = std::max(data.smooth_exponent, 0.0) * sphere_area_fraction_filled(w);
  for (const auto& atom : data.atoms)
    if (atom.order < 0.0 && filled.contains(atom.location)) a -= atom.order;
  return a;
}

/// alpha(omega) < 1, the regime where the covering bound carries information.
inline bool alpha_below_one(const SingularData& data, const RegionDescriptor& w) {
  return alpha_region(data, w) < 1.0;
}

enum class Domain { Sphere, Disk };

inline const char* to_string(Domain d) { return d == Domain::Sphere ? "sphere" : "disk"; }

struct ThresholdRecord {
  Domain domain = Domain::Sphere;
  std::vector<double> orders;
  double order_sum = 0.0;
  /// Sphere: 4 pi (2 + sum alpha_j), strict uniqueness below it.
  std::optional<double> sphere_uniqueness;
  /// Sphere: the constant curvature level, covered when N >= 3.
  std::optional<double> polytope_level;
  bool polytope_applicable = false;
  /// 8 pi (1 + min_j {alpha_j, 0}).
  double coercivity = kEightPi;
  /// Disk: 8 pi (1 - alpha) with alpha = -sum of the negative orders.
  std::optional<double> disk_uniqueness;
  /// Sphere: sum alpha_j > -2.
  bool necessity_ok = true;
  /// Disk with two or more negative orders: the interval between the
  /// uniqueness and coercivity thresholds that is not settled.
  std::optional<std::pair<double, double>> open_gap;
};

inline ThresholdRecord thresholds(std::span<const double> orders, Domain domain) {
  ThresholdRecord t;
  t.domain = domain;
  t.orders.assign(orders.begin(), orders.end());
  double min_neg = 0.0, neg_sum = 0.0;
  std::size_t negatives = 0;
  for (double a : orders) {
    if (domain == Domain::Sphere)
      require(a > -1.0 && a < 0.0, Errc::OrderOutOfRange, "sphere thresholds need every order in (-1, 0)");
    else
      require(a > -1.0, Errc::OrderOutOfRange, "orders must exceed -1");
    t.order_sum += a;
    min_neg = std::min(min_neg, a);
    if (a < 0.0) {
      neg_sum += a;
      ++negatives;
    }
  }
  t.coercivity = kEightPi * (1.0 + min_neg);
  if (domain == Domain::Sphere) {
    const double level = 4.0 * kPi * (2.0 + t.order_sum);
    t.sphere_uniqueness = level;
    t.polytope_level = level;
    t.polytope_applicable = orders.size() >= 3;
    t.necessity_ok = t.order_sum > -2.0;
  } else {
    t.disk_uniqueness = kEightPi * (1.0 + neg_sum);
    if (negatives >= 2 && *t.disk_uniqueness < t.coercivity) t.open_gap = {{*t.disk_uniqueness, t.coercivity}};
  }
  return t;
}

inline Json to_json(const ThresholdRecord& t, bool pretty = false) {
  const auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json j;
  j["domain"] = to_string(t.domain);
  j["orders"] = t.orders;
  j["sphere_uniqueness"] = opt(t.sphere_uniqueness);
  j["polytope_level"] = opt(t.polytope_level);
  j["polytope_applicable"] = t.polytope_applicable;
  j["coercivity"] = t.coercivity;
  j["disk_uniqueness"] = opt(t.disk_uniqueness);
  j["necessity_ok"] = t.necessity_ok;
  j["open_gap"] = t.open_gap ? Json::array({t.open_gap->first, t.open_gap->second}) : Json(nullptr);
  if (pretty) {
    Json p;
    for (const char* k : {"sphere_uniqueness", "polytope_level", "coercivity", "disk_uniqueness"})
      if (j[k].is_number()) p[k] = format_double(j[k].get<double>() / kPi) + " pi";
    j["pi_multiples"] = p;
  }
  return j;
}

namespace detail {

// Finds x with f(x) = target for an increasing f, starting from a point
// known to lie below the root and stepping up by `step`.
template <class F>
double increasing_root(F&& f, double target, double lo, double step, const char* what) {
  double flo = f(lo) - target;
  require(flo <= 0.0, Errc::NoConvergence, std::string(what) + ": starting point above the target");
  double hi = lo + step, fhi = f(hi) - target;
  for (int k = 0; fhi < 0.0; ++k) {
    require(k < 200, Errc::NoConvergence, std::string(what) + ": target not bracketed");
    lo = hi;
    flo = fhi;
    hi += step;
    fhi = f(hi) - target;
  }
  if (flo == 0.0) return lo;
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve([&](double x) { return f(x) - target; }, lo, hi, flo, fhi,
                                                        boost::math::tools::eps_tolerance<double>(50), iters);
  require(iters < 200, Errc::NoConvergence, std::string(what) + ": root finder did not converge");
  return 0.5 * (a + b);
}

}  // namespace detail

struct ShootOptions {
  std::size_t nodes = 2000;
  OdeOptions ode{1e-30, 1e-11, 1e-9, 1e-6};
};

struct DiskShot {
  RadialProfile profile;
  double alpha = 0.0;
  double center = 0.0;
  double lambda = 0.0;
  /// Mass of |x|^{-2 alpha} e^v over the unit disk.
  double rho = 0.0;
};

namespace detail {
inline RadialOde disk_ode(double alpha) {
  const double e = 2.0 * (1.0 - alpha);
  RadialOde ode;
  ode.source = [e](double r) { return std::pow(r, e); };
  ode.exponent = e;
  return ode;
}
}  // namespace detail

/// v'' + v'/r + r^{-2 alpha} e^v = 0 on the unit disk from the center value
/// v0, with lambda read off v0 = 2 ln(lambda (1 - alpha)).
inline DiskShot shoot_disk_center(double alpha, double v0, const ShootOptions& opt = {}) {
  require(alpha > 0.0 && alpha < 1.0, Errc::InvalidArgument, "disk shooting needs alpha in (0,1)");
  const auto sol = solve_radial(detail::disk_ode(alpha), v0, 1.0, {}, opt.nodes, opt.ode);
  DiskShot s;
  s.profile = sol.profile();
  s.alpha = alpha;
  s.center = v0;
  s.lambda = std::exp(0.5 * v0) / (1.0 - alpha);
  s.rho = sol.mass.back();
  return s;
}

inline DiskShot shoot_disk_lambda(double alpha, double lambda, const ShootOptions& opt = {}) {
  require(lambda > 0.0, Errc::InvalidArgument, "lambda must be > 0");
  return shoot_disk_center(alpha, 2.0 * std::log(lambda * (1.0 - alpha)), opt);
}

/// Shoots for the center value whose unit-disk mass is rho.
inline DiskShot shoot_disk_rho(double alpha, double rho, const ShootOptions& opt = {}) {
  require(alpha > 0.0 && alpha < 1.0, Errc::InvalidArgument, "disk shooting needs alpha in (0,1)");
  require(rho > 0.0 && rho < full_mass(alpha), Errc::RhoOutOfRange, "rho outside (0, 8 pi (1 - alpha))");
  const double a = 1.0 - alpha;
  const auto mass = [&](double v0) { return shoot_disk_center(alpha, v0, opt).rho; };
  // The mass never exceeds pi/a e^{v0}, so this start lies below the root.
  const double v0 = detail::increasing_root(mass, rho, std::log(rho * a / kPi), 1.0, "shoot_disk");
  return shoot_disk_center(alpha, v0, opt);
}

struct SphereShot {
  RadialProfile profile;
  double rho = 0.0;
  double center = 0.0;
  double l = 0.0;
  double r_max = 0.0;
  /// Mass over B_{r_max} plus the tail bound.
  double mass = 0.0;
  double tail = 0.0;
};

inline constexpr double kSphereShootRadius = 1e4;

namespace detail {
inline RadialOde sphere_ode(double l) {
  RadialOde ode;
  ode.source = [l](double r) { return r * r * std::pow(1.0 + r * r, -l); };
  ode.exponent = 2.0;
  return ode;
}
}  // namespace detail

/// u'' + u'/r + (1 + r^2)^{-l} e^u = 0 with l = (8 pi - rho)/4 pi. Beyond
/// r_max, u decays at least like -p ln r with p = M(r_max)/2 pi, which bounds
/// the remaining mass by 2 pi r^{2-2l} e^{u} / (p + 2l - 2) at r_max.
inline SphereShot shoot_sphere(double rho, double u0, const ShootOptions& opt = {},
                               double r_max = kSphereShootRadius) {
  require(rho > 0.0 && rho < kEightPi, Errc::RhoOutOfRange, "sphere shooting needs 0 < rho < 8 pi");
  require(std::isfinite(u0), Errc::InvalidArgument, "u0 must be finite");
  const double l = (kEightPi - rho) / (4.0 * kPi);
  const auto sol = solve_radial(detail::sphere_ode(l), u0, r_max, {}, opt.nodes, opt.ode);
  SphereShot s;
  s.profile = sol.profile();
  s.rho = rho;
  s.center = u0;
  s.l = l;
  s.r_max = r_max;
  const double M = sol.mass.back();
  const double p = -sol.slope.back();
  const double decay = p + 2.0 * l - 2.0;
  require(decay > 0.0, Errc::NoConvergence, "solution has not reached its decay regime at r_max");
  s.tail = 2.0 * kPi * std::pow(r_max, 2.0 - 2.0 * l) * std::exp(sol.psi.back()) / decay;
  s.mass = M + s.tail;
  return s;
}

/// Center value of the radial sphere solution, ln(rho / pi), the pullback of
/// the constant solution.
inline double sphere_exact_center(double rho) { return std::log(rho / kPi); }

/// ln(rho/pi) - (rho / 4 pi) ln(1 + r^2).
inline double sphere_exact_solution(double rho, double r) {
  return sphere_exact_center(rho) - rho / (4.0 * kPi) * std::log1p(r * r);
}

/// Center value whose total mass is rho, located by shooting alone.
inline double sphere_center_for_mass(double rho, const ShootOptions& opt = {}) {
  require(rho > 0.0 && rho < kEightPi, Errc::RhoOutOfRange, "sphere shooting needs 0 < rho < 8 pi");
  const auto mass = [&](double u0) { return shoot_sphere(rho, u0, opt).mass; };
  double lo = 0.0;
  for (int k = 0; mass(lo) > rho; ++k) {
    require(k < 40, Errc::NoConvergence, "no center value with mass below rho");
    lo -= 1.0;
  }
  return detail::increasing_root(mass, rho, lo, 1.0, "sphere_center_for_mass");
}

struct UniquenessScan {
  double rho = 0.0;
  double center = 0.0;
  std::vector<double> u0;
  std::vector<double> mass;
  std::vector<double> tail;
  bool strictly_monotone = false;
  /// Sign changes of mass - rho along the scan.
  std::size_t crossings = 0;
};

/// Samples the mass map u0 -> M(u0) on [center - half_width, center +
/// half_width]. Samples are computed in parallel into fixed slots, so the
/// result does not depend on the thread count.
inline UniquenessScan uniqueness_scan(double rho, std::size_t samples = 50, double half_width = 4.0,
                                      std::optional<double> center = {}, const ShootOptions& opt = {},
                                      unsigned threads = 0) {
  require(samples >= 2, Errc::InvalidArgument, "need at least two samples");
  UniquenessScan s;
  s.rho = rho;
  s.center = center.value_or(sphere_exact_center(rho));
  s.u0 = linspace(s.center - half_width, s.center + half_width, samples);
  s.mass.assign(samples, 0.0);
  s.tail.assign(samples, 0.0);
  parallel_for(samples, [&](std::size_t i) {
    const auto shot = shoot_sphere(rho, s.u0[i], opt);
    s.mass[i] = shot.mass;
    s.tail[i] = shot.tail;
  }, threads);
  s.strictly_monotone = strictly_increasing(s.mass);
  for (std::size_t i = 1; i < samples; ++i)
    if ((s.mass[i - 1] - rho) * (s.mass[i] - rho) < 0.0 || s.mass[i] == rho) ++s.crossings;
  return s;
}

}  // namespace sphcov
