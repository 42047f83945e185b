#pragma once

// Integration of radial densities against |x|^{-2 alpha} dx.
//
// With s = r^{2(1-alpha)} the planar measure becomes
//   2 pi d(r) r^{1-2 alpha} dr = (pi / (1-alpha)) d ds,
// so the weight singularity at the origin disappears entirely.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "sphcov/bubble.hpp"
#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/profile.hpp"

namespace sphcov {

inline constexpr unsigned kQuadratureDepth = 14;

struct WeightedRadialDensity {
  double alpha = 0.0;
  std::function<double(double)> density;
  /// d(r) = O(r^{-decay}) as r -> infinity; needed only for R = infinity.
  double decay = std::numeric_limits<double>::quiet_NaN();

  double cone() const { return 1.0 - alpha; }
  double tail_decay() const { return std::isnan(decay) ? 4.0 * cone() : decay; }
};

inline WeightedRadialDensity constant_density(double value, double alpha) {
  return {alpha, [value](double) { return value; }};
}

inline WeightedRadialDensity bubble_density_of(const BubbleParams& p) {
  return {p.alpha, [p](double r) { return bubble_density(p, r); }};
}

struct QuadratureResult {
  double value;
  double error;
};

namespace detail {

template <class F>
QuadratureResult gk(F&& f, double a, double b, double tol, unsigned depth = kQuadratureDepth) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0, l1 = 0.0;
  const double v = gauss_kronrod<double, 15>::integrate(f, a, b, depth, tol, &err, &l1);
  return {v, err};
}

// int_{s0}^{s1} g(s) ds for 0 <= s0 < s1 < inf, evaluated in ln s so that
// densities varying on widely separated scales are resolved uniformly.
template <class G>
QuadratureResult integrate_s(G&& g, double s0, double s1, double tol) {
  QuadratureResult out{0.0, 0.0};
  double lo = s0;
  if (s0 == 0.0) {
    lo = std::min(s1, 1.0) * 1e-18;
    // The core is negligible; the adaptive estimate is unreliable on so short
    // an interval, so a fixed rule is compared with the midpoint rule instead.
    const double core = boost::math::quadrature::gauss<double, 7>::integrate(g, 0.0, lo);
    out.value += core;
    out.error += std::abs(core - lo * g(0.5 * lo));
  }
  const auto body = gk([&](double u) {
    const double s = std::exp(u);
    return g(s) * s;
  }, std::log(lo), std::log(s1), tol);
  out.value += body.value;
  out.error += body.error;
  return out;
}

}  // namespace detail

/// 2 pi int_{r0}^{r1} d(r) r^{1-2 alpha} dr with its error estimate; r1 may be
/// infinite, in which case the tail beyond a cutoff is bounded from the decay
/// rate and added to the error.
inline QuadratureResult annulus_integral_detailed(const WeightedRadialDensity& w, double r0, double r1,
                                                  double tol = 1e-12) {
  require(w.alpha >= 0.0 && w.alpha < 1.0, Errc::InvalidArgument, "alpha must lie in [0,1)");
  require(r0 >= 0.0 && r1 > r0, Errc::InvalidArgument, "annulus_integral needs 0 <= r0 < r1");
  require(tol > 0.0, Errc::InvalidArgument, "tol must be > 0");
  const double a = w.cone();
  const double e = 1.0 / (2.0 * a);
  bool negative = false;
  auto g = [&](double s) {
    const double d = w.density(std::pow(s, e));
    if (d < 0.0) negative = true;
    return d;
  };
  const double s0 = std::pow(r0, 2.0 * a);
  QuadratureResult res{0.0, 0.0};
  if (std::isinf(r1)) {
    const double q = w.tail_decay() / (2.0 * a);
    require(q > 1.0, Errc::NonConvergent, "density decays too slowly for an infinite annulus");
    double s_cut = std::max(1.0, 2.0 * s0);
    double tail = 0.0;
    for (int k = 0;; ++k) {
      res = detail::integrate_s(g, s0, s_cut, tol);
      tail = g(s_cut) * s_cut / (q - 1.0);
      if (tail <= 1e-3 * tol * std::abs(res.value) || tail == 0.0) break;
      require(k < 60, Errc::NonConvergent, "tail bound did not fall below tolerance");
      s_cut *= 16.0;
    }
    res.value += tail;
    res.error += tail;
  } else {
    res = detail::integrate_s(g, s0, std::pow(r1, 2.0 * a), tol);
  }
  require(!negative, Errc::NegativeDensity, "density sampled negative");
  const double scale = kPi / a;
  res.value *= scale;
  res.error *= scale;
  require(std::isfinite(res.value), Errc::NonConvergent, "quadrature produced a non-finite value");
  require(res.error <= tol * std::max(std::abs(res.value), 1e-300) || res.error < 1e-300,
          Errc::NonConvergent,
          "error estimate " + format_double(res.error) + " exceeds tolerance after subdivision budget");
  return res;
}

inline double annulus_integral(const WeightedRadialDensity& w, double r0, double r1, double tol = 1e-12) {
  return annulus_integral_detailed(w, r0, r1, tol).value;
}

/// int_{dB_R} (|x|^{-2 alpha} d)^{1/2} d sigma = 2 pi R^{1-alpha} sqrt(d(R)).
inline double circle_root_integral(const WeightedRadialDensity& w, double R) {
  require(R > 0.0, Errc::InvalidArgument, "circle_root_integral needs R > 0");
  const double d = w.density(R);
  require(d >= 0.0, Errc::NegativeDensity, "density negative on the circle");
  return 2.0 * kPi * std::pow(R, w.cone()) * std::sqrt(d);
}

struct CumulativeMass {
  double alpha = 0.0;
  std::vector<double> radii;
  std::vector<double> masses;

  double max_mass() const { return masses.empty() ? 0.0 : masses.back(); }
};

inline CumulativeMass cumulative_mass_table(const WeightedRadialDensity& w, const std::vector<double>& radii,
                                            double tol = 1e-12) {
  require(!radii.empty() && radii.front() > 0.0 && strictly_increasing(radii), Errc::InvalidArgument,
          "radii must be positive and strictly increasing");
  CumulativeMass c{w.alpha, radii, std::vector<double>(radii.size())};
  double acc = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    acc += annulus_integral(w, prev, radii[i], tol);
    c.masses[i] = acc;
    prev = radii[i];
  }
  return c;
}

/// Radius enclosing mass m, by monotone cubic interpolation of s = r^{2(1-alpha)}
/// against mass. Plateaus resolve to the smallest radius.
inline double invert_mass(const CumulativeMass& c, double m) {
  require(!c.radii.empty() && c.radii.size() == c.masses.size(), Errc::InvalidArgument, "empty mass table");
  require(m >= 0.0, Errc::OutOfRange, "mass must be nonnegative");
  const double top = c.max_mass();
  require(m <= top * (1.0 + 1e-12) + 1e-300, Errc::OutOfRange, "mass exceeds the table's maximum");
  if (m == 0.0) return 0.0;
  const double a = 1.0 - c.alpha;
  std::vector<double> mk{0.0}, sk{0.0};
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    if (c.masses[i] > mk.back()) {
      mk.push_back(c.masses[i]);
      sk.push_back(std::pow(c.radii[i], 2.0 * a));
    }
  }
  if (m >= mk.back()) return std::pow(sk.back(), 1.0 / (2.0 * a));
  const auto it = std::lower_bound(mk.begin(), mk.end(), m);
  if (*it == m) return std::pow(sk[static_cast<std::size_t>(it - mk.begin())], 1.0 / (2.0 * a));
  const MonotoneCubic inv(std::move(mk), std::move(sk));
  return std::pow(inv(m), 1.0 / (2.0 * a));
}

/// Cumulative mass of |x|^{-2 alpha} e^{psi} dx for a sampled profile psi,
/// integrated node interval by node interval in ln r where the interpolant
/// is smooth.
class ProfileMass {
 public:
  ProfileMass(const RadialProfile& psi, double alpha, double tol = 1e-10)
      : psi_(psi), alpha_(alpha), tol_(tol), cum_(psi.size()) {
    require(alpha >= 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in [0,1)");
    cum_[0] = core_mass(psi_.inner());
    for (std::size_t i = 0; i + 1 < psi_.size(); ++i)
      cum_[i + 1] = cum_[i] + segment_mass(i, psi_.nodes[i], psi_.nodes[i + 1]);
  }

  double alpha() const { return alpha_; }
  const RadialProfile& profile() const { return psi_; }
  const std::vector<double>& nodal() const { return cum_; }

  /// Mass of B_r for 0 <= r <= outer node.
  double mass(double r) const {
    if (r <= 0.0) return 0.0;
    if (r <= psi_.inner()) return core_mass(r);
    if (r >= psi_.outer()) return cum_.back();
    const auto it = std::upper_bound(psi_.nodes.begin(), psi_.nodes.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - psi_.nodes.begin()) - 1;
    if (r == psi_.nodes[i]) return cum_[i];
    return cum_[i] + segment_mass(i, psi_.nodes[i], r);
  }

  double total() const { return cum_.back(); }

  /// Mass between the first and last node, the exterior-profile convention.
  double shell() const { return cum_.back() - cum_.front(); }

  double radius_for_mass(double m) const {
    require(m >= 0.0 && m <= total() * (1.0 + 1e-12), Errc::OutOfRange, "mass outside the profile range");
    if (m == 0.0) return 0.0;
    if (m >= total()) return psi_.outer();
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), m);
    const std::size_t i = static_cast<std::size_t>(it - cum_.begin());
    if (cum_[i] == m) return psi_.nodes[i];
    const double lo = i == 0 ? 0.0 : psi_.nodes[i - 1];
    const double hi = psi_.nodes[i];
    return solve_radius([&](double r) { return mass(r) - m; }, lo, hi);
  }

  static double solve_radius(const std::function<double(double)>& f, double lo, double hi) {
    boost::uintmax_t iters = 200;
    const auto tol = boost::math::tools::eps_tolerance<double>(52);
    const double flo = f(lo), fhi = f(hi);
    if (flo >= 0.0) return lo;
    if (fhi <= 0.0) return hi;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    return 0.5 * (a + b);
  }

 private:
  double core_mass(double r) const {
    const double a = 1.0 - alpha_;
    if (!psi_.center_value) return std::exp(psi_.values.front()) * kPi * std::pow(r, 2.0 * a) / a;
    const double e = 1.0 / (2.0 * a);
    const double s1 = std::pow(r, 2.0 * a);
    const auto res = detail::gk([&](double s) { return std::exp(psi_(std::pow(s, e))); }, 0.0, s1, tol_, 10);
    return kPi / a * res.value;
  }

  double segment_mass(std::size_t i, double r0, double r1) const {
    const auto seg = psi_.segment(i);
    const double two_a = 2.0 * (1.0 - alpha_);
    const auto res = detail::gk([&](double t) { return std::exp(seg.at_log(t) + two_a * t); }, std::log(r0),
                                std::log(r1), tol_, 8);
    return 2.0 * kPi * res.value;
  }

  RadialProfile psi_;
  double alpha_;
  double tol_;
  std::vector<double> cum_;
};

/// A centered radial measure |x|^{-2 alpha} d(|x|) dx with its ball masses
/// and their inverse.
class RadialMeasure {
 public:
  static RadialMeasure bubble(const BubbleParams& p) {
    RadialMeasure m;
    m.alpha_ = p.alpha;
    m.total_ = full_mass(p.alpha);
    m.density_ = [p](double r) { return bubble_density(p, r); };
    m.mass_ = [p](double r) { return r <= 0.0 ? 0.0 : bubble_mass(p, r); };
    m.radius_ = [p](double mass) { return bubble_mass_radius(p, mass); };
    return m;
  }

  static RadialMeasure lebesgue() {
    RadialMeasure m;
    m.alpha_ = 0.0;
    m.total_ = std::numeric_limits<double>::infinity();
    m.density_ = [](double) { return 1.0; };
    m.mass_ = [](double r) { return kPi * r * r; };
    m.radius_ = [](double mass) { return std::sqrt(mass / kPi); };
    return m;
  }

  /// e^{psi} |x|^{-2 alpha} dx for a sampled profile, restricted to B_{outer}.
  static RadialMeasure profile(const RadialProfile& psi, double alpha) {
    auto pm = std::make_shared<ProfileMass>(psi, alpha);
    RadialMeasure m;
    m.bounded_ = true;
    m.alpha_ = alpha;
    m.total_ = pm->total();
    m.density_ = [pm](double r) { return std::exp(pm->profile()(r)); };
    m.mass_ = [pm](double r) { return pm->mass(r); };
    m.radius_ = [pm](double mass) { return pm->radius_for_mass(mass); };
    return m;
  }

  /// General density on B_{r_max}, tabulated on `radii` and refined by
  /// direct integration between table nodes.
  static RadialMeasure weighted(const WeightedRadialDensity& w, const std::vector<double>& radii) {
    auto table = std::make_shared<CumulativeMass>(cumulative_mass_table(w, radii));
    RadialMeasure m;
    m.bounded_ = true;
    m.alpha_ = w.alpha;
    m.total_ = table->max_mass();
    m.density_ = w.density;
    m.mass_ = [table, w](double r) {
      if (r <= 0.0) return 0.0;
      const auto& rs = table->radii;
      if (r >= rs.back()) return table->masses.back();
      const auto it = std::upper_bound(rs.begin(), rs.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - rs.begin());
      const double base = i == 0 ? 0.0 : table->masses[i - 1];
      const double from = i == 0 ? 0.0 : rs[i - 1];
      return r > from ? base + annulus_integral(w, from, r) : base;
    };
    m.radius_ = [table, mass = m.mass_](double target) {
      require(target >= 0.0 && target <= table->max_mass() * (1.0 + 1e-12), Errc::OutOfRange,
              "mass outside the table range");
      if (target == 0.0) return 0.0;
      const auto& ms = table->masses;
      const auto it = std::lower_bound(ms.begin(), ms.end(), target);
      if (it == ms.end()) return table->radii.back();
      const std::size_t i = static_cast<std::size_t>(it - ms.begin());
      if (ms[i] == target) return table->radii[i];
      const double lo = i == 0 ? 0.0 : table->radii[i - 1];
      return ProfileMass::solve_radius([&](double r) { return mass(r) - target; }, lo, table->radii[i]);
    };
    return m;
  }

  double alpha() const { return alpha_; }
  double total() const { return total_; }
  double density(double r) const { return density_(r); }
  double mass(double r) const { return mass_(r); }
  double annulus(double r0, double r1) const { return mass(r1) - mass(r0); }

  double radius_for_mass(double m) const {
    require(m >= 0.0, Errc::OutOfRange, "mass must be nonnegative");
    if (m == 0.0) return 0.0;
    if (bounded_)
      require(m <= total_ * (1.0 + 1e-12), Errc::TargetExhausted, "requested mass exceeds the measure's total");
    else
      require(m < total_, Errc::TargetExhausted, "requested mass reaches the measure's total");
    return radius_(m);
  }

 private:
  bool bounded_ = false;
  double alpha_ = 0.0;
  double total_ = 0.0;
  std::function<double(double)> density_;
  std::function<double(double)> mass_;
  std::function<double(double)> radius_;
};

}  // namespace sphcov
