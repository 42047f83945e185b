#pragma once

// Onsager mean field equation on the sphere, reduced to the plane with
// weight h = e^H,
//
//   h(x) = 8 (1 + |x|^2)^{-2 + beta/4pi} e^{gamma J(x)},   J = 2 / (1 + |x|^2),
//
// and the quantities that decide when solutions are forced to be symmetric.
// Throughout b = beta / 8 pi.

#include <cmath>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/quadrature.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

struct OnsagerParams {
  double beta;
  double gamma;

  OnsagerParams(double beta_, double gamma_) : beta(beta_), gamma(gamma_) {
    require(beta > kEightPi + 1e-9 && beta <= 2.0 * kEightPi, Errc::InvalidArgument,
            "beta must lie in (8 pi, 16 pi]");
    require(gamma >= 0.0 && std::isfinite(gamma), Errc::InvalidArgument, "gamma must be >= 0");
  }

  static OnsagerParams from_b(double b, double gamma) { return {b * kEightPi, gamma}; }

  double b() const { return beta / kEightPi; }
};

inline double onsager_weight(double r, const OnsagerParams& p) {
  require(r >= 0.0, Errc::InvalidArgument, "r must be >= 0");
  const double q = 1.0 + r * r;
  return 8.0 * std::pow(q, -2.0 + p.beta / (4.0 * kPi)) * std::exp(2.0 * p.gamma / q);
}

/// Delta H = 4 (-2 + beta/4pi) / (1 + r^2)^2 + 8 gamma (r^2 - 1) / (1 + r^2)^3.
inline double laplacian_H(double r, const OnsagerParams& p) {
  require(r >= 0.0, Errc::InvalidArgument, "r must be >= 0");
  const double q = 1.0 + r * r;
  return 4.0 * (-2.0 + p.beta / (4.0 * kPi)) / (q * q) + 8.0 * p.gamma * (r * r - 1.0) / (q * q * q);
}

/// Radial finite-difference Laplacian H'' + H'/r of ln h (2 H'' at r = 0).
inline double laplacian_H_fd(double r, const OnsagerParams& p, double h = 1e-3) {
  const auto H = [&](double s) { return std::log(onsager_weight(std::abs(s), p)); };
  const double d2 = (-H(r - 2 * h) + 16 * H(r - h) - 30 * H(r) + 16 * H(r + h) - H(r + 2 * h)) / (12 * h * h);
  if (r == 0.0) return 2.0 * d2;
  const double d1 = (H(r - 2 * h) - 8 * H(r - h) + 8 * H(r + h) - H(r + 2 * h)) / (12 * h);
  return d2 + d1 / r;
}

/// True when -Delta H is positive near the origin, i.e. gamma > b - 1.
inline bool has_positive_core(const OnsagerParams& p) { return p.gamma > p.b() - 1.0; }

/// Radius of the disk where -Delta H > 0: r^2 = (gamma + 1 - b) / (gamma - 1 + b).
inline double positivity_radius(const OnsagerParams& p) {
  require(has_positive_core(p), Errc::SubharmonicRegime, "gamma <= b - 1: -Delta H <= 0 everywhere");
  const double b = p.b();
  return std::sqrt((p.gamma + 1.0 - b) / (p.gamma - 1.0 + b));
}

struct GammaThreshold {
  /// 3 - b + sqrt(2 (3 - b)(2 - b)).
  double paper_bound;
  /// Larger root of gamma^2 + 2 gamma (b - 3) + (b - 1)^2, (3 - b) + 2 sqrt(2 - b).
  double exact_root;
};

inline GammaThreshold gamma_threshold(double beta) {
  require(beta > kEightPi + 1e-9 && beta <= 2.0 * kEightPi, Errc::InvalidArgument, "beta must lie in (8 pi, 16 pi]");
  const double b = beta / kEightPi;
  const double two_minus_b = std::max(2.0 - b, 0.0);
  return {3.0 - b + std::sqrt(2.0 * (3.0 - b) * two_minus_b), 3.0 - b + 2.0 * std::sqrt(two_minus_b)};
}

/// Upper bound for 8 pi (alpha(omega_1) + alpha(omega_2)) from the disk where
/// -Delta H > 0: 8 pi (gamma + 1 - b)^2 / (4 gamma).
inline double deficit_bound(const OnsagerParams& p) {
  require(has_positive_core(p), Errc::SubharmonicRegime, "gamma <= b - 1: -Delta H <= 0 everywhere");
  const double c = p.gamma + 1.0 - p.b();
  return kEightPi * c * c / (4.0 * p.gamma);
}

/// b + (gamma + 1 - b)^2 / (4 gamma); symmetry is forced when it is <= 2.
inline double contradiction_value(const OnsagerParams& p) {
  require(has_positive_core(p), Errc::SubharmonicRegime, "gamma <= b - 1: -Delta H <= 0 everywhere");
  const double c = p.gamma + 1.0 - p.b();
  return p.b() + c * c / (4.0 * p.gamma);
}

/// -int_{B_r} Delta H in closed form:
/// 8 pi (1 - 1/(1+r^2)) (-(-1 + b + gamma) + gamma (1 + 1/(1+r^2))).
inline double disk_curvature_closed(const OnsagerParams& p, double r) {
  const double s = 1.0 / (1.0 + r * r);
  return kEightPi * (1.0 - s) * (-(-1.0 + p.b() + p.gamma) + p.gamma * (1.0 + s));
}

struct DeficitChain {
  double radius;
  /// -int_{B_r} Delta H by radial quadrature.
  double disk_quadrature;
  /// -int over the upper half of B_r by a Cartesian double integral.
  double half_disk_quadrature;
  double disk_closed;
  double bound;
};

/// The chain bound = -2 int_{B_r^+} Delta H = -int_{B_r} Delta H at the
/// positivity radius, each link evaluated independently.
inline DeficitChain deficit_chain(const OnsagerParams& p, double tol = 1e-12) {
  const double r = positivity_radius(p);
  WeightedRadialDensity d{0.0, [&](double s) { return -laplacian_H(s, p); }, 4.0};
  const double disk = annulus_integral(d, 0.0, r, tol);
  using boost::math::quadrature::gauss_kronrod;
  const auto inner = [&](double x) {
    const double top = std::sqrt(std::max(r * r - x * x, 0.0));
    return gauss_kronrod<double, 15>::integrate([&](double y) { return -laplacian_H(std::hypot(x, y), p); }, 0.0,
                                                top, 10, tol);
  };
  const double half = gauss_kronrod<double, 15>::integrate(inner, -r, r, 10, tol);
  return {r, disk, half, disk_curvature_closed(p, r), deficit_bound(p)};
}

struct RemarkCheck {
  double lhs;  // 3 - b
  double rhs;  // b - 1
  bool holds;
  bool equality;
};

/// The symmetry range 0 <= gamma <= 3 - b + ... contains the subharmonic
/// range gamma <= b - 1, since 3 - b >= b - 1 on (1, 2].
inline RemarkCheck remark_check(double beta) {
  require(beta > kEightPi + 1e-9 && beta <= 2.0 * kEightPi, Errc::InvalidArgument, "beta must lie in (8 pi, 16 pi]");
  const double b = beta / kEightPi;
  return {3.0 - b, b - 1.0, 3.0 - b >= b - 1.0, 3.0 - b == b - 1.0};
}

/// Symmetry holds when -Delta H <= 0 everywhere or the contradiction value
/// does not exceed 2.
inline bool symmetry_forced(const OnsagerParams& p) {
  return !has_positive_core(p) || contradiction_value(p) <= 2.0;
}

inline Json to_json(const OnsagerParams& p, bool pretty = false) {
  const auto g = gamma_threshold(p.beta);
  const bool core = has_positive_core(p);
  Json j;
  j["beta_over_8pi"] = p.b();
  j["gamma"] = p.gamma;
  j["paper_bound"] = g.paper_bound;
  j["exact_root"] = g.exact_root;
  j["positivity_radius"] = core ? Json(positivity_radius(p)) : Json(nullptr);
  j["deficit_bound"] = core ? Json(deficit_bound(p)) : Json(nullptr);
  j["contradiction_value"] = core ? Json(contradiction_value(p)) : Json(nullptr);
  j["symmetry_forced"] = symmetry_forced(p);
  j["regime"] = core ? "positive-core" : "subharmonic";
  if (pretty && core) j["pi_multiples"] = Json{{"deficit_bound", format_double(deficit_bound(p) / kPi) + " pi"}};
  return j;
}

}  // namespace sphcov
