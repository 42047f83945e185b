#pragma once

// Closed-form layer for the singular bubble family
//
//   U_{lambda,alpha}(x) = 2 ln( lambda (1-alpha) / (1 + lambda^2/8 |x|^{2(1-alpha)}) ),
//
// which solves  Delta U + |x|^{-2 alpha} e^U = 0  away from the origin. All
// singular behaviour lives in the weight |x|^{-2 alpha}; U itself is finite
// at r = 0.

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/profile.hpp"

namespace sphcov {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Conditioning of weighted quadrature degrades as 1 - alpha -> 0.
inline constexpr double kAlphaWarnThreshold = 0.95;

struct BubbleParams {
  double lambda;
  double alpha;

  BubbleParams(double lambda_, double alpha_) : lambda(lambda_), alpha(alpha_) {
    require(lambda > 0.0 && std::isfinite(lambda), Errc::InvalidArgument, "lambda must be > 0");
    require(alpha >= 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in [0,1)");
  }

  double cone() const { return 1.0 - alpha; }
  /// lambda^2 / 8, the coefficient of r^{2(1-alpha)} in the denominator.
  double scale() const { return lambda * lambda / 8.0; }
  bool ill_conditioned() const { return alpha > kAlphaWarnThreshold; }
};

/// 8 pi (1 - alpha): the total mass of every bubble over the plane.
inline double full_mass(double alpha) { return kEightPi * (1.0 - alpha); }

inline double eval_bubble(const BubbleParams& p, double r) {
  require(r >= 0.0, Errc::InvalidArgument, "eval_bubble needs r >= 0");
  const double a = p.cone();
  const double q = p.scale() * std::pow(r, 2.0 * a);
  return 2.0 * (std::log(p.lambda * a) - std::log1p(q));
}

/// e^{U(r)}, evaluated without going through the logarithm.
inline double bubble_density(const BubbleParams& p, double r) {
  const double a = p.cone();
  const double q = p.scale() * std::pow(r, 2.0 * a);
  const double num = p.lambda * a / (1.0 + q);
  return num * num;
}

inline double bubble_derivative(const BubbleParams& p, double r) {
  const double a = p.cone();
  const double q = p.scale() * std::pow(r, 2.0 * a);
  return -4.0 * a * q / (r * (1.0 + q));
}

inline double bubble_second_derivative(const BubbleParams& p, double r) {
  const double a = p.cone();
  const double q = p.scale() * std::pow(r, 2.0 * a);
  return -4.0 * a * q * (2.0 * a - 1.0 - q) / (r * r * (1.0 + q) * (1.0 + q));
}

/// Mass of |x|^{-2 alpha} e^{U} over B_R; R may be +infinity.
inline double bubble_mass(const BubbleParams& p, double R) {
  require(R > 0.0, Errc::InvalidArgument, "bubble_mass needs R > 0");
  const double total = full_mass(p.alpha);
  if (std::isinf(R)) return total;
  const double x = p.lambda * p.lambda * std::pow(R, 2.0 * p.cone());
  return total * x / (8.0 + x);
}

/// Mass of the same measure outside B_R.
inline double bubble_exterior_mass(const BubbleParams& p, double R) {
  require(R > 0.0, Errc::InvalidArgument, "bubble_exterior_mass needs R > 0");
  if (std::isinf(R)) return 0.0;
  const double x = p.lambda * p.lambda * std::pow(R, 2.0 * p.cone());
  return full_mass(p.alpha) * 8.0 / (8.0 + x);
}

/// Radius of the centered ball carrying mass m; inverse of bubble_mass.
inline double bubble_mass_radius(const BubbleParams& p, double m) {
  const double total = full_mass(p.alpha);
  require(m >= 0.0 && m < total, Errc::OutOfRange, "mass outside [0, 8 pi (1-alpha))");
  const double x = 8.0 * m / (total - m);
  return std::pow(x / (p.lambda * p.lambda), 1.0 / (2.0 * p.cone()));
}

/// Scale carrying mass rho over B_R (inverse of bubble_mass in lambda).
inline double lambda_for_mass(double rho, double alpha, double R) {
  const double total = full_mass(alpha);
  require(rho > 0.0 && rho < total, Errc::RhoOutOfRange, "rho outside (0, 8 pi (1-alpha))");
  const double x = 8.0 * rho / (total - rho);
  return std::sqrt(x / std::pow(R, 2.0 * (1.0 - alpha)));
}

/// The companion scale lambda_2 with U_{lambda_1}(R) = U_{lambda_2}(R):
/// lambda_1 lambda_2 = 8 / R^{2(1-alpha)}. The map is an involution.
inline double pair_lambda(double lambda1, double alpha, double R) {
  require(lambda1 > 0.0, Errc::InvalidArgument, "lambda1 must be > 0");
  require(alpha >= 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in [0,1)");
  require(R > 0.0, Errc::InvalidArgument, "R must be > 0");
  return 8.0 / (std::pow(R, 2.0 * (1.0 - alpha)) * lambda1);
}

/// Self-paired scale sqrt(8 / R^{2(1-alpha)}).
inline double critical_lambda(double alpha, double R) {
  return std::sqrt(8.0 / std::pow(R, 2.0 * (1.0 - alpha)));
}

/// Both bubble scales whose value at R equals `boundary_value`, smaller first.
/// Empty when the value exceeds the family's maximum at R.
struct LambdaPair {
  double lambda1;
  double lambda2;
};

inline std::optional<LambdaPair> match_boundary_value(double boundary_value, double alpha, double R) {
  const double a = 1.0 - alpha;
  const double y = std::exp(0.5 * boundary_value) / a;  // lambda / (1 + lambda^2 X / 8)
  const double X = std::pow(R, 2.0 * a);
  const double disc = 1.0 - y * y * X / 2.0;
  if (!(disc >= 0.0)) return std::nullopt;
  const double sq = std::sqrt(disc);
  // Stable roots of (yX/8) l^2 - l + y = 0.
  const double l1 = 2.0 * y / (1.0 + sq);
  const double l2 = pair_lambda(l1, alpha, R);
  return LambdaPair{std::min(l1, l2), std::max(l1, l2)};
}

/// (int_{dB_R} (|x|^{-2 alpha} e^{U})^{1/2} d sigma).
inline double boundary_root_integral(const BubbleParams& p, double R) {
  require(R > 0.0, Errc::InvalidArgument, "R must be > 0");
  const double a = p.cone();
  const double x = p.scale() * std::pow(R, 2.0 * a);
  return 2.0 * kPi * std::pow(R, a) * p.lambda * a / (1.0 + x);
}

/// Pointwise terms of psi'' + psi'/r + r^{-2 alpha} e^psi.
struct ResidualTerms {
  double second;
  double first;
  double source;

  double sum() const { return second + first + source; }
  double scale() const { return std::abs(second) + std::abs(first) + std::abs(source); }
};

inline ResidualTerms bubble_residual_terms(const BubbleParams& p, double r) {
  return {bubble_second_derivative(p, r), bubble_derivative(p, r) / r,
          std::pow(r, -2.0 * p.alpha) * bubble_density(p, r)};
}

/// Max over the grid of |U'' + U'/r + r^{-2a} e^U| relative to the local size
/// of the three terms, using the analytic derivatives.
inline double bubble_residual(const BubbleParams& p, std::span<const double> grid) {
  double worst = 0.0;
  for (double r : grid) {
    require(r > 0.0, Errc::InvalidArgument, "residual grid must be positive");
    const auto t = bubble_residual_terms(p, r);
    const double s = t.scale();
    if (s > 0.0) worst = std::max(worst, std::abs(t.sum()) / s);
  }
  return worst;
}

/// Finite-difference version on a geometric grid. With s = ln r the equation
/// reads U_ss + r^{2(1-alpha)} e^U = 0; U_ss uses 4th-order central
/// differences and the returned value is the max of |U_ss + r^{2-2a} e^U| over
/// interior nodes.
inline double bubble_residual_fd(const BubbleParams& p, double r_min, double r_max, std::size_t n) {
  require(n >= 5, Errc::InvalidArgument, "need at least 5 nodes");
  const auto grid = geomspace(r_min, r_max, n);
  const double h = std::log(r_max / r_min) / static_cast<double>(n - 1);
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = eval_bubble(p, grid[i]);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double uss = (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) / (12.0 * h * h);
    const double src = std::pow(grid[i], 2.0 * p.cone()) * bubble_density(p, grid[i]);
    worst = std::max(worst, std::abs(uss + src));
  }
  return worst;
}

/// U_{lambda,alpha} sampled on `grid`, with its center value attached.
inline RadialProfile sample_bubble(const BubbleParams& p, std::vector<double> grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = eval_bubble(p, grid[i]);
  return RadialProfile(std::move(grid), std::move(v), eval_bubble(p, 0.0));
}

/// Smallest radius at which the profile of U separates from its center value
/// by a relative amount `q`, so that sampled values stay strictly decreasing.
inline double resolvable_radius(const BubbleParams& p, double q = 1e-9) {
  return std::pow(q / p.scale(), 1.0 / (2.0 * p.cone()));
}

}  // namespace sphcov
