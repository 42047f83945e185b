#pragma once

// Alexandrov-Bol deficits for radial profiles, the mass alternative and its
// exterior counterpart, the boundary comparison, the covering deficit and a
// seeded generator of admissible profiles.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sphcov/bubble.hpp"
#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/ode.hpp"
#include "sphcov/profile.hpp"
#include "sphcov/quadrature.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

inline constexpr double kMarginRelTol = 1e-7;
inline constexpr double kBolRelTol = 1e-8;

/// Per-node certificate of the differential inequality. For interior
/// profiles margin(r) = M(B_r) - 2 pi r |psi'(r)|; for exterior ones
/// margin(r) = 8 pi (1-alpha) - M(R^2 \ B_r) - 2 pi r |psi'(r)|.
struct AdmissibleProfile {
  RadialProfile profile;
  double alpha = 0.0;
  bool exterior = false;
  std::vector<double> margin;
  std::vector<double> tolerance;
  /// Exterior only: mass beyond the last node, estimated from the end slope.
  double tail = 0.0;

  bool admissible() const {
    for (std::size_t i = 0; i < margin.size(); ++i)
      if (margin[i] < -tolerance[i]) return false;
    return true;
  }
  double worst_margin() const {
    double w = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < margin.size(); ++i) w = std::min(w, margin[i] + tolerance[i]);
    return w;
  }
};

namespace detail {

inline std::vector<double> log_nodes(const RadialProfile& p) {
  std::vector<double> t(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) t[i] = std::log(p.nodes[i]);
  return t;
}

inline RadialProfile truncate(const RadialProfile& psi, double R) {
  require(R > psi.inner() && R <= psi.outer() * (1.0 + 1e-12), Errc::InvalidArgument,
          "R must lie inside the sampled range");
  if (R >= psi.outer()) return psi;
  RadialProfile out;
  out.center_value = psi.center_value;
  for (std::size_t i = 0; i < psi.size() && psi.nodes[i] < R; ++i) {
    out.nodes.push_back(psi.nodes[i]);
    out.values.push_back(psi.values[i]);
  }
  out.nodes.push_back(R);
  out.values.push_back(psi(R));
  out.validate();
  return out;
}

// Mass beyond the last node of an exterior profile, from the power law
// e^psi ~ r^{-p} with p the secant slope of the last two nodes in ln r.
inline double exterior_tail(const RadialProfile& psi, double alpha) {
  const std::size_t n = psi.size();
  const double two_a = 2.0 * (1.0 - alpha);
  const double p = -(psi.values[n - 1] - psi.values[n - 2]) / std::log(psi.nodes[n - 1] / psi.nodes[n - 2]);
  if (!(p > two_a)) return std::numeric_limits<double>::infinity();
  return 2.0 * kPi * std::exp(psi.values[n - 1]) * std::pow(psi.nodes[n - 1], two_a) / (p - two_a);
}

}  // namespace detail

/// Interior certificate on (0, R]. psi must be strictly decreasing on its
/// nodes (zero tolerance).
inline AdmissibleProfile check_differential_inequality(const RadialProfile& psi_in, double alpha, double R) {
  require(alpha >= 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in [0,1)");
  require(psi_in.strictly_decreasing(), Errc::NotDecreasing, "profile is not strictly decreasing");
  const auto psi = detail::truncate(psi_in, R);
  require(psi.size() >= 5, Errc::InvalidArgument, "need at least 5 nodes");
  const ProfileMass pm(psi, alpha);
  const auto d = nodal_derivative(detail::log_nodes(psi), psi.values);
  AdmissibleProfile out{psi, alpha, false, {}, {}, 0.0};
  out.margin.resize(psi.size());
  out.tolerance.resize(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double m = pm.nodal()[i];
    const double flux = 2.0 * kPi * std::abs(d.value[i]);
    out.margin[i] = m - flux;
    out.tolerance[i] = kMarginRelTol * m + 2.0 * kPi * d.roundoff[i];
  }
  return out;
}

/// Exterior certificate on [R, outer] with the tail beyond the last node.
inline AdmissibleProfile check_exterior_inequality(const RadialProfile& psi, double alpha) {
  require(alpha >= 0.0 && alpha < 1.0, Errc::InvalidArgument, "alpha must lie in [0,1)");
  require(psi.size() >= 5, Errc::InvalidArgument, "need at least 5 nodes");
  for (std::size_t i = 1; i < psi.size(); ++i)
    require(psi.values[i] < psi.values[i - 1], Errc::NotDecreasing, "profile is not strictly decreasing");
  RadialProfile shell(psi.nodes, psi.values);
  const ProfileMass pm(shell, alpha);
  const double tail = detail::exterior_tail(psi, alpha);
  const double total = full_mass(alpha);
  require(std::isfinite(tail), Errc::MassTooLarge, "exterior profile decays too slowly for finite mass");
  const auto d = nodal_derivative(detail::log_nodes(psi), psi.values);
  AdmissibleProfile out{psi, alpha, true, {}, {}, tail};
  out.margin.resize(psi.size());
  out.tolerance.resize(psi.size());
  const double full = pm.total();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double outside = full - pm.nodal()[i] + tail;
    const double flux = 2.0 * kPi * std::abs(d.value[i]);
    out.margin[i] = total - outside - flux;
    out.tolerance[i] = kMarginRelTol * total + 2.0 * kPi * d.roundoff[i] + tail;
  }
  return out;
}

inline double profile_mass(const RadialProfile& psi, double alpha) { return ProfileMass(psi, alpha).total(); }

/// Exterior mass of a profile on [R, outer] including the estimated tail.
inline double exterior_profile_mass(const AdmissibleProfile& ext) {
  RadialProfile shell(ext.profile.nodes, ext.profile.values);
  const ProfileMass pm(shell, ext.alpha);
  return pm.shell() + ext.tail;
}

namespace detail {
inline Json bol_inputs(const AdmissibleProfile& p, double R) {
  return Json{{"alpha", p.alpha}, {"R", R}, {"nodes", p.profile.size()}};
}

inline void warn_alpha(DeficitReport& r, double alpha) {
  if (alpha > kAlphaWarnThreshold) r.note("alpha > 0.95: weighted quadrature is ill-conditioned");
}
}  // namespace detail

/// (int_{dB_R} (|x|^{-2a} e^psi)^{1/2})^2 - 1/2 M (8 pi (1-a) - M), contracted >= 0.
inline DeficitReport bol_deficit_interior(const AdmissibleProfile& p, std::optional<double> R_opt = {}) {
  require(!p.exterior, Errc::InvalidArgument, "interior deficit needs an interior profile");
  require(p.admissible(), Errc::NotAdmissible,
          "differential inequality violated (worst margin " + format_double(p.worst_margin()) + ")");
  const double R = R_opt.value_or(p.profile.outer());
  const auto psi = detail::truncate(p.profile, R);
  const double M = profile_mass(psi, p.alpha);
  const double root = 2.0 * kPi * std::pow(R, 1.0 - p.alpha) * std::exp(0.5 * psi(R));
  const double lhs = root * root;
  const double rhs = 0.5 * M * (full_mass(p.alpha) - M);
  auto in = detail::bol_inputs(p, R);
  in["mass"] = M;
  auto r = DeficitReport::make("bol_deficit_interior", in, lhs, rhs, kBolRelTol * std::max(lhs, std::abs(rhs)),
                               Sense::AtLeast);
  detail::warn_alpha(r, p.alpha);
  return r;
}

/// Reversed inequality outside B_R, contracted <= 0.
inline DeficitReport bol_deficit_exterior(const AdmissibleProfile& p) {
  require(p.exterior, Errc::InvalidArgument, "exterior deficit needs an exterior profile");
  const double total = full_mass(p.alpha);
  const double M = exterior_profile_mass(p);
  require(M < total, Errc::MassTooLarge, "exterior mass reaches 8 pi (1 - alpha)");
  require(p.admissible(), Errc::NotAdmissible,
          "exterior differential inequality violated (worst margin " + format_double(p.worst_margin()) + ")");
  const double R = p.profile.inner();
  const double root = 2.0 * kPi * std::pow(R, 1.0 - p.alpha) * std::exp(0.5 * p.profile.values.front());
  const double lhs = root * root;
  const double rhs = 0.5 * M * (total - M);
  const double tol = kBolRelTol * std::max(lhs, std::abs(rhs)) + std::abs(0.5 * total - M) * p.tail;
  auto in = detail::bol_inputs(p, R);
  in["mass"] = M;
  in["tail"] = p.tail;
  auto r = DeficitReport::make("bol_deficit_exterior", in, lhs, rhs, tol, Sense::AtMost);
  detail::warn_alpha(r, p.alpha);
  return r;
}

enum class MassBranch { Low, High, Between };

inline const char* to_string(MassBranch b) {
  switch (b) {
    case MassBranch::Low: return "low";
    case MassBranch::High: return "high";
    case MassBranch::Between: return "between";
  }
  return "between";
}

struct MassAlternative {
  MassBranch branch;
  double mass;
  double m1;
  double m2;
  double lambda2;
};

inline void require_boundary_match(double psi_R, const BubbleParams& b, double R, double tol) {
  const double u = eval_bubble(b, R);
  require(std::abs(psi_R - u) <= tol * std::max(1.0, std::abs(u)), Errc::BoundaryMismatch,
          "psi(R) = " + format_double(psi_R) + " but U(R) = " + format_double(u));
}

/// Either M <= m1 or M >= m2 for admissible psi with psi(R) = U_{lambda1}(R).
inline MassAlternative mass_alternative(const AdmissibleProfile& p, double lambda1, double R,
                                        double boundary_tol = 1e-9) {
  require(!p.exterior && p.admissible(), Errc::NotAdmissible, "mass_alternative needs an admissible profile");
  const BubbleParams b1(lambda1, p.alpha);
  const auto psi = detail::truncate(p.profile, R);
  require_boundary_match(psi(R), b1, R, boundary_tol);
  const double l2 = pair_lambda(lambda1, p.alpha, R);
  const double ma = bubble_mass(b1, R);
  const double mb = bubble_mass(BubbleParams(l2, p.alpha), R);
  const double m1 = std::min(ma, mb), m2 = std::max(ma, mb);
  const double M = profile_mass(psi, p.alpha);
  const double tol = kBolRelTol * full_mass(p.alpha);
  MassBranch br = MassBranch::Between;
  if (M <= m1 + tol) br = MassBranch::Low;
  else if (M >= m2 - tol) br = MassBranch::High;
  return {br, M, m1, m2, l2};
}

struct SandwichReports {
  DeficitReport lower;  // M_ext(psi) - M_ext(U_{lambda2}) >= 0
  DeficitReport upper;  // M_ext(U_{lambda1}) - M_ext(psi) >= 0
  bool ok() const { return lower.ok() && upper.ok(); }
};

inline SandwichReports exterior_sandwich(const AdmissibleProfile& p, double lambda1, double lambda2,
                                         double boundary_tol = 1e-9) {
  require(p.exterior, Errc::InvalidArgument, "exterior_sandwich needs an exterior profile");
  require(lambda2 > lambda1, Errc::InvalidArgument, "need lambda2 > lambda1");
  const double R = p.profile.inner();
  const BubbleParams b1(lambda1, p.alpha), b2(lambda2, p.alpha);
  require_boundary_match(p.profile.values.front(), b1, R, boundary_tol);
  require_boundary_match(p.profile.values.front(), b2, R, boundary_tol);
  const double total = full_mass(p.alpha);
  const double M = exterior_profile_mass(p);
  require(M < total, Errc::MassTooLarge, "exterior mass reaches 8 pi (1 - alpha)");
  require(p.admissible(), Errc::NotAdmissible, "exterior differential inequality violated");
  const double e1 = bubble_exterior_mass(b1, R), e2 = bubble_exterior_mass(b2, R);
  const double tol = kBolRelTol * total + p.tail;
  Json in{{"alpha", p.alpha}, {"R", R}, {"lambda1", lambda1}, {"lambda2", lambda2}, {"mass", M}};
  return {DeficitReport::make("exterior_sandwich_lower", in, M, e2, tol, Sense::AtLeast),
          DeficitReport::make("exterior_sandwich_upper", in, e1, M, tol, Sense::AtLeast)};
}

/// psi(R) - U_lambda(R) >= 0 when psi and U_lambda carry the same mass on B_R.
inline DeficitReport boundary_comparison(const AdmissibleProfile& p, double lambda, double R,
                                         double mass_tol = 1e-8) {
  require(!p.exterior && p.admissible(), Errc::NotAdmissible, "boundary_comparison needs an admissible profile");
  const BubbleParams b(lambda, p.alpha);
  const auto psi = detail::truncate(p.profile, R);
  const double M = profile_mass(psi, p.alpha);
  const double m = bubble_mass(b, R);
  require(std::abs(M - m) <= mass_tol * full_mass(p.alpha), Errc::MassMismatch,
          "mass " + format_double(M) + " differs from the bubble mass " + format_double(m));
  require(m < full_mass(p.alpha), Errc::MassMismatch, "mass must stay below 8 pi (1 - alpha)");
  const double u = eval_bubble(b, R);
  Json in{{"alpha", p.alpha}, {"R", R}, {"lambda", lambda}, {"mass", M}};
  return DeficitReport::make("boundary_comparison", in, psi(R), u, 1e-8 * std::max(1.0, std::abs(u)),
                             Sense::AtLeast);
}

/// mass1 + mass2 - 8 pi (1 - alpha(omega)), contracted >= 0.
inline DeficitReport covering_deficit(double mass1, double mass2, double alpha_omega, double rel_tol = 1e-10) {
  require(mass1 >= 0.0 && mass2 >= 0.0, Errc::InvalidArgument, "masses must be nonnegative");
  require(alpha_omega >= 0.0 && alpha_omega < 1.0, Errc::InvalidArgument, "alpha(omega) must lie in [0,1)");
  const double rhs = full_mass(alpha_omega);
  Json in{{"mass1", mass1}, {"mass2", mass2}, {"alpha_omega", alpha_omega}};
  return DeficitReport::make("covering_deficit", in, mass1 + mass2, rhs, rel_tol * rhs, Sense::AtLeast);
}

/// rho - 8 pi (1 - alpha(Omega)). Two distinct solutions with the same total
/// mass can exist only when this is strictly positive.
inline DeficitReport same_mass_bound(double rho, double alpha_Omega, double rel_tol = 1e-12) {
  require(rho > 0.0, Errc::InvalidArgument, "rho must be > 0");
  require(alpha_Omega >= 0.0 && alpha_Omega < 1.0, Errc::InvalidArgument, "alpha(Omega) must lie in [0,1)");
  const double rhs = full_mass(alpha_Omega);
  Json in{{"rho", rho}, {"alpha_Omega", alpha_Omega}};
  return DeficitReport::make("same_mass_bound", in, rho, rhs, rel_tol * rhs, Sense::AtLeast);
}

enum class GeneratorMode { Shift, SubunitCurvature };

inline const char* to_string(GeneratorMode m) {
  return m == GeneratorMode::Shift ? "shift" : "subunit-curvature";
}

struct GeneratorOptions {
  double R = 1.0;
  std::size_t nodes = 2000;
  std::optional<double> lambda;
  /// Shift mode: the constant c (interior U + c, exterior U - c).
  std::optional<double> shift;
  /// Curvature mode: weights of {1, 1/(1+r^2), e^{-r^2}}.
  std::optional<std::array<double, 3>> k_weights;
};

struct GeneratedProfile {
  AdmissibleProfile admissible;
  GeneratorMode mode;
  double lambda;
  double shift = 0.0;
  std::array<double, 3> k_weights{1.0, 0.0, 0.0};

  /// True when the generator reproduces a bubble exactly (c = 0 or K = 1).
  bool is_bubble() const {
    return mode == GeneratorMode::Shift ? shift == 0.0 : (k_weights[1] == 0.0 && k_weights[2] == 0.0);
  }
};

namespace detail {

inline std::array<double, 3> draw_k_weights(Rng& rng) {
  const double w0 = 0.8 * rng.uniform();
  const double v = rng.uniform();
  return {w0, (1.0 - w0) * v, (1.0 - w0) * (1.0 - v)};
}

inline double k_combination(const std::array<double, 3>& w, double r) {
  const double r2 = r * r;
  return w[0] + w[1] / (1.0 + r2) + w[2] * std::exp(-r2);
}

/// Grid from where the bubble first separates from its center value up to R.
inline std::vector<double> bubble_grid(const BubbleParams& b, double R, std::size_t n) {
  const double r0 = std::min(resolvable_radius(b, 1e-8), 1e-3 * R);
  return geomspace(r0, R, n);
}

inline RadialOde curvature_ode(double alpha, std::function<double(double)> K) {
  const double e = 2.0 * (1.0 - alpha);
  RadialOde ode;
  ode.source = [K, e](double r) { return K(r) * std::pow(r, e); };
  ode.mass_weight = [e](double r) { return std::pow(r, e); };
  ode.exponent = e;
  ode.c0 = K(0.0);
  ode.cm = 1.0;
  return ode;
}

}  // namespace detail

/// Seeded admissible interior profile on (0, R]. Shift mode gives U + c with
/// c >= 0; curvature mode solves psi'' + psi'/r + K r^{-2a} e^psi = 0 with
/// K = clip(w0 + w1/(1+r^2) + w2 e^{-r^2}, 0.1, 1), starting from the center
/// value of U_lambda. The certificate is recomputed from the samples.
inline GeneratedProfile generate_test_profile(std::uint64_t seed, double alpha, GeneratorMode mode,
                                              const GeneratorOptions& opt = {}) {
  Rng rng(seed);
  const double lambda = opt.lambda.value_or(rng.log_uniform(0.5, 4.0));
  const BubbleParams b(lambda, alpha);
  GeneratedProfile g{{}, mode, lambda};
  RadialProfile psi;
  if (mode == GeneratorMode::Shift) {
    g.shift = opt.shift.value_or(rng.uniform(0.02, 1.0));
    require(g.shift >= 0.0, Errc::InvalidArgument, "shift must be >= 0");
    psi = sample_bubble(b, detail::bubble_grid(b, opt.R, opt.nodes)).shifted(g.shift);
  } else {
    g.k_weights = opt.k_weights.value_or(detail::draw_k_weights(rng));
    const auto w = g.k_weights;
    auto K = [w](double r) { return std::clamp(detail::k_combination(w, r), 0.1, 1.0); };
    OdeOptions oo;
    oo.start_q = 1e-8;
    oo.r_start_max = 1e-3 * opt.R;
    const auto sol = solve_radial(detail::curvature_ode(alpha, K), eval_bubble(b, 0.0), opt.R, {}, opt.nodes, oo);
    psi = sol.profile();
  }
  g.admissible = check_differential_inequality(psi, alpha, opt.R);
  require(g.admissible.admissible(), Errc::GeneratorFailed,
          "generated profile violates its certificate (worst " + format_double(g.admissible.worst_margin()) + ")");
  return g;
}

/// Seeded admissible exterior profile on [R, r_max]. Shift mode gives
/// U - c with c >= 0. Curvature mode takes the Kelvin transform
/// psi(R^2/r) - 4(1-a) ln(r/R) of an interior solution with curvature
/// K = clip(1/(w0 + w1/(1+r^2) + w2 e^{-r^2}), 1, 10) >= 1, which is what the
/// exterior inequality needs. r_max is chosen so the mass beyond it is below
/// 1e-11 of the family scale.
inline GeneratedProfile generate_exterior_profile(std::uint64_t seed, double alpha, GeneratorMode mode,
                                                  const GeneratorOptions& opt = {}) {
  Rng rng(seed);
  const double lambda = opt.lambda.value_or(rng.log_uniform(0.5, 4.0));
  const BubbleParams b(lambda, alpha);
  const double a = 1.0 - alpha;
  const double R = opt.R;
  const double total = full_mass(alpha);
  const double tail_target = 1e-11 * total;
  GeneratedProfile g{{}, mode, lambda};
  RadialProfile psi;
  if (mode == GeneratorMode::Shift) {
    g.shift = opt.shift.value_or(rng.uniform(0.02, 1.0));
    require(g.shift >= 0.0, Errc::InvalidArgument, "shift must be >= 0");
    // Exterior bubble mass beyond r is 8 total / (8 + lambda^2 r^{2a}).
    const double x = 8.0 * total / tail_target;
    const double r_max = std::max(std::pow(x / (lambda * lambda), 1.0 / (2.0 * a)), 10.0 * R);
    auto grid = geomspace(R, r_max, opt.nodes);
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = eval_bubble(b, grid[i]) - g.shift;
    psi = RadialProfile(std::move(grid), std::move(v));
  } else {
    // Increasing curvature can push the interior flux past 8 pi a, which makes
    // the Kelvin image non-monotone; such draws are replaced.
    const double psi0 = eval_bubble(b, 0.0);
    // Interior mass inside rho is about pi/a e^{psi0} rho^{2a}; the Kelvin
    // image of B_rho is the exterior tail.
    const double rho_min = std::min(std::pow(tail_target * a / (kPi * std::exp(psi0)), 1.0 / (2.0 * a)), 1e-3 * R);
    OdeOptions oo;
    oo.start_q = 1e-30;
    oo.r_start_max = rho_min;
    for (int attempt = 0;; ++attempt) {
      g.k_weights = opt.k_weights.value_or(detail::draw_k_weights(rng));
      const auto w = g.k_weights;
      auto K = [w](double r) { return std::clamp(1.0 / detail::k_combination(w, r), 1.0, 10.0); };
      const auto sol = solve_radial(detail::curvature_ode(alpha, K), psi0, R, geomspace(rho_min, R, opt.nodes),
                                    opt.nodes, oo);
      const std::size_t n = sol.r.size();
      std::vector<double> nodes(n), values(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = n - 1 - i;
        nodes[i] = R * R / sol.r[k];
        values[i] = sol.psi[k] - 4.0 * a * std::log(nodes[i] / R);
      }
      nodes.front() = R;
      values.front() = sol.psi.back();
      psi = RadialProfile(std::move(nodes), std::move(values));
      bool decreasing = true;
      for (std::size_t i = 1; i < n; ++i) decreasing = decreasing && psi.values[i] < psi.values[i - 1];
      if (decreasing) break;
      require(!opt.k_weights && attempt < 32, Errc::GeneratorFailed,
              "Kelvin image of the curvature solution is not decreasing");
    }
  }
  g.admissible = check_exterior_inequality(psi, alpha);
  require(g.admissible.admissible(), Errc::GeneratorFailed,
          "generated exterior profile violates its certificate (worst " +
              format_double(g.admissible.worst_margin()) + ")");
  return g;
}

}  // namespace sphcov
