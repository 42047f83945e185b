#pragma once

// Radial Liouville-type ODEs  psi'' + psi'/r + W(r) e^psi = 0  integrated in
// t = ln r, where they read
//
//   psi_tt = -r^2 W(r) e^psi,      M_t = 2 pi r^2 W_m(r) e^psi,
//
// with M the mass of a (possibly different) weight W_m over B_r. The state
// carries psi - psi(0), so near the origin the relative tolerance controls
// the departure from the center value rather than psi itself.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/profile.hpp"

namespace sphcov {

struct RadialOde {
  /// r^2 W(r).
  std::function<double(double)> source;
  /// r^2 W_m(r); defaults to `source` when empty.
  std::function<double(double)> mass_weight;
  /// source(r) ~ c0 r^e and mass_weight(r) ~ cm r^e as r -> 0.
  double exponent = 2.0;
  double c0 = 1.0;
  double cm = 1.0;
};

struct RadialSolution {
  std::vector<double> r;
  std::vector<double> psi;
  /// r psi'(r).
  std::vector<double> slope;
  std::vector<double> mass;
  double center = 0.0;

  RadialProfile profile() const { return RadialProfile(r, psi, center); }
};

struct OdeOptions {
  double abs_tol = 1e-30;
  double rel_tol = 1e-11;
  /// Relative size of the first correction at the starting radius.
  double start_q = 1e-9;
  /// Upper bound on the starting radius.
  double r_start_max = 1e-6;
};

/// Starting radius where the series correction c0 e^{psi0} r^e is start_q.
inline double series_start_radius(const RadialOde& ode, double psi0, const OdeOptions& opt = {}) {
  const double scale = ode.c0 * std::exp(psi0);
  double r0 = std::pow(opt.start_q / scale, 1.0 / ode.exponent);
  return std::min(r0, opt.r_start_max);
}

/// Integrates from the series start up to r_end and samples the solution at
/// `radii` (ascending, all >= the starting radius, last == r_end). When
/// `radii` is empty, n geometric nodes from the starting radius are used.
inline RadialSolution solve_radial(const RadialOde& ode, double psi0, double r_end, std::vector<double> radii,
                                   std::size_t n = 2000, const OdeOptions& opt = {}) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 3>;
  require(r_end > 0.0 && std::isfinite(psi0), Errc::InvalidArgument, "solve_radial: bad arguments");
  const double r0 = series_start_radius(ode, psi0, opt);
  require(r0 < r_end, Errc::InvalidArgument, "solve_radial: end radius below the series start");
  if (radii.empty()) radii = geomspace(r0, r_end, n);
  require(radii.front() >= r0 && strictly_increasing(radii), Errc::InvalidArgument,
          "solve_radial: output radii must ascend from the series start");

  const auto& msrc = ode.mass_weight ? ode.mass_weight : ode.source;
  const double e = ode.exponent;
  const double ep = std::exp(psi0);
  // Start a little inside the first output node so every node is a genuine
  // integration time.
  const double rs = 0.5 * r0;
  const double q = ode.c0 * ep * std::pow(rs, e);
  const double qm = ode.cm * ep * std::pow(rs, e);
  State y{-q / (e * e), -q / e, 2.0 * kPi * qm / e};

  auto rhs = [&](const State& s, State& d, double t) {
    const double r = std::exp(t);
    const double x = ep * std::exp(s[0]);
    d[0] = s[1];
    d[1] = -ode.source(r) * x;
    d[2] = 2.0 * kPi * msrc(r) * x;
  };

  std::vector<double> times(radii.size() + 1);
  times[0] = std::log(rs);
  for (std::size_t i = 0; i < radii.size(); ++i) times[i + 1] = std::log(radii[i]);

  RadialSolution out;
  out.center = psi0;
  out.r = radii;
  out.psi.reserve(radii.size());
  out.slope.reserve(radii.size());
  out.mass.reserve(radii.size());
  std::size_t seen = 0;
  auto observer = [&](const State& s, double) {
    if (seen++ == 0) return;
    out.psi.push_back(psi0 + s[0]);
    out.slope.push_back(s[1]);
    out.mass.push_back(s[2]);
  };
  auto stepper = odeint::make_dense_output(opt.abs_tol, opt.rel_tol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-3, observer);
  } catch (const std::exception& ex) {
    throw Error(Errc::NoConvergence, std::string("radial integration failed: ") + ex.what());
  }
  require(out.psi.size() == radii.size(), Errc::NoConvergence, "radial integration stopped early");
  for (double v : out.psi) require(std::isfinite(v), Errc::NoConvergence, "radial solution blew up");
  return out;
}

}  // namespace sphcov
