#pragma once

// Equimeasurable rearrangement of phi with respect to a source measure on its
// domain and a centered radial target measure: phi* is radial, nonincreasing,
// and the target mass of {phi* > t} equals the source mass of {phi > t}.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/profile.hpp"
#include "sphcov/quadrature.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

/// Uniform n x n cells over [x0,x1] x [y0,y1]; cell (i,j) has index j*n + i.
/// phi is constant on each cell and `mass` is the source mass of the cell.
struct CellGrid2D {
  double x0 = -1.0, y0 = -1.0, x1 = 1.0, y1 = 1.0;
  std::size_t n = 0;
  std::vector<double> phi;
  std::vector<double> mass;

  CellGrid2D() = default;
  CellGrid2D(double x0_, double y0_, double x1_, double y1_, std::size_t n_)
      : x0(x0_), y0(y0_), x1(x1_), y1(y1_), n(n_), phi(n_ * n_, 0.0), mass(n_ * n_, 0.0) {
    validate();
  }

  void validate() const {
    require(n >= 2, Errc::InvalidArgument, "CellGrid2D needs n >= 2");
    require(x1 > x0 && y1 > y0, Errc::InvalidArgument, "CellGrid2D box is empty");
    require(phi.size() == n * n && mass.size() == n * n, Errc::InvalidArgument, "CellGrid2D size mismatch");
    for (double m : mass) require(m >= 0.0, Errc::NegativeDensity, "CellGrid2D masses must be >= 0");
  }

  double dx() const { return (x1 - x0) / static_cast<double>(n); }
  double dy() const { return (y1 - y0) / static_cast<double>(n); }
  double cx(std::size_t i) const { return x0 + (static_cast<double>(i) + 0.5) * dx(); }
  double cy(std::size_t j) const { return y0 + (static_cast<double>(j) + 0.5) * dy(); }
  std::size_t index(std::size_t i, std::size_t j) const { return j * n + i; }
  double total_mass() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

  /// Cells sampled from phi(x,y) at their centers, with Lebesgue cell masses.
  template <class F>
  static CellGrid2D sample(F&& f, std::size_t n, double x0 = -1.0, double y0 = -1.0, double x1 = 1.0,
                           double y1 = 1.0) {
    CellGrid2D g(x0, y0, x1, y1, n);
    const double area = g.dx() * g.dy();
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        g.phi[g.index(i, j)] = f(g.cx(i), g.cy(j));
        g.mass[g.index(i, j)] = area;
      }
    return g;
  }
};

inline void write_cells_csv(std::ostream& os, const CellGrid2D& g) {
  os << "i,j,phi,mass\n";
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i)
      os << i << ',' << j << ',' << format_double(g.phi[g.index(i, j)]) << ','
         << format_double(g.mass[g.index(i, j)]) << '\n';
}

/// Reads the cell CSV; the box is taken as [-1,1]^2 unless given.
inline CellGrid2D read_cells_csv(std::istream& is, double x0 = -1.0, double y0 = -1.0, double x1 = 1.0,
                                 double y1 = 1.0) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), Errc::Io, "empty cell CSV");
  const auto header = detail::split_csv_line(line);
  require(header == std::vector<std::string>{"i", "j", "phi", "mass"}, Errc::Io,
          "cell CSV header must be 'i,j,phi,mass'");
  std::map<std::pair<long, long>, std::pair<double, double>> cells;
  long n_max = -1;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto c = detail::split_csv_line(line);
    require(c.size() == 4, Errc::Io, "line " + std::to_string(line_no) + ": expected 4 fields");
    const double fi = detail::parse_double(c[0], line_no), fj = detail::parse_double(c[1], line_no);
    const long i = std::lround(fi), j = std::lround(fj);
    require(i >= 0 && j >= 0 && static_cast<double>(i) == fi && static_cast<double>(j) == fj, Errc::Io,
            "line " + std::to_string(line_no) + ": bad cell index");
    const bool fresh =
        cells.emplace(std::pair{i, j}, std::pair{detail::parse_double(c[2], line_no), detail::parse_double(c[3], line_no)})
            .second;
    require(fresh, Errc::Io, "line " + std::to_string(line_no) + ": duplicate cell");
    n_max = std::max({n_max, i, j});
  }
  const auto n = static_cast<std::size_t>(n_max + 1);
  require(n >= 2 && cells.size() == n * n, Errc::Io, "cell CSV must list every cell of an n x n grid");
  CellGrid2D g(x0, y0, x1, y1, n);
  for (const auto& [ij, v] : cells) {
    const auto k = g.index(static_cast<std::size_t>(ij.first), static_cast<std::size_t>(ij.second));
    g.phi[k] = v.first;
    g.mass[k] = v.second;
  }
  try {
    g.validate();
  } catch (const Error& e) {
    throw Error(Errc::Io, e.what());
  }
  return g;
}

/// t -> source mass of {phi > t} for a radial phi on B_{outer}, with phi
/// linear between nodes (and between the center and the first node).
class RadialDistribution {
 public:
  RadialDistribution(RadialProfile phi, RadialMeasure source) : phi_(std::move(phi)), source_(std::move(source)) {
    r_.push_back(0.0);
    v_.push_back(phi_.center_value.value_or(phi_.values.front()));
    r_.insert(r_.end(), phi_.nodes.begin(), phi_.nodes.end());
    v_.insert(v_.end(), phi_.values.begin(), phi_.values.end());
    m_.resize(r_.size());
    for (std::size_t k = 0; k < r_.size(); ++k) m_[k] = source_.mass(r_[k]);
  }

  double operator()(double t) const {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < r_.size(); ++k) {
      const double a = v_[k], b = v_[k + 1];
      if (a > t && b > t) {
        acc += m_[k + 1] - m_[k];
      } else if (a > t || b > t) {
        const double rc = r_[k] + (t - a) / (b - a) * (r_[k + 1] - r_[k]);
        acc += a > t ? source_.mass(rc) - m_[k] : m_[k + 1] - source_.mass(rc);
      }
    }
    return acc;
  }

  double total() const { return m_.back(); }
  double max_value() const { return *std::max_element(v_.begin(), v_.end()); }
  double min_value() const { return *std::min_element(v_.begin(), v_.end()); }
  /// Distinct sampled values, descending.
  std::vector<double> levels() const {
    auto l = v_;
    std::sort(l.begin(), l.end(), std::greater<>());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    return l;
  }
  bool monotone() const {
    for (std::size_t k = 1; k < v_.size(); ++k)
      if (v_[k] > v_[k - 1]) return false;
    return true;
  }

 private:
  RadialProfile phi_;
  RadialMeasure source_;
  std::vector<double> r_, v_, m_;
};

/// t -> source mass of {phi > t} on a cell grid. Cells are ordered by
/// decreasing phi with ties broken by cell index.
class CellDistribution {
 public:
  explicit CellDistribution(const CellGrid2D& g) : order_(g.n * g.n) {
    g.validate();
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return g.phi[a] > g.phi[b]; });
    value_.resize(order_.size());
    cum_.resize(order_.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < order_.size(); ++k) {
      value_[k] = g.phi[order_[k]];
      acc += g.mass[order_[k]];
      cum_[k] = acc;
    }
  }

  double operator()(double t) const {
    // value_ is descending; count cells with value > t.
    const auto it = std::partition_point(value_.begin(), value_.end(), [t](double v) { return v > t; });
    const auto k = static_cast<std::size_t>(it - value_.begin());
    return k == 0 ? 0.0 : cum_[k - 1];
  }

  double total() const { return cum_.back(); }
  double max_value() const { return value_.front(); }
  double min_value() const { return value_.back(); }
  const std::vector<std::size_t>& order() const { return order_; }
  const std::vector<double>& sorted_values() const { return value_; }
  const std::vector<double>& cumulative() const { return cum_; }

 private:
  std::vector<std::size_t> order_;
  std::vector<double> value_, cum_;
};

inline RadialDistribution distribution_function(const RadialProfile& phi, const RadialMeasure& source) {
  return RadialDistribution(phi, source);
}

inline CellDistribution distribution_function(const CellGrid2D& g) { return CellDistribution(g); }

namespace detail {
inline void check_target(double source_total, const RadialMeasure& target) {
  require(source_total < target.total() || (std::isinf(target.total())), Errc::TargetExhausted,
          "source mass " + format_double(source_total) + " exceeds the target's total mass " +
              format_double(target.total()));
}
}  // namespace detail

/// Radial case: phi* takes the value t at the radius whose target ball mass
/// equals the source mass of {phi > t}. Nodes are the transported sample
/// levels; the outermost node carries min phi at the radius of the full
/// source mass.
inline RadialProfile rearrange_two_measures(const RadialProfile& phi, const RadialMeasure& source,
                                            const RadialMeasure& target) {
  const RadialDistribution dist(phi, source);
  detail::check_target(dist.total(), target);
  const auto levels = dist.levels();
  std::vector<double> nodes, values;
  for (std::size_t k = 1; k < levels.size(); ++k) {
    const double m = dist(levels[k]);
    if (m <= 0.0) continue;
    const double rho = target.radius_for_mass(m);
    if (!nodes.empty() && rho <= nodes.back()) continue;
    nodes.push_back(rho);
    values.push_back(levels[k]);
  }
  const double outer = target.radius_for_mass(dist.total());
  if (nodes.empty() || outer > nodes.back() * (1.0 + 1e-12)) {
    nodes.push_back(outer);
    values.push_back(levels.back());
  }
  return RadialProfile(std::move(nodes), std::move(values), levels.front());
}

/// Cell case: phi* is a radial step function; node k is the outer radius of
/// the shell receiving sorted cell k and carries that cell's value.
inline RadialProfile rearrange_two_measures(const CellGrid2D& g, const RadialMeasure& target) {
  const CellDistribution dist(g);
  detail::check_target(dist.total(), target);
  std::vector<double> nodes, values;
  const auto& cum = dist.cumulative();
  const auto& val = dist.sorted_values();
  for (std::size_t k = 0; k < cum.size(); ++k) {
    if (cum[k] <= 0.0) continue;
    const double rho = target.radius_for_mass(cum[k]);
    if (!nodes.empty() && rho <= nodes.back()) continue;
    nodes.push_back(rho);
    values.push_back(val[k]);
  }
  require(!nodes.empty(), Errc::InvalidArgument, "cell grid carries no mass");
  return RadialProfile(std::move(nodes), std::move(values), dist.max_value());
}

/// Target mass of {phi* > t}. With `step`, phi* equals values[k] on
/// (nodes[k-1], nodes[k]]; otherwise it is linear between nodes.
inline double superlevel_target_mass(const RadialProfile& star, const RadialMeasure& target, double t, bool step) {
  if (step) {
    double r = 0.0;
    if (star.center_value && *star.center_value <= t) return 0.0;
    for (std::size_t k = 0; k < star.size(); ++k) {
      if (star.values[k] > t) r = star.nodes[k];
      else break;
    }
    return target.mass(r);
  }
  return RadialDistribution(star, target)(t);
}

/// Levels used by the checks: 200 uniform levels over [min, max], plus every
/// distinct sampled value when there are fewer than 200 of them.
inline std::vector<double> check_levels(double lo, double hi, const std::vector<double>& distinct) {
  std::vector<double> t = hi > lo ? linspace(lo, hi, 200) : std::vector<double>{lo};
  if (distinct.size() < 200) t.insert(t.end(), distinct.begin(), distinct.end());
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

/// max_t |target({phi* > t}) - source({phi > t})| / source total over the
/// sampled values of phi, where phi* is exact by construction. On a uniform
/// grid of 200 levels in between, both sides are nonincreasing and agree at
/// the neighbouring sampled values, so the gap may not exceed the largest
/// target shell of phi*; exceeding it fails the report.
inline DeficitReport equimeasurability_report(const RadialProfile& phi, const RadialProfile& star,
                                              const RadialMeasure& source, const RadialMeasure& target,
                                              double tol = 1e-9) {
  const RadialDistribution dist(phi, source);
  const RadialDistribution sdist(star, target);
  const double total = dist.total();
  const double norm = total > 0.0 ? total : 1.0;
  double worst = 0.0;
  for (double t : dist.levels()) worst = std::max(worst, std::abs(sdist(t) - dist(t)));
  double between = 0.0;
  for (double t : check_levels(dist.min_value(), dist.max_value(), {}))
    between = std::max(between, std::abs(sdist(t) - dist(t)));
  double shell = target.mass(star.inner());
  for (std::size_t k = 1; k < star.size(); ++k)
    shell = std::max(shell, target.annulus(star.nodes[k - 1], star.nodes[k]));
  Json in{{"kind", "radial"},
          {"nodes", phi.size()},
          {"source_total", total},
          {"between_levels", between / norm},
          {"shell_bound", shell / norm}};
  auto r = DeficitReport::make("equimeasurability", in, worst / norm, 0.0, tol, Sense::Zero);
  if (between > shell + tol * norm) {
    r.verdict = Verdict::Fail;
    r.note("mismatch between sampled levels exceeds the largest target shell of phi*");
  }
  return r;
}

/// Share of the source mass lying in cells that touch the boundary of a
/// superlevel set, maximized over levels: the resolution of a cell-union
/// approximation of {phi > t}. It decays like 1/n for sets with rectifiable
/// boundary.
inline double cell_boundary_share(const CellGrid2D& g, const std::vector<double>& levels) {
  const double total = g.total_mass();
  if (total <= 0.0) return 0.0;
  // A cell straddles t when its value and some 4-neighbour's value lie on
  // opposite sides; record for each cell the [lo, hi) range of such t.
  std::vector<double> lo(g.phi.size()), hi(g.phi.size());
  for (std::size_t j = 0; j < g.n; ++j)
    for (std::size_t i = 0; i < g.n; ++i) {
      const std::size_t k = g.index(i, j);
      double mn = g.phi[k], mx = g.phi[k];
      auto take = [&](std::size_t kk) {
        mn = std::min(mn, g.phi[kk]);
        mx = std::max(mx, g.phi[kk]);
      };
      if (i > 0) take(k - 1);
      if (i + 1 < g.n) take(k + 1);
      if (j > 0) take(k - g.n);
      if (j + 1 < g.n) take(k + g.n);
      lo[k] = mn;
      hi[k] = mx;
    }
  double worst = 0.0;
  for (double t : levels) {
    double acc = 0.0;
    for (std::size_t k = 0; k < g.phi.size(); ++k)
      if (lo[k] <= t && t < hi[k]) acc += g.mass[k];
    worst = std::max(worst, acc);
  }
  return worst / total;
}

/// Cell case. The measured mismatch is between the step profile phi* and the
/// cell distribution; the reported tolerance is the cell resolution bound.
inline DeficitReport equimeasurability_report(const CellGrid2D& g, const RadialProfile& star,
                                              const RadialMeasure& target, double floor_tol = 1e-9) {
  const CellDistribution dist(g);
  const double total = dist.total();
  auto distinct = dist.sorted_values();
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const auto levels = check_levels(dist.min_value(), dist.max_value(), distinct);
  double worst = 0.0;
  for (double t : levels)
    worst = std::max(worst, std::abs(superlevel_target_mass(star, target, t, true) - dist(t)));
  const double rel = total > 0.0 ? worst / total : worst;
  const double bound = cell_boundary_share(g, levels);
  Json in{{"kind", "cells"}, {"n", g.n}, {"source_total", total}, {"resolution_bound", bound}};
  auto r = DeficitReport::make("equimeasurability", in, rel, 0.0, std::max(floor_tol, bound), Sense::Zero);
  return r;
}

/// Level-by-level comparison of int_{phi* = t} |grad phi*| with
/// int_{phi = t} |grad phi| for a radial strictly decreasing phi on B_R.
/// deficit = max_t (lhs_t - rhs_t), contracted <= tol; the left side uses
/// phi* as produced by the rearrangement, derivatives by nodal differences.
inline DeficitReport gradient_level_check(const RadialProfile& phi, const RadialMeasure& source,
                                          const RadialMeasure& target, double rel_tol = 1e-6) {
  require(phi.strictly_decreasing(), Errc::NotDecreasing, "gradient_level_check needs strictly decreasing phi");
  const auto star = rearrange_two_measures(phi, source, target);
  const auto dphi = nodal_derivative(phi.nodes, phi.values);
  const auto dstar = nodal_derivative(star.nodes, star.values);
  double worst = -std::numeric_limits<double>::infinity();
  double at_lhs = 0.0, at_rhs = 0.0, scale = 0.0;
  // phi* nodes are the transported phi nodes; match them by level.
  std::size_t k = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    while (k < star.size() && star.values[k] > phi.values[i]) ++k;
    if (k >= star.size() || star.values[k] != phi.values[i]) continue;
    const double rhs = 2.0 * kPi * phi.nodes[i] * std::abs(dphi.value[i]);
    const double lhs = 2.0 * kPi * star.nodes[k] * std::abs(dstar.value[k]);
    scale = std::max(scale, rhs);
    if (lhs - rhs > worst) {
      worst = lhs - rhs;
      at_lhs = lhs;
      at_rhs = rhs;
    }
  }
  require(std::isfinite(worst), Errc::InvalidArgument, "no common levels between phi and phi*");
  Json in{{"nodes", phi.size()}, {"R", phi.outer()}};
  auto r = DeficitReport::make("gradient_level_check", in, at_lhs, at_rhs, rel_tol * scale, Sense::AtMost);
  r.deficit = worst;
  r.verdict = DeficitReport::classify(worst, r.tolerance, Sense::AtMost);
  return r;
}

}  // namespace sphcov
