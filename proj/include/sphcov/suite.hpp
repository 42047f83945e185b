#pragma once

// The verification suites behind `verify-all`: one JSON report per suite
// plus a coverage manifest naming the invariant each check exercises.

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphcov/bol.hpp"
#include "sphcov/bubble.hpp"
#include "sphcov/meanfield.hpp"
#include "sphcov/numeric.hpp"
#include "sphcov/onsager.hpp"
#include "sphcov/quadrature.hpp"
#include "sphcov/rearrange.hpp"
#include "sphcov/report.hpp"

namespace sphcov {

struct SuiteConfig {
  std::uint64_t seed = 7;
  std::string out_dir = "reports";
  /// Contract tolerance overrides by suite name.
  std::map<std::string, double> tolerance;
  /// Profiles per alpha and direction in the Bol corpus.
  std::size_t corpus = 500;
  std::size_t nodes = 2000;
  /// "json" or "csv" for the per-suite reports.
  std::string format = "json";
  unsigned threads = 0;

  double tol(const std::string& suite, double fallback) const {
    const auto it = tolerance.find(suite);
    return it == tolerance.end() ? fallback : it->second;
  }
};

struct Check {
  std::string invariant;
  DeficitReport report;
};

struct SuiteReport {
  std::string name;
  std::vector<Check> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.report.ok()) return false;
    return true;
  }

  const DeficitReport* first_failure() const {
    for (const auto& c : checks)
      if (!c.report.ok()) return &c.report;
    return nullptr;
  }
};

inline Json to_json(const SuiteReport& s, std::uint64_t seed) {
  Json checks = Json::array();
  for (const auto& c : s.checks) {
    Json j;
    j["invariant"] = c.invariant;
    j["report"] = to_json(c.report);
    checks.push_back(std::move(j));
  }
  return Json{{"suite", s.name}, {"seed", seed}, {"passed", s.passed()}, {"checks", std::move(checks)}};
}

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class SuiteBuilder {
 public:
  explicit SuiteBuilder(std::string name) { report_.name = std::move(name); }

  /// Runs a check; any library error becomes a failing report.
  template <class F>
  void run(const std::string& invariant, const std::string& op, F&& f) {
    try {
      report_.checks.push_back({invariant, f()});
    } catch (const std::exception& e) {
      auto r = DeficitReport::make(op, Json::object(), kNaN, kNaN, 0.0, Sense::Zero);
      r.verdict = Verdict::Fail;
      r.note(e.what());
      report_.checks.push_back({invariant, std::move(r)});
    }
  }

  SuiteReport take() { return std::move(report_); }

 private:
  SuiteReport report_;
};

/// |err| <= tol.
inline DeficitReport within(std::string op, Json in, double err, double tol) {
  return DeficitReport::make(std::move(op), std::move(in), err, 0.0, tol, Sense::Zero);
}

inline DeficitReport at_least(std::string op, Json in, double value, double bound) {
  return DeficitReport::make(std::move(op), std::move(in), value, bound, 0.0, Sense::AtLeast);
}

inline DeficitReport at_most(std::string op, Json in, double value, double bound) {
  return DeficitReport::make(std::move(op), std::move(in), value, bound, 0.0, Sense::AtMost);
}

inline DeficitReport flag(std::string op, Json in, bool ok) {
  return within(std::move(op), std::move(in), ok ? 0.0 : 1.0, 0.0);
}

inline const std::array<double, 10>& lambda_grid() {
  static const std::array<double, 10> g = [] {
    std::array<double, 10> a{};
    const auto v = geomspace(0.1, 100.0, 10);
    std::copy(v.begin(), v.end(), a.begin());
    return a;
  }();
  return g;
}

}  // namespace detail

inline SuiteReport bubble_suite(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteBuilder b("bubble");
  const std::array<double, 4> alphas{0.0, 0.25, 0.5, 0.9};
  const auto radii = geomspace(1e-6, 10.0, 200);
  b.run("bubble.residual_analytic", "bubble_residual", [&] {
    double worst = 0.0;
    for (double l : lambda_grid())
      for (double a : alphas) worst = std::max(worst, bubble_residual(BubbleParams(l, a), radii));
    return within("bubble_residual", Json{{"grid", "10x4"}}, worst, cfg.tol("bubble", 1e-12));
  });
  b.run("bubble.residual_fd", "bubble_residual_fd", [&] {
    double worst = 0.0;
    for (double l : lambda_grid())
      for (double a : alphas) worst = std::max(worst, bubble_residual_fd(BubbleParams(l, a), 1e-3, 10.0, 4000));
    return within("bubble_residual_fd", Json{{"grid", "10x4"}, {"nodes", 4000}}, worst, 1e-6);
  });
  for (double a : alphas) {
    b.run("bubble.mass_closed_vs_quadrature", "bubble_mass", [&] {
      double worst = 0.0;
      for (double l : lambda_grid())
        for (double R : {0.5, 1.0, 2.0, kInfinity}) {
          const BubbleParams p(l, a);
          worst = std::max(worst, relative_error(annulus_integral(bubble_density_of(p), 0.0, R), bubble_mass(p, R)));
        }
      const double tol = cfg.tol("quadrature", a == 0.0 ? 1e-10 : 1e-6);
      return within("bubble_mass_quadrature", Json{{"alpha", a}}, worst, tol);
    });
  }
  b.run("bubble.mass_monotone", "bubble_mass", [&] {
    std::size_t bad = 0;
    for (double a : alphas)
      for (double R : {0.5, 1.0, 2.0}) {
        double prev = 0.0;
        for (double l : geomspace(1e-2, 1e2, 100)) {
          const double m = bubble_mass(BubbleParams(l, a), R);
          if (!(m > prev && m < full_mass(a))) ++bad;
          prev = m;
        }
      }
    return within("bubble_mass_monotone", Json{{"lambda_points", 100}}, static_cast<double>(bad), 0.0);
  });
  Rng rng(mix_seed(cfg.seed, 11));
  struct Triple {
    double l, a, R;
  };
  std::vector<Triple> triples(120);
  for (auto& t : triples) t = {rng.log_uniform(1e-2, 1e2), rng.uniform(0.0, 0.95), rng.log_uniform(0.1, 10.0)};
  b.run("bubble.pair_mass_sum", "pair_lambda", [&] {
    double worst = 0.0;
    for (const auto& t : triples) {
      const double l2 = pair_lambda(t.l, t.a, t.R);
      const double s = bubble_mass(BubbleParams(t.l, t.a), t.R) + bubble_mass(BubbleParams(l2, t.a), t.R);
      worst = std::max(worst, relative_error(s, full_mass(t.a)));
    }
    return within("pair_mass_sum", Json{{"triples", triples.size()}}, worst, cfg.tol("bubble", 1e-10));
  });
  b.run("bubble.pair_boundary_match", "pair_lambda", [&] {
    double worst = 0.0;
    for (const auto& t : triples) {
      const double u1 = eval_bubble(BubbleParams(t.l, t.a), t.R);
      const double u2 = eval_bubble(BubbleParams(pair_lambda(t.l, t.a, t.R), t.a), t.R);
      worst = std::max(worst, std::abs(u1 - u2) / std::max(1.0, std::abs(u1)));
    }
    return within("pair_boundary_match", Json{{"triples", triples.size()}}, worst, 1e-12);
  });
  b.run("bubble.bol_equality", "boundary_root_integral", [&] {
    double worst = 0.0;
    for (const auto& t : triples) {
      const BubbleParams p(t.l, t.a);
      const double root = boundary_root_integral(p, t.R);
      const double m = bubble_mass(p, t.R);
      worst = std::max(worst, relative_error(root * root, 0.5 * m * (full_mass(t.a) - m)));
    }
    return within("bubble_bol_equality", Json{{"triples", triples.size()}}, worst, 1e-9);
  });
  b.run("bubble.pair_ordering", "pair_lambda", [&] {
    std::size_t bad = 0;
    for (const auto& t : triples) {
      const double l2 = pair_lambda(t.l, t.a, t.R);
      const BubbleParams lo(std::min(t.l, l2), t.a), hi(std::max(t.l, l2), t.a);
      if (lo.lambda == hi.lambda) continue;
      for (double r : geomspace(1e-3 * t.R, 0.99 * t.R, 50))
        if (!(eval_bubble(hi, r) > eval_bubble(lo, r))) ++bad;
    }
    return within("pair_ordering", Json{{"triples", triples.size()}}, static_cast<double>(bad), 0.0);
  });
  return b.take();
}

inline SuiteReport quadrature_suite(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteBuilder b("quadrature");
  // The override tightens the integrator as well as the contracts.
  const double tol = cfg.tol("quadrature", 1e-12);
  for (double a : {0.0, 0.25, 0.5, 0.9}) {
    const BubbleParams p(2.0, a);
    const auto w = bubble_density_of(p);
    b.run("quadrature.round_trip", "invert_mass", [&] {
      const auto radii = geomspace(1e-3, 10.0, 60);
      const auto table = cumulative_mass_table(w, radii, tol);
      double worst = 0.0;
      for (std::size_t i = 0; i < radii.size(); ++i)
        worst = std::max(worst, relative_error(invert_mass(table, table.masses[i]), radii[i]));
      return within("invert_mass_round_trip", Json{{"alpha", a}}, worst, std::max(tol, 1e-9));
    });
    b.run("quadrature.additivity", "annulus_integral", [&] {
      double worst = 0.0;
      for (auto [r1, r2] : {std::pair{0.3, 1.0}, std::pair{1.0, 5.0}, std::pair{0.01, 0.02}}) {
        const double whole = annulus_integral(w, 0.0, r2, tol);
        worst = std::max(worst,
                         relative_error(annulus_integral(w, 0.0, r1, tol) + annulus_integral(w, r1, r2, tol), whole));
      }
      return within("annulus_additivity", Json{{"alpha", a}}, worst, tol);
    });
    b.run("quadrature.exactness", "annulus_integral", [&] {
      // d = r^{2a} (1 + 2 r^2 + 3 r^4): the weighted integral is pi (R^2 + R^4 + R^6).
      WeightedRadialDensity poly{a, [a](double r) {
        const double s = r * r;
        return std::pow(r, 2.0 * a) * (1.0 + 2.0 * s + 3.0 * s * s);
      }};
      double worst = 0.0;
      for (double R : {0.5, 1.0, 1.7}) {
        const double R2 = R * R;
        worst = std::max(worst, relative_error(annulus_integral(poly, 0.0, R, tol), kPi * (R2 + R2 * R2 + R2 * R2 * R2)));
      }
      return within("polynomial_exactness", Json{{"alpha", a}}, worst, tol);
    });
    b.run("quadrature.infinite_radius", "annulus_integral", [&] {
      return within("bubble_total_mass", Json{{"alpha", a}},
                    relative_error(annulus_integral(w, 0.0, kInfinity, tol), full_mass(a)),
                    std::max(tol, 1e-10));
    });
    b.run("quadrature.profile_mass", "ProfileMass", [&] {
      const auto psi = sample_bubble(p, geomspace(resolvable_radius(p), 1.0, cfg.nodes));
      return within("profile_mass", Json{{"alpha", a}}, relative_error(profile_mass(psi, a), bubble_mass(p, 1.0)),
                    std::max(tol, 1e-9));
    });
  }
  return b.take();
}

namespace detail {
// Pyramid 1 - max(|x|,|y|) on [-1,1]^2: {phi > t} is a square of area 4(1-t)^2.
inline double pyramid_mismatch(std::size_t n) {
  const auto g = CellGrid2D::sample([](double x, double y) { return 1.0 - std::max(std::abs(x), std::abs(y)); }, n);
  const auto target = RadialMeasure::lebesgue();
  const auto star = rearrange_two_measures(g, target);
  const double total = g.total_mass();
  double worst = 0.0;
  // Both one-sided limits at every jump of the step profile.
  for (std::size_t k = 0; k < star.size(); ++k) {
    const double t = star.values[k];
    const double exact = 4.0 * (1.0 - t) * (1.0 - t);
    const double below = target.mass(star.nodes[k]);
    const double above = k == 0 ? 0.0 : target.mass(star.nodes[k - 1]);
    worst = std::max({worst, std::abs(below - exact), std::abs(above - exact)});
  }
  return worst / total;
}
}  // namespace detail

inline SuiteReport rearrange_suite(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteBuilder b("rearrange");
  const double tol = cfg.tol("rearrange", 1e-9);
  b.run("rearrange.identity", "rearrange_two_measures", [&] {
    double worst = 0.0;
    for (double a : {0.0, 0.5}) {
      const BubbleParams p(2.0, a);
      const auto phi = sample_bubble(p, geomspace(1e-3, 1.0, 400));
      const auto m = RadialMeasure::bubble(p);
      const auto star = rearrange_two_measures(phi, m, m);
      const double range = phi.max_value() - phi.min_value();
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r = phi.nodes[i];
        if (r <= star.inner() || r >= star.outer()) continue;
        worst = std::max(worst, std::abs(star.linear(r) - phi.values[i]) / range);
      }
    }
    return within("identity_transport", Json{{"nodes", 400}}, worst, tol);
  });
  // A non-monotone phi on the unit disk, Lebesgue source, bubble target.
  const auto wavy = [](double r) { return std::cos(6.0 * r) * std::exp(-r) + 0.3 * r; };
  const auto grid = linspace(1e-3, 1.0, 500);
  std::vector<double> wv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) wv[i] = wavy(grid[i]);
  const RadialProfile phi(grid, wv, wavy(0.0));
  const auto source = RadialMeasure::lebesgue();
  const auto target = RadialMeasure::bubble(BubbleParams(1.0, 0.25));
  b.run("rearrange.monotone", "rearrange_two_measures", [&] {
    const auto star = rearrange_two_measures(phi, source, target);
    return flag("star_nonincreasing", Json{{"nodes", star.size()}}, star.nonincreasing());
  });
  b.run("rearrange.equimeasurable", "equimeasurability_report", [&] {
    const auto star = rearrange_two_measures(phi, source, target);
    return equimeasurability_report(phi, star, source, target, tol);
  });
  b.run("rearrange.mass_conservation", "rearrange_two_measures", [&] {
    const auto star = rearrange_two_measures(phi, source, target);
    return within("mass_conservation", Json::object(), relative_error(target.mass(star.outer()), source.mass(1.0)), tol);
  });
  b.run("rearrange.order_preservation", "rearrange_two_measures", [&] {
    Rng rng(mix_seed(cfg.seed, 31));
    std::size_t bad = 0;
    for (int k = 0; k < 20; ++k) {
      const double amp = rng.uniform(0.01, 0.5), c = rng.uniform(0.0, 1.0), w = rng.uniform(0.05, 0.3);
      std::vector<double> hv(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        hv[i] = wv[i] + amp * std::exp(-(grid[i] - c) * (grid[i] - c) / (w * w));
      const RadialProfile hat(grid, hv, wavy(0.0) + amp * std::exp(-c * c / (w * w)));
      const auto s1 = rearrange_two_measures(phi, source, target);
      const auto s2 = rearrange_two_measures(hat, source, target);
      // Compare superlevel radii: phi* <= hat* iff {phi* > t} sits inside {hat* > t}.
      const RadialDistribution d1(phi, source), d2(hat, source);
      for (double t : linspace(d1.min_value(), d1.max_value(), 200))
        if (d1(t) > d2(t) * (1.0 + 1e-12)) ++bad;
      for (double r : linspace(0.0, std::min(s1.outer(), s2.outer()), 200))
        if (s1.linear(r) > s2.linear(r) + 1e-9) ++bad;
    }
    return within("order_preservation", Json{{"pairs", 20}}, static_cast<double>(bad), 0.0);
  });
  b.run("rearrange.schwarz_first_order", "rearrange_two_measures", [&] {
    std::vector<double> mism;
    bool below = true;
    for (std::size_t n : {32, 64, 128}) {
      mism.push_back(pyramid_mismatch(n));
      below = below && mism.back() < 2.0 / static_cast<double>(n);
    }
    const double r1 = mism[0] / mism[1], r2 = mism[1] / mism[2];
    const bool ok = below && r1 >= 1.5 && r1 <= 2.5 && r2 >= 1.5 && r2 <= 2.5;
    auto r = flag("schwarz_first_order", Json{{"n", {32, 64, 128}}, {"mismatch", mism}, {"ratios", {r1, r2}}}, ok);
    return r;
  });
  b.run("rearrange.resolution_bound_decay", "equimeasurability_report", [&] {
    std::vector<double> bounds;
    bool ok = true;
    for (std::size_t n : {32, 64, 128}) {
      const auto g = CellGrid2D::sample([](double x, double y) { return 1.0 - std::max(std::abs(x), std::abs(y)); }, n);
      const auto t = RadialMeasure::lebesgue();
      const auto rep = equimeasurability_report(g, rearrange_two_measures(g, t), t);
      ok = ok && rep.ok();
      bounds.push_back(rep.tolerance);
    }
    const double r1 = bounds[0] / bounds[1], r2 = bounds[1] / bounds[2];
    ok = ok && r1 >= 2.0 / 1.5 && r1 <= 3.0 && r2 >= 2.0 / 1.5 && r2 <= 3.0;
    return flag("resolution_bound_decay", Json{{"bounds", bounds}, {"ratios", {r1, r2}}}, ok);
  });
  b.run("rearrange.gradient_level", "gradient_level_check", [&] {
    GeneratorOptions o;
    o.lambda = 1.0;
    o.shift = 0.2;
    const auto g = generate_test_profile(mix_seed(cfg.seed, 32), 0.25, GeneratorMode::Shift, o);
    const auto src = RadialMeasure::profile(g.admissible.profile, 0.25);
    const auto tgt = RadialMeasure::bubble(BubbleParams(1.0, 0.25));
    const auto psi = g.admissible.profile;
    const auto grid2 = geomspace(1e-2, psi.outer(), 400);
    std::vector<double> v(grid2.size());
    for (std::size_t i = 0; i < grid2.size(); ++i) v[i] = 1.0 - grid2[i] * grid2[i] + 0.2 * std::exp(-grid2[i]);
    return gradient_level_check(RadialProfile(grid2, v, 1.2), src, tgt, cfg.tol("rearrange", 1e-6));
  });
  return b.take();
}

inline SuiteReport bol_suite(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteBuilder b("bol");
  const double tol = cfg.tol("bol", kBolRelTol);
  const std::array<double, 4> alphas{0.0, 0.25, 0.5, 0.75};
  for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
    const double a = alphas[ai];
    for (int ext = 0; ext < 2; ++ext) {
      const std::size_t n = cfg.corpus;
      std::vector<double> rel(n, kNaN);
      std::vector<int> bubble(n, 0), equal(n, 0), failed(n, 0);
      std::vector<std::string> err(n);
      parallel_for(n, [&](std::size_t i) {
        const auto mode = i % 2 == 0 ? GeneratorMode::Shift : GeneratorMode::SubunitCurvature;
        GeneratorOptions o;
        o.nodes = cfg.nodes;
        // The first draw of each mode is the bubble itself.
        if (i == 0) o.shift = 0.0;
        if (i == 1) o.k_weights = std::array<double, 3>{1.0, 0.0, 0.0};
        try {
          const auto seed = mix_seed(cfg.seed, 1000000 * (ai + 1) + 2 * i + static_cast<std::size_t>(ext));
          const auto g = ext ? generate_exterior_profile(seed, a, mode, o) : generate_test_profile(seed, a, mode, o);
          const auto r = ext ? bol_deficit_exterior(g.admissible) : bol_deficit_interior(g.admissible);
          const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
          rel[i] = r.deficit / scale;
          bubble[i] = g.is_bubble();
          equal[i] = std::abs(rel[i]) <= tol;
        } catch (const std::exception& e) {
          failed[i] = 1;
          err[i] = e.what();
        }
      }, cfg.threads);
      const std::string dir = ext ? "exterior" : "interior";
      b.run("bol." + dir + "_corpus", "bol_deficit_" + dir, [&] {
        double worst = ext ? -kInfinity : kInfinity;
        std::size_t bad = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (failed[i]) {
            ++bad;
            continue;
          }
          worst = ext ? std::max(worst, rel[i]) : std::min(worst, rel[i]);
        }
        Json in{{"alpha", a}, {"profiles", n}, {"errors", bad}};
        auto r = ext ? DeficitReport::make("bol_deficit_" + dir + "_corpus", in, worst, 0.0, tol, Sense::AtMost)
                     : DeficitReport::make("bol_deficit_" + dir + "_corpus", in, worst, 0.0, tol, Sense::AtLeast);
        if (bad) {
          r.verdict = Verdict::Fail;
          for (std::size_t i = 0; i < n; ++i)
            if (failed[i]) {
              r.note(err[i]);
              break;
            }
        }
        return r;
      });
      b.run("bol.equality_iff_bubble", "bol_deficit_" + dir, [&] {
        std::size_t mismatch = 0, bubbles = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (failed[i]) continue;
          bubbles += bubble[i];
          if (bubble[i] != equal[i]) ++mismatch;
        }
        return within("equality_iff_bubble", Json{{"alpha", a}, {"direction", dir}, {"bubbles", bubbles}},
                      static_cast<double>(mismatch), 0.0);
      });
    }
  }
  b.run("bol.shift_closed_form", "bol_deficit_interior", [&] {
    double worst = 0.0;
    const BubbleParams p(2.0, 0.0);
    const double m0 = bubble_mass(p, 1.0);
    for (double c : {0.05, 0.1, 0.5}) {
      GeneratorOptions o;
      o.lambda = 2.0;
      o.shift = c;
      o.nodes = cfg.nodes;
      const auto g = generate_test_profile(cfg.seed, 0.0, GeneratorMode::Shift, o);
      const auto r = bol_deficit_interior(g.admissible);
      worst = std::max(worst, relative_error(r.deficit, 0.5 * m0 * m0 * std::exp(c) * (std::exp(c) - 1.0)));
    }
    return within("shift_closed_form", Json{{"shifts", {0.05, 0.1, 0.5}}}, worst, 1e-6);
  });
  b.run("bol.mass_alternative", "mass_alternative", [&] {
    std::size_t between = 0, used = 0;
    for (std::size_t i = 0; i < 200; ++i) {
      const auto mode = i % 2 == 0 ? GeneratorMode::Shift : GeneratorMode::SubunitCurvature;
      GeneratorOptions o;
      o.nodes = cfg.nodes;
      const auto g = generate_test_profile(mix_seed(cfg.seed, 5000 + i), 0.25, mode, o);
      const auto pair = match_boundary_value(g.admissible.profile.values.back(), 0.25, 1.0);
      if (!pair) continue;
      ++used;
      if (mass_alternative(g.admissible, pair->lambda1, 1.0).branch == MassBranch::Between) ++between;
    }
    return within("mass_alternative_never_between", Json{{"draws", 200}, {"matched", used}},
                  static_cast<double>(between), 0.0);
  });
  b.run("bol.exterior_sandwich", "exterior_sandwich", [&] {
    const double l1 = 1.0, a = 0.25;
    const double l2 = pair_lambda(l1, a, 1.0);
    GeneratorOptions o;
    o.nodes = cfg.nodes;
    o.lambda = l1;
    o.shift = 0.0;
    const auto u1 = generate_exterior_profile(cfg.seed, a, GeneratorMode::Shift, o);
    o.lambda = l2;
    const auto u2 = generate_exterior_profile(cfg.seed, a, GeneratorMode::Shift, o);
    const auto s1 = exterior_sandwich(u1.admissible, l1, l2);
    const auto s2 = exterior_sandwich(u2.admissible, l1, l2);
    const bool ok = s1.lower.ok() && s1.upper.equality() && s2.upper.ok() && s2.lower.equality();
    return flag("exterior_sandwich_endpoints", Json{{"lambda1", l1}, {"lambda2", l2}, {"alpha", a}}, ok);
  });
  b.run("bol.boundary_comparison", "boundary_comparison", [&] {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < 20; ++i) {
      const auto mode = i % 2 == 0 ? GeneratorMode::Shift : GeneratorMode::SubunitCurvature;
      GeneratorOptions o;
      o.nodes = cfg.nodes;
      const auto g = generate_test_profile(mix_seed(cfg.seed, 7000 + i), 0.5, mode, o);
      const double M = profile_mass(g.admissible.profile, 0.5);
      if (!(M < full_mass(0.5))) continue;
      const double lam = lambda_for_mass(M, 0.5, 1.0);
      if (!boundary_comparison(g.admissible, lam, 1.0).ok()) ++bad;
    }
    return within("boundary_comparison", Json{{"draws", 20}}, static_cast<double>(bad), 0.0);
  });
  b.run("bol.covering_paired_grid", "covering_deficit", [&] {
    double worst = 0.0;
    for (double l1 : lambda_grid())
      for (double a : {0.0, 0.25, 0.5, 0.9})
        for (double R : {0.5, 1.0, 2.0}) {
          const BubbleParams p1(l1, a), p2(pair_lambda(l1, a, R), a);
          const double m1 = annulus_integral(bubble_density_of(p1), 0.0, R);
          const double m2 = annulus_integral(bubble_density_of(p2), 0.0, R);
          const auto r = covering_deficit(m1, m2, a);
          worst = std::max(worst, std::abs(r.deficit) / full_mass(a));
        }
    return within("covering_paired_grid", Json{{"grid", "10x4x3"}}, worst, cfg.tol("bol", 1e-10));
  });
  b.run("bol.covering_perturbed", "covering_deficit", [&] {
    const BubbleParams p1(2.0, 0.0), p2(4.0, 0.0);
    const double c = 0.1;
    const auto r = covering_deficit(bubble_mass(p1, 1.0), std::exp(c) * bubble_mass(p2, 1.0), 0.0);
    return at_least("covering_perturbed", Json{{"shift", c}}, r.deficit, 1e-3);
  });
  b.run("bol.same_mass_bound", "same_mass_bound", [&] {
    const auto r1 = same_mass_bound(kEightPi, 0.0);
    const auto r2 = same_mass_bound(4.0 * kPi, 0.5);
    const auto r3 = same_mass_bound(6.0 * kPi, 0.0);
    const bool ok = r1.equality() && r2.equality() && !r3.ok() && std::abs(r3.deficit + 2.0 * kPi) < 1e-12;
    return flag("same_mass_bound_examples", Json::object(), ok);
  });
  return b.take();
}

inline SuiteReport thresholds_suite(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteBuilder b("thresholds");
  const double eps = cfg.tol("thresholds", 1e-14);
  b.run("meanfield.stereographic_round_trip", "stereographic", [&] {
    Rng rng(mix_seed(cfg.seed, 41));
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double z = rng.uniform(-1.0, 0.99), th = rng.uniform(0.0, 2.0 * kPi);
      const double s = std::sqrt(1.0 - z * z);
      const SpherePoint p{s * std::cos(th), s * std::sin(th), z};
      const auto q = inverse_stereographic(stereographic(p));
      worst = std::max({worst, std::abs(q.x1 - p.x1), std::abs(q.x2 - p.x2), std::abs(q.x3 - p.x3)});
    }
    return within("stereographic_round_trip", Json{{"points", 1000}}, worst, 1e-12);
  });
  b.run("meanfield.reduction_exponent", "reduce_sphere_to_plane", [&] {
    const std::vector<SphereAtom> none;
    const std::vector<SphereAtom> three{{-0.5, {1, 0, 0}}, {-0.5, {0, 1, 0}}, {-0.5, {0, 0, -1}}};
    const double e = std::abs(reduce_sphere_to_plane(kEightPi, none).smooth_exponent) +
                     std::abs(reduce_sphere_to_plane(4.0 * kPi, none).smooth_exponent - 1.0) +
                     std::abs(reduce_sphere_to_plane(2.0 * kPi, three).smooth_exponent);
    return within("reduction_exponent", Json::object(), e, eps);
  });
  b.run("meanfield.area_fraction", "sphere_area_fraction", [&] {
    double worst = 0.0;
    for (const auto& w : {RegionDescriptor::disk(1.0), RegionDescriptor::disk(3.0), RegionDescriptor::annulus(0.5, 2.0),
                          RegionDescriptor::plane(), RegionDescriptor::half_disk(1.5)})
      worst = std::max(worst, std::abs(sphere_area_fraction_quadrature(w) - sphere_area_fraction(w)));
    worst = std::max(worst, std::abs(sphere_area_fraction_filled(RegionDescriptor::annulus(1.0, std::sqrt(3.0))) - 0.75));
    return within("area_fraction_closed_vs_quadrature", Json::object(), worst, 1e-10);
  });
  b.run("meanfield.alpha_region", "alpha_region", [&] {
    SingularData d1{{weight_atom(0.3, {0.1, 0.0}), weight_atom(0.5, {5.0, 0.0})}, 0.0};
    SingularData d2{{{-0.5, {0.2, 0.1}}}, 0.5};
    SingularData d3{{{0.4, {0.0, 0.0}}, {-0.2, {3.0, 0.0}}}, 0.0};
    const auto disk1 = RegionDescriptor::disk(1.0);
    const double e = std::abs(alpha_region(d1, disk1) - 0.3) + std::abs(alpha_region(d2, disk1) - 0.75) +
                     std::abs(alpha_region(d3, disk1));
    return within("alpha_region_examples", Json::object(), e, eps);
  });
  b.run("meanfield.alpha_partition_chain", "alpha_region", [&] {
    Rng rng(mix_seed(cfg.seed, 42));
    std::size_t bad = 0;
    for (int k = 0; k < 200; ++k) {
      const std::size_t N = 1 + static_cast<std::size_t>(rng.uniform() * 5.0);
      std::vector<SphereAtom> atoms;
      double sum = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        const double z = rng.uniform(-1.0, 0.9), th = rng.uniform(0.0, 2.0 * kPi), s = std::sqrt(1.0 - z * z);
        atoms.push_back({rng.uniform(-0.99, -0.01), {s * std::cos(th), s * std::sin(th), z}});
        sum += atoms.back().order;
      }
      if (!(sum > -2.0)) continue;
      const double level = 4.0 * kPi * (2.0 + sum);
      const double rho = rng.uniform(0.01, 0.99) * level;
      const auto data = reduce_sphere_to_plane(rho, atoms);
      // Upper and lower half-disks: disjoint, and so are their hole fillings.
      const auto w1 = RegionDescriptor::half_disk(rng.log_uniform(0.1, 10.0));
      const auto w2 = RegionDescriptor::half_disk(rng.log_uniform(0.1, 10.0), true);
      const double a12 = alpha_region(data, w1) + alpha_region(data, w2);
      const double chain = (kEightPi - rho) / (4.0 * kPi);
      if (!(a12 <= chain + 1e-12 && a12 < 2.0)) ++bad;
      double neg = 0.0;
      for (const auto& at : data.atoms)
        if (w1.contains(at.location) || w2.contains(at.location)) neg -= at.order;
      const double smooth = data.smooth_exponent * (sphere_area_fraction(w1) + sphere_area_fraction(w2));
      if (std::abs(a12 - smooth - neg) > 1e-12) ++bad;
    }
    return within("alpha_partition_chain", Json{{"configurations", 200}}, static_cast<double>(bad), 0.0);
  });
  b.run("meanfield.threshold_values", "thresholds", [&] {
    const std::vector<double> three{-0.5, -0.5, -0.5}, none, disk{-0.25, -0.25};
    const auto s3 = thresholds(three, Domain::Sphere);
    const auto s0 = thresholds(none, Domain::Sphere);
    const auto d2 = thresholds(disk, Domain::Disk);
    const double e = std::abs(*s3.sphere_uniqueness - 2.0 * kPi) + std::abs(s3.coercivity - 4.0 * kPi) +
                     std::abs(*s0.sphere_uniqueness - kEightPi) + std::abs(*d2.disk_uniqueness - 4.0 * kPi) +
                     std::abs(d2.coercivity - 6.0 * kPi) + (s3.necessity_ok ? 0.0 : 1.0) +
                     (s3.polytope_applicable ? 0.0 : 1.0);
    const std::vector<double> heavy{-0.9, -0.9, -0.9};
    const double f = thresholds(heavy, Domain::Sphere).necessity_ok ? 1.0 : 0.0;
    return within("threshold_values", Json::object(), e + f, eps);
  });
  b.run("meanfield.threshold_algebra", "thresholds", [&] {
    Rng rng(mix_seed(cfg.seed, 43));
    std::size_t bad = 0, below = 0, above = 0;
    for (int k = 0; k < 200; ++k) {
      const double a = rng.uniform(-0.99, -0.01);
      const std::size_t N = 1 + static_cast<std::size_t>(rng.uniform() * 6.0);
      const std::vector<double> orders(N, a);
      const auto t = thresholds(orders, Domain::Sphere);
      // 4 pi (2 + N a) - 8 pi (1 + a) = 4 pi (N - 2) a.
      const double gap = *t.sphere_uniqueness - t.coercivity;
      if (std::abs(gap - 4.0 * kPi * (static_cast<double>(N) - 2.0) * a) > 1e-12) ++bad;
      if (N > 2) below += gap < 0.0;
      if (N < 2) above += gap > 0.0;
    }
    if (below == 0 || above == 0) ++bad;
    return within("threshold_algebra_branches", Json{{"below", below}, {"above", above}}, static_cast<double>(bad), 0.0);
  });
  return b.take();
}

inline SuiteReport shooting_suite(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteBuilder b("shooting");
  const double tol = cfg.tol("shooting", 1e-6);
  ShootOptions opt;
  opt.nodes = cfg.nodes;
  b.run("meanfield.disk_round_trip", "shoot_disk", [&] {
    double worst = 0.0;
    for (double a : {0.1, 0.5, 0.9})
      for (double l : geomspace(0.1, 100.0, 12)) {
        const auto s = shoot_disk_lambda(a, l, opt);
        worst = std::max(worst, relative_error(lambda_for_mass(s.rho, a, 1.0), l));
      }
    return within("disk_lambda_rho_round_trip", Json{{"alphas", {0.1, 0.5, 0.9}}, {"lambdas", 12}}, worst, tol);
  });
  b.run("meanfield.disk_rho_target", "shoot_disk", [&] {
    const auto s = shoot_disk_rho(0.5, 2.0 * kPi, opt);
    return within("disk_rho_target", Json{{"alpha", 0.5}, {"rho", 2.0 * kPi}}, relative_error(s.lambda, std::sqrt(8.0)),
                  tol);
  });
  b.run("meanfield.sphere_exact", "shoot_sphere", [&] {
    const double rho = 4.0 * kPi;
    const auto s = shoot_sphere(rho, std::log(4.0), opt);
    double worst = 0.0;
    for (double r : linspace(0.0, 100.0, 2001)) worst = std::max(worst, std::abs(s.profile(r) - std::log(4.0 / (1.0 + r * r))));
    auto rep = within("sphere_exact_sup_error", Json{{"rho", rho}, {"r_max", 100.0}}, worst, tol);
    return rep;
  });
  for (double k : {4.0, 6.0, 7.0}) {
    const double rho = k * kPi;
    b.run("meanfield.mass_contract", "shoot_sphere", [&] {
      const auto s = shoot_sphere(rho, sphere_exact_center(rho), opt);
      return within("sphere_mass_contract", Json{{"rho", rho}, {"tail", s.tail}}, std::abs(s.mass - rho),
                    s.tail + 1e-9 * rho);
    });
    b.run("meanfield.uniqueness_scan", "uniqueness_scan", [&] {
      const auto s = uniqueness_scan(rho, 50, 4.0, {}, opt, cfg.threads);
      auto r = within("uniqueness_scan", Json{{"rho", rho}, {"samples", 50}, {"center", s.center}, {"mass", s.mass}},
                      s.strictly_monotone ? 0.0 : 1.0, 0.0);
      return r;
    });
    b.run("bol.same_mass_experiment", "same_mass_bound", [&] {
      const auto s = uniqueness_scan(rho, 50, 4.0, {}, opt, cfg.threads);
      auto r = within("radial_solutions_with_mass", Json{{"rho", rho}, {"crossings", s.crossings}},
                      static_cast<double>(s.crossings) - 1.0, 0.0);
      r.note("no second radial solution with the same mass was found; non simply connected superlevel sets have no "
             "radial analogue and are covered only by this absence of counterexamples");
      return r;
    });
  }
  return b.take();
}

inline SuiteReport onsager_suite(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteBuilder b("onsager");
  const double eps = cfg.tol("onsager", 1e-12);
  b.run("onsager.weight", "onsager_weight", [&] {
    const double e = std::abs(onsager_weight(0.0, OnsagerParams(2.0 * kEightPi, 0.0)) - 8.0) +
                     std::abs(onsager_weight(1.0, OnsagerParams(12.0 * kPi, 0.0)) - 16.0);
    return within("onsager_weight_examples", Json::object(), e, eps);
  });
  b.run("onsager.laplacian_fd", "laplacian_H", [&] {
    double worst = 0.0;
    Rng rng(mix_seed(cfg.seed, 51));
    for (int k = 0; k < 100; ++k) {
      const OnsagerParams p = OnsagerParams::from_b(rng.uniform(1.01, 2.0), rng.uniform(0.0, 5.0));
      const double r = rng.uniform(0.0, 3.0);
      const double exact = laplacian_H(r, p);
      worst = std::max(worst, std::abs(laplacian_H_fd(r, p) - exact) / std::max(1.0, std::abs(exact)));
    }
    return within("laplacian_fd", Json{{"radii", 100}}, worst, 1e-6);
  });
  b.run("onsager.sign_structure", "positivity_radius", [&] {
    std::size_t bad = 0;
    for (double bb : {1.2, 1.5, 1.9}) {
      const OnsagerParams p = OnsagerParams::from_b(bb, bb);
      const double r0 = positivity_radius(p);
      for (double r : linspace(0.0, 4.0 * r0, 200)) {
        if (std::abs(r - r0) < 1e-9 * r0) continue;
        const double v = laplacian_H(r, p);
        if (r < r0 ? !(v < 0.0) : !(v > 0.0)) ++bad;
      }
    }
    return within("sign_structure", Json{{"radii", 200}}, static_cast<double>(bad), 0.0);
  });
  b.run("onsager.threshold_dominance", "gamma_threshold", [&] {
    std::size_t bad = 0;
    for (double bb : linspace(1.02, 2.0, 50)) {
      const auto g = gamma_threshold(bb * kEightPi);
      const bool last = bb == 2.0;
      if (last ? std::abs(g.paper_bound - g.exact_root) > eps : !(g.paper_bound < g.exact_root)) ++bad;
      if (!(g.paper_bound >= bb - 1.0)) ++bad;
    }
    const auto top = gamma_threshold(2.0 * kEightPi);
    if (std::abs(top.paper_bound - 1.0) > eps || std::abs(top.exact_root - 1.0) > eps) ++bad;
    return within("threshold_dominance", Json{{"betas", 50}}, static_cast<double>(bad), 0.0);
  });
  b.run("onsager.root_property", "contradiction_value", [&] {
    double worst = 0.0;
    // At b = 2 the root is b - 1 itself and the positive core is empty.
    for (double bb : linspace(1.02, 1.98, 49)) {
      const auto g = gamma_threshold(bb * kEightPi);
      worst = std::max(worst, std::abs(contradiction_value(OnsagerParams::from_b(bb, g.exact_root)) - 2.0));
    }
    return within("contradiction_at_root", Json{{"betas", 49}}, worst, eps);
  });
  b.run("onsager.deficit_chain", "deficit_chain", [&] {
    double worst = 0.0;
    for (double bb : {1.1, 1.5, 1.9})
      for (double g : {1.0, 2.0, 3.5}) {
        const OnsagerParams p = OnsagerParams::from_b(bb, g);
        if (!has_positive_core(p)) continue;
        const auto c = deficit_chain(p);
        worst = std::max({worst, std::abs(c.disk_quadrature - c.bound), std::abs(c.disk_closed - c.bound),
                          std::abs(2.0 * c.half_disk_quadrature - c.bound)});
      }
    return within("deficit_chain", Json::object(), worst, 1e-6);
  });
  b.run("onsager.remark", "remark_check", [&] {
    std::size_t bad = 0;
    for (double bb : linspace(1.0 + 1e-6, 2.0, 101)) {
      const auto r = remark_check(bb * kEightPi);
      if (!r.holds || r.equality != (bb == 2.0)) ++bad;
    }
    return within("remark_check", Json{{"betas", 101}}, static_cast<double>(bad), 0.0);
  });
  b.run("onsager.unimodality", "contradiction_value", [&] {
    std::size_t bad = 0;
    for (double bb : {1.1, 1.5, 1.9}) {
      int turns = 0;
      double prev = kNaN, dir = 0.0;
      for (double g : linspace(bb - 1.0 + 1e-6, 8.0, 400)) {
        const double v = contradiction_value(OnsagerParams::from_b(bb, g));
        if (!std::isnan(prev)) {
          const double d = v > prev ? 1.0 : -1.0;
          if (dir != 0.0 && d != dir) ++turns;
          if (dir < 0.0 && d > 0.0) dir = d;
          if (dir == 0.0) dir = d;
          if (d < 0.0 && dir > 0.0) ++bad;
        }
        prev = v;
      }
      if (turns > 1) ++bad;
    }
    auto r = within("contradiction_unimodal", Json{{"range", "(b-1, 8]"}}, static_cast<double>(bad), 0.0);
    r.note("implementation-level property; the minimizer sits at the left end gamma = b - 1");
    return r;
  });
  b.run("onsager.examples", "to_json", [&] {
    const OnsagerParams p = OnsagerParams::from_b(1.5, 1.0);
    const double e = std::abs(deficit_bound(p) - kPi / 2.0) + std::abs(contradiction_value(p) - 1.5625) +
                     (symmetry_forced(p) ? 0.0 : 1.0) + std::abs(positivity_radius(p) * positivity_radius(p) - 1.0 / 3.0);
    return within("onsager_examples", Json::object(), e, eps);
  });
  return b.take();
}

inline std::string to_csv(const SuiteReport& s) {
  std::string out = "invariant,op,lhs,rhs,deficit,tolerance,sense,verdict\n";
  for (const auto& c : s.checks) {
    const auto& r = c.report;
    out += c.invariant + ',' + r.op + ',' + format_double(r.lhs) + ',' + format_double(r.rhs) + ',' +
           format_double(r.deficit) + ',' + format_double(r.tolerance) + ',' + to_string(r.sense) + ',' +
           to_string(r.verdict) + '\n';
  }
  return out;
}

struct SuiteOutcome {
  std::vector<SuiteReport> suites;
  bool passed = true;
  std::optional<Json> first_failure;
};

/// Every invariant id and the suite that exercises it.
inline Json coverage_manifest(const std::vector<SuiteReport>& suites) {
  Json inv = Json::object();
  for (const auto& s : suites)
    for (const auto& c : s.checks) {
      auto& e = inv[c.invariant];
      if (e.is_null()) e = Json::array();
      bool seen = false;
      for (const auto& x : e) seen = seen || x == s.name;
      if (!seen) e.push_back(s.name);
    }
  Json names = Json::array();
  for (const auto& s : suites) names.push_back(s.name);
  return Json{{"suites", names}, {"invariants", inv}};
}

inline SuiteOutcome run_suite(const SuiteConfig& cfg, bool write = true) {
  SuiteOutcome out;
  out.suites.push_back(bubble_suite(cfg));
  out.suites.push_back(quadrature_suite(cfg));
  out.suites.push_back(rearrange_suite(cfg));
  out.suites.push_back(bol_suite(cfg));
  out.suites.push_back(thresholds_suite(cfg));
  out.suites.push_back(shooting_suite(cfg));
  out.suites.push_back(onsager_suite(cfg));
  for (const auto& s : out.suites) {
    if (const auto* f = s.first_failure(); f && !out.first_failure) {
      out.first_failure = to_json(*f);
      (*out.first_failure)["suite"] = s.name;
    }
    out.passed = out.passed && s.passed();
  }
  if (write) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    require(cfg.format == "json" || cfg.format == "csv", Errc::InvalidArgument, "format must be json or csv");
    const auto put = [&](const std::string& name, const std::string& text) {
      std::ofstream os(fs::path(cfg.out_dir) / name, std::ios::binary);
      require(static_cast<bool>(os), Errc::Io, "cannot write report " + name);
      os << text;
    };
    for (const auto& s : out.suites) {
      if (cfg.format == "csv") put(s.name + ".csv", to_csv(s));
      else put(s.name + ".json", dump_json(to_json(s, cfg.seed)) + '\n');
    }
    put("coverage.json", dump_json(coverage_manifest(out.suites)) + '\n');
  }
  return out;
}

}  // namespace sphcov
