#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "sphcov/sphcov.hpp"

namespace {

using sphcov::Json;

enum ExitCode { kOk = 0, kNumeric = 1, kUsage = 2 };

bool pretty = false;

void emit(const Json& j) { std::cout << sphcov::dump_json(j) << '\n'; }

int verdict_exit(const sphcov::DeficitReport& r) { return r.ok() ? kOk : kNumeric; }

void write_csv(const std::string& path, const sphcov::RadialProfile& p) {
  if (path.empty()) return;
  std::ofstream os(path, std::ios::binary);
  sphcov::require(static_cast<bool>(os), sphcov::Errc::Io, "cannot write " + path);
  sphcov::write_profile_csv(os, p);
}

double to_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  sphcov::require(used > 0 && used == s.size(), sphcov::Errc::InvalidArgument, "not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(to_number(f));
  return out;
}

struct BubbleArgs {
  double lambda = 1.0, alpha = 0.0, radius = 1.0;
};

int run_bubble(const BubbleArgs& a) {
  const sphcov::BubbleParams p(a.lambda, a.alpha);
  const double closed = sphcov::bubble_mass(p, a.radius);
  const double quad = sphcov::annulus_integral(sphcov::bubble_density_of(p), 0.0, a.radius);
  const double root = sphcov::boundary_root_integral(p, a.radius);
  const double rhs = 0.5 * closed * (sphcov::full_mass(a.alpha) - closed);
  auto bol = sphcov::DeficitReport::make("bol_deficit_bubble", Json{{"lambda", a.lambda}, {"alpha", a.alpha}, {"R", a.radius}},
                                         root * root, rhs, sphcov::kBolRelTol * std::max(root * root, rhs));
  Json j{{"lambda", a.lambda},
         {"alpha", a.alpha},
         {"radius", a.radius},
         {"mass_closed", closed},
         {"mass_quadrature", quad},
         {"mass_relative_error", sphcov::relative_error(quad, closed)},
         {"boundary_root_integral", root},
         {"bol", sphcov::to_json(bol)}};
  if (pretty) j["pi_multiples"] = Json{{"mass_closed", sphcov::format_double(closed / sphcov::kPi) + " pi"}};
  emit(j);
  return verdict_exit(bol);
}

int run_pair(const BubbleArgs& a) {
  const double l2 = sphcov::pair_lambda(a.lambda, a.alpha, a.radius);
  const sphcov::BubbleParams p1(a.lambda, a.alpha), p2(l2, a.alpha);
  const double u1 = sphcov::eval_bubble(p1, a.radius), u2 = sphcov::eval_bubble(p2, a.radius);
  const double m1 = sphcov::bubble_mass(p1, a.radius), m2 = sphcov::bubble_mass(p2, a.radius);
  const auto cov = sphcov::covering_deficit(m1, m2, a.alpha);
  Json j{{"lambda1", a.lambda},
         {"lambda2", l2},
         {"alpha", a.alpha},
         {"radius", a.radius},
         {"boundary_match_error", std::abs(u1 - u2)},
         {"mass1", m1},
         {"mass2", m2},
         {"mass_sum", m1 + m2},
         {"full_mass", sphcov::full_mass(a.alpha)},
         {"covering", sphcov::to_json(cov)}};
  if (pretty) j["pi_multiples"] = Json{{"mass_sum", sphcov::format_double((m1 + m2) / sphcov::kPi) + " pi"}};
  emit(j);
  return verdict_exit(cov);
}

struct BolArgs {
  std::string profile;
  double alpha = 0.0;
  std::optional<double> radius;
  bool exterior = false;
};

int run_bol(const BolArgs& a) {
  const auto psi = sphcov::read_profile_csv(a.profile);
  sphcov::DeficitReport r;
  if (a.exterior) {
    r = sphcov::bol_deficit_exterior(sphcov::check_exterior_inequality(psi, a.alpha));
  } else {
    const double R = a.radius.value_or(psi.outer());
    r = sphcov::bol_deficit_interior(sphcov::check_differential_inequality(psi, a.alpha, R), R);
  }
  emit(sphcov::to_json(r));
  return verdict_exit(r);
}

struct RearrangeArgs {
  std::string phi, source = "lebesgue", csv;
  double target_lambda = 1.0, alpha = 0.0;
  std::optional<double> source_lambda;
  bool cells = false;
};

int run_rearrange(const RearrangeArgs& a) {
  const auto target = sphcov::RadialMeasure::bubble(sphcov::BubbleParams(a.target_lambda, a.alpha));
  sphcov::DeficitReport r;
  sphcov::RadialProfile star;
  if (a.cells) {
    std::ifstream is(a.phi);
    sphcov::require(static_cast<bool>(is), sphcov::Errc::Io, "cannot open " + a.phi);
    const auto g = sphcov::read_cells_csv(is);
    star = sphcov::rearrange_two_measures(g, target);
    r = sphcov::equimeasurability_report(g, star, target);
  } else {
    const auto phi = sphcov::read_profile_csv(a.phi);
    sphcov::RadialMeasure source = sphcov::RadialMeasure::lebesgue();
    if (a.source == "bubble")
      source = sphcov::RadialMeasure::bubble(sphcov::BubbleParams(a.source_lambda.value_or(a.target_lambda), a.alpha));
    else if (a.source != "lebesgue")
      source = sphcov::RadialMeasure::profile(sphcov::read_profile_csv(a.source), a.alpha);
    star = sphcov::rearrange_two_measures(phi, source, target);
    r = sphcov::equimeasurability_report(phi, star, source, target);
  }
  write_csv(a.csv, star);
  emit(Json{{"outer_radius", star.outer()}, {"nodes", star.size()}, {"report", sphcov::to_json(r)}});
  return verdict_exit(r);
}

int run_thresholds(const std::string& alphas, const std::string& domain) {
  const auto orders = parse_list(alphas);
  const auto d = domain == "disk" ? sphcov::Domain::Disk : sphcov::Domain::Sphere;
  emit(sphcov::to_json(sphcov::thresholds(orders, d), pretty));
  return kOk;
}

struct ShootArgs {
  std::string domain = "sphere", csv;
  double alpha = 0.5;
  std::optional<double> rho, lambda;
  bool scan = false;
  std::size_t samples = 50;
};

int run_shoot(const ShootArgs& a) {
  const sphcov::ShootOptions opt;
  if (a.domain == "disk") {
    sphcov::require(a.rho.has_value() != a.lambda.has_value(), sphcov::Errc::InvalidArgument,
                    "disk shooting needs exactly one of --rho and --lambda");
    const auto s = a.rho ? sphcov::shoot_disk_rho(a.alpha, *a.rho, opt) : sphcov::shoot_disk_lambda(a.alpha, *a.lambda, opt);
    const double closed = sphcov::lambda_for_mass(s.rho, a.alpha, 1.0);
    auto r = sphcov::DeficitReport::make("disk_lambda_inversion", Json{{"alpha", a.alpha}, {"rho", s.rho}},
                                         s.lambda, closed, 1e-6 * closed, sphcov::Sense::Zero);
    write_csv(a.csv, s.profile);
    emit(Json{{"domain", "disk"},
              {"alpha", a.alpha},
              {"rho", s.rho},
              {"center", s.center},
              {"lambda", s.lambda},
              {"lambda_closed_form", closed},
              {"report", sphcov::to_json(r)}});
    return verdict_exit(r);
  }
  sphcov::require(a.rho.has_value(), sphcov::Errc::InvalidArgument, "sphere shooting needs --rho");
  const double rho = *a.rho;
  const double u0 = sphcov::sphere_center_for_mass(rho, opt);
  const auto s = sphcov::shoot_sphere(rho, u0, opt);
  const double exact = sphcov::sphere_exact_center(rho);
  auto r = sphcov::DeficitReport::make("sphere_mass_inversion", Json{{"rho", rho}, {"tail", s.tail}}, s.mass, rho,
                                       s.tail + 1e-9 * rho, sphcov::Sense::Zero);
  Json j{{"domain", "sphere"},
         {"rho", rho},
         {"l", s.l},
         {"center", u0},
         {"center_exact", exact},
         {"center_error", std::abs(u0 - exact)},
         {"mass", s.mass},
         {"tail", s.tail},
         {"r_max", s.r_max},
         {"report", sphcov::to_json(r)}};
  int code = verdict_exit(r);
  if (a.scan) {
    const auto sc = sphcov::uniqueness_scan(rho, a.samples, 4.0, {}, opt);
    j["scan"] = Json{{"center", sc.center},
                     {"u0", sc.u0},
                     {"mass", sc.mass},
                     {"tail", sc.tail},
                     {"strictly_monotone", sc.strictly_monotone},
                     {"crossings", sc.crossings}};
    if (!sc.strictly_monotone) code = kNumeric;
  }
  write_csv(a.csv, s.profile);
  emit(j);
  return code;
}

int run_onsager(double b, double gamma) {
  emit(sphcov::to_json(sphcov::OnsagerParams::from_b(b, gamma), pretty));
  return kOk;
}

int run_verify(sphcov::SuiteConfig cfg, const std::vector<std::string>& tols) {
  for (const auto& t : tols) {
    const auto eq = t.find('=');
    sphcov::require(eq != std::string::npos && eq > 0, sphcov::Errc::InvalidArgument,
                    "tolerance override must read suite=value");
    cfg.tolerance[t.substr(0, eq)] = to_number(t.substr(eq + 1));
  }
  const auto out = sphcov::run_suite(cfg);
  Json summary = Json::object();
  for (const auto& s : out.suites) summary[s.name] = s.passed();
  emit(Json{{"seed", cfg.seed}, {"out_dir", cfg.out_dir}, {"passed", out.passed}, {"suites", summary}});
  if (out.first_failure) std::cerr << sphcov::dump_json(*out.first_failure) << '\n';
  return out.passed ? kOk : kNumeric;
}

bool usage_error(sphcov::Errc e) {
  using sphcov::Errc;
  return e == Errc::InvalidArgument || e == Errc::Io || e == Errc::OrderOutOfRange || e == Errc::RhoOutOfRange ||
         e == Errc::AtPole;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bubble identities, Bol deficits, rearrangements and mean field thresholds"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--pretty", pretty, "Add pi multiples to JSON output");

  BubbleArgs bub;
  auto* bubble = app.add_subcommand("bubble", "Mass, boundary integral and Bol deficit of one bubble");
  bubble->add_option("--lambda", bub.lambda)->required()->check(CLI::PositiveNumber);
  bubble->add_option("--alpha", bub.alpha)->check(CLI::Range(0.0, 0.999999));
  bubble->add_option("--radius", bub.radius)->check(CLI::PositiveNumber);

  BubbleArgs par;
  auto* pair = app.add_subcommand("pair", "Paired bubble with the same boundary value");
  pair->add_option("--lambda1", par.lambda)->required()->check(CLI::PositiveNumber);
  pair->add_option("--alpha", par.alpha)->check(CLI::Range(0.0, 0.999999));
  pair->add_option("--radius", par.radius)->check(CLI::PositiveNumber);

  BolArgs bola;
  auto* bol = app.add_subcommand("bol", "Bol deficit of a sampled radial profile");
  bol->add_option("--profile", bola.profile)->required();
  bol->add_option("--alpha", bola.alpha)->check(CLI::Range(0.0, 0.999999));
  bol->add_option("--radius", bola.radius)->check(CLI::PositiveNumber);
  bol->add_flag("--exterior", bola.exterior);

  RearrangeArgs rea;
  auto* rearrange = app.add_subcommand("rearrange", "Two-measure rearrangement of a profile or cell grid");
  rearrange->add_option("--phi", rea.phi)->required();
  rearrange->add_option("--source", rea.source, "bubble, lebesgue or a profile CSV");
  rearrange->add_option("--source-lambda", rea.source_lambda)->check(CLI::PositiveNumber);
  rearrange->add_option("--target-lambda", rea.target_lambda)->required()->check(CLI::PositiveNumber);
  rearrange->add_option("--alpha", rea.alpha)->check(CLI::Range(0.0, 0.999999));
  rearrange->add_option("--csv", rea.csv, "Write phi* here");
  rearrange->add_flag("--cells", rea.cells, "Read --phi as a cell grid");

  std::string alphas, domain = "sphere";
  auto* thr = app.add_subcommand("thresholds", "Uniqueness and coercivity thresholds");
  thr->add_option("--alphas", alphas, "Comma separated orders");
  thr->add_option("--domain", domain)->check(CLI::IsMember({"sphere", "disk"}));

  ShootArgs sh;
  auto* shoot = app.add_subcommand("shoot", "Radial shooting on the disk or the sphere");
  shoot->add_option("--domain", sh.domain)->check(CLI::IsMember({"sphere", "disk"}));
  shoot->add_option("--alpha", sh.alpha);
  shoot->add_option("--rho", sh.rho)->check(CLI::PositiveNumber);
  shoot->add_option("--lambda", sh.lambda)->check(CLI::PositiveNumber);
  shoot->add_flag("--scan", sh.scan);
  shoot->add_option("--samples", sh.samples)->check(CLI::Range(2, 100000));
  shoot->add_option("--csv", sh.csv, "Write the profile here");

  double b = 1.5, gamma = 0.0;
  auto* ons = app.add_subcommand("onsager", "Onsager symmetry record");
  ons->add_option("--beta-over-8pi", b)->required();
  ons->add_option("--gamma", gamma)->required();

  sphcov::SuiteConfig cfg;
  std::vector<std::string> tols;
  auto* verify = app.add_subcommand("verify-all", "Run every invariant suite");
  verify->add_option("--seed", cfg.seed);
  verify->add_option("--out-dir", cfg.out_dir);
  verify->add_option("--corpus", cfg.corpus)->check(CLI::Range(2, 100000));
  verify->add_option("--nodes", cfg.nodes)->check(CLI::Range(100, 1000000));
  verify->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
  verify->add_option("--tol", tols, "Override a suite tolerance, e.g. quadrature=1e-15");
  verify->add_option("--threads", cfg.threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*bubble) return run_bubble(bub);
    if (*pair) return run_pair(par);
    if (*bol) return run_bol(bola);
    if (*rearrange) return run_rearrange(rea);
    if (*thr) return run_thresholds(alphas, domain);
    if (*shoot) return run_shoot(sh);
    if (*ons) return run_onsager(b, gamma);
    if (*verify) return run_verify(cfg, tols);
  } catch (const sphcov::Error& e) {
    std::cerr << e.what() << '\n';
    return usage_error(e.code()) ? kUsage : kNumeric;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
