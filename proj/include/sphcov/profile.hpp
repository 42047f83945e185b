#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sphcov/errors.hpp"
#include "sphcov/numeric.hpp"

namespace sphcov {

/// Sampled radial function on strictly ascending positive radii.
///
/// Between nodes the profile is interpolated by local cubics in log r, which
/// is exact enough for the bubble family on geometric grids. Inside the first
/// node, when a center value is known, the profile is continued as
/// center + (v0 - center) (r/r0)^p with p fitted from the first two nodes;
/// this reproduces the r^{2(1-alpha)} onset of every profile in this library.
struct RadialProfile {
  std::vector<double> nodes;
  std::vector<double> values;
  std::optional<double> center_value;

  RadialProfile() = default;
  RadialProfile(std::vector<double> r, std::vector<double> v, std::optional<double> center = {})
      : nodes(std::move(r)), values(std::move(v)), center_value(center) {
    validate();
  }

  void validate() const {
    require(!nodes.empty(), Errc::InvalidArgument, "RadialProfile needs at least one node");
    require(nodes.size() == values.size(), Errc::InvalidArgument, "RadialProfile length mismatch");
    require(nodes.front() > 0.0, Errc::InvalidArgument, "RadialProfile radii must be positive");
    require(strictly_increasing(nodes), Errc::InvalidArgument,
            "RadialProfile radii must be strictly increasing");
  }

  std::size_t size() const { return nodes.size(); }
  double inner() const { return nodes.front(); }
  double outer() const { return nodes.back(); }

  double operator()(double r) const {
    if (r <= nodes.front()) {
      if (!center_value || r == nodes.front()) return values.front();
      return inner_extension(r);
    }
    if (r >= nodes.back()) return values.back();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
    return segment(i)(r);
  }

  /// Local cubic in log r used on [nodes[i], nodes[i+1]], stored relative to
  /// t[0] and v[0] so that rounding tracks the local variation.
  struct Segment {
    double t0 = 0.0;
    double v0 = 0.0;
    double t[4];
    double v[4];
    double denom[4];
    int count;

    double operator()(double r) const { return at_log(std::log(r)); }

    double at_log(double x) const {
      x -= t0;
      if (count == 2) return v0 + x / t[1] * v[1];
      double acc = 0.0;
      for (int j = 0; j < 4; ++j) {
        double w = 1.0;
        for (int k = 0; k < 4; ++k)
          if (k != j) w *= x - t[k];
        acc += w * v[j] / denom[j];
      }
      return v0 + acc;
    }
  };

  Segment segment(std::size_t i) const {
    Segment s{};
    const std::size_t n = nodes.size();
    s.t0 = std::log(nodes[i]);
    s.v0 = values[i];
    if (n < 4) {
      s.count = 2;
      s.t[0] = 0.0;
      s.t[1] = std::log(nodes[i + 1] / nodes[i]);
      s.v[0] = 0.0;
      s.v[1] = values[i + 1] - values[i];
      return s;
    }
    s.count = 4;
    std::size_t lo = i >= 1 ? i - 1 : 0;
    if (lo + 4 > n) lo = n - 4;
    for (int j = 0; j < 4; ++j) {
      s.t[j] = std::log(nodes[lo + j] / nodes[i]);
      s.v[j] = values[lo + j] - values[i];
    }
    for (int j = 0; j < 4; ++j) {
      double d = 1.0;
      for (int k = 0; k < 4; ++k)
        if (k != j) d *= s.t[j] - s.t[k];
      s.denom[j] = d;
    }
    return s;
  }

  /// Piecewise-linear evaluation, used wherever level-set geometry matters.
  double linear(double r) const {
    if (r <= nodes.front()) {
      if (!center_value) return values.front();
      return *center_value + (values.front() - *center_value) * (r / nodes.front());
    }
    if (r >= nodes.back()) return values.back();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
    const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
    const double u = (r - nodes[i]) / (nodes[i + 1] - nodes[i]);
    return values[i] + u * (values[i + 1] - values[i]);
  }

  bool strictly_decreasing() const {
    if (center_value && !(*center_value > values.front())) return false;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (!(values[i] < values[i - 1])) return false;
    return true;
  }

  bool nonincreasing() const {
    if (center_value && *center_value < values.front()) return false;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] > values[i - 1]) return false;
    return true;
  }

  double max_value() const {
    double m = *std::max_element(values.begin(), values.end());
    return center_value ? std::max(m, *center_value) : m;
  }
  double min_value() const {
    double m = *std::min_element(values.begin(), values.end());
    return center_value ? std::min(m, *center_value) : m;
  }

  RadialProfile shifted(double c) const {
    RadialProfile out = *this;
    for (double& v : out.values) v += c;
    if (out.center_value) *out.center_value += c;
    return out;
  }

 private:
  double inner_extension(double r) const {
    const double c = *center_value;
    const double d1 = values[0] - c;
    double p = 2.0;
    if (values.size() >= 2) {
      const double d2 = values[1] - c;
      if (d1 != 0.0 && d2 / d1 > 1.0) p = std::log(d2 / d1) / std::log(nodes[1] / nodes[0]);
    }
    p = std::clamp(p, 1e-3, 4.0);
    return c + d1 * std::pow(r / nodes.front(), p);
  }
};

/// Default radial grid: a quarter of the nodes in [r_min, 100 r_min], the rest
/// geometric up to r_max.
inline std::vector<double> radial_grid(double r_max, std::size_t n, double r_min = 1e-6) {
  require(n >= 8 && r_max > 100 * r_min, Errc::InvalidArgument, "radial_grid: bad parameters");
  const std::size_t n_inner = n / 4;
  auto a = geomspace(r_min, 100 * r_min, n_inner + 1);
  auto b = geomspace(100 * r_min, r_max, n - n_inner);
  a.pop_back();
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RadialProfile CSV: header `r,value`, ascending r, optional first row `0,<center>`.
inline void write_profile_csv(std::ostream& os, const RadialProfile& p) {
  os << "r,value\n";
  if (p.center_value) os << "0," << format_double(*p.center_value) << '\n';
  for (std::size_t i = 0; i < p.size(); ++i)
    os << format_double(p.nodes[i]) << ',' << format_double(p.values[i]) << '\n';
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    cell.erase(0, cell.find_first_not_of(" \t\r"));
    cell.erase(cell.find_last_not_of(" \t\r") + 1);
    cells.push_back(cell);
  }
  return cells;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(Errc::Io, "line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}
}  // namespace detail

inline RadialProfile read_profile_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), Errc::Io, "empty profile CSV");
  const auto header = detail::split_csv_line(line);
  require(header.size() == 2 && header[0] == "r" && header[1] == "value", Errc::Io,
          "profile CSV header must be 'r,value'");
  RadialProfile p;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = detail::split_csv_line(line);
    require(cells.size() == 2, Errc::Io, "line " + std::to_string(line_no) + ": expected 2 fields");
    const double r = detail::parse_double(cells[0], line_no);
    const double v = detail::parse_double(cells[1], line_no);
    if (r == 0.0) {
      require(p.nodes.empty() && !p.center_value, Errc::Io, "center row must come first");
      p.center_value = v;
      continue;
    }
    p.nodes.push_back(r);
    p.values.push_back(v);
  }
  try {
    p.validate();
  } catch (const Error& e) {
    throw Error(Errc::Io, e.what());
  }
  return p;
}

inline RadialProfile read_profile_csv(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), Errc::Io, "cannot open " + path);
  return read_profile_csv(f);
}

}  // namespace sphcov
