#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <numbers>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "sphcov/errors.hpp"

namespace sphcov {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEightPi = 8.0 * std::numbers::pi;

/// Seeded generator with a platform-independent mapping to [0,1); the
/// standard distributions are implementation-defined, so we avoid them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = b;
  return out;
}

inline std::vector<double> geomspace(double a, double b, std::size_t n) {
  require(a > 0 && b > a && n >= 2, Errc::InvalidArgument, "geomspace needs 0 < a < b, n >= 2");
  std::vector<double> out(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = a;
  out.back() = b;
  return out;
}

/// Finite-difference weights (Fornberg) for derivatives 0..m at z on an
/// arbitrary stencil. Returns weights[k * n + j] for derivative k, node j.
inline std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
  const std::size_t n = x.size();
  std::vector<double> c(static_cast<std::size_t>(m + 1) * n, 0.0);
  auto at = [&](int k, std::size_t j) -> double& { return c[static_cast<std::size_t>(k) * n + j]; };
  double c1 = 1.0, c4 = x[0] - z;
  at(0, 0) = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          at(k, i) = c1 * (k * at(k - 1, i - 1) - c5 * at(k, i - 1)) / c2;
        at(0, i) = -c1 * c5 * at(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) at(k, j) = (c4 * at(k, j) - k * at(k - 1, j)) / c3;
      at(0, j) = c4 * at(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

/// Derivative of sampled data at every node from 5-point stencils: centered
/// in the interior, shifted to stay inside the data near the two ends, so
/// the order is four everywhere.
struct NodalDerivative {
  std::vector<double> value;
  /// Round-off amplification sum_j |w_j| * |y_j| * eps per node.
  std::vector<double> roundoff;
};

inline NodalDerivative nodal_derivative(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  require(n >= 5 && y.size() == n, Errc::InvalidArgument, "nodal_derivative needs >= 5 nodes");
  NodalDerivative d{std::vector<double>(n), std::vector<double>(n)};
  constexpr double eps = 2.220446049250313e-16;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = std::min(i >= 2 ? i - 2 : 0, n - 5);
    const auto w = fd_weights(x[i], x.subspan(lo, 5), 1);
    double acc = 0.0, ro = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
      acc += w[5 + j] * y[lo + j];
      ro += std::abs(w[5 + j] * y[lo + j]);
    }
    d.value[i] = acc;
    d.roundoff[i] = 4.0 * eps * ro;
  }
  return d;
}

/// Piecewise monotone cubic Hermite interpolant (Fritsch-Carlson slopes).
/// Knots must be strictly increasing; monotone data yields a monotone curve.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    require(n >= 1 && y_.size() == n, Errc::InvalidArgument, "MonotoneCubic needs matching knots");
    for (std::size_t i = 1; i < n; ++i)
      require(x_[i] > x_[i - 1], Errc::InvalidArgument, "MonotoneCubic knots must increase");
    slope_.assign(n, 0.0);
    if (n < 2) return;
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    slope_[0] = delta[0];
    slope_[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        slope_[i] = 0.0;
      } else {
        const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
        const double w1 = 2 * h1 + h0, w2 = h1 + 2 * h0;
        slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
  }

  double operator()(double t) const {
    const std::size_t n = x_.size();
    if (n == 1 || t <= x_.front()) return y_.front();
    if (t >= x_.back()) return y_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    const double h = x_[i + 1] - x_[i];
    const double u = (t - x_[i]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
  }

  const std::vector<double>& knots() const { return x_; }

 private:
  std::vector<double> x_, y_, slope_;
};

inline bool strictly_increasing(std::span<const double> v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return true;
}

inline double relative_error(double value, double reference) {
  const double denom = std::abs(reference);
  return denom > 0 ? std::abs(value - reference) / denom : std::abs(value);
}

/// Runs f(i) for i in [0, n) on a few threads, thread t taking i = t, t +
/// threads, ...; results written into per-index slots are independent of the
/// thread count. The first exception (by thread) is rethrown.
template <class F>
void parallel_for(std::size_t n, F&& f, unsigned threads = 0) {
  if (n == 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < n; i += threads) f(i);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace sphcov
