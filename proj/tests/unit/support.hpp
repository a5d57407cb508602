#pragma once

// Independent oracles and small helpers shared by the unit tests. Nothing
// here calls into the library's numerics.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

// Root of s = tanh(b1 s + c) in [lo, hi] by plain bisection.
inline double tanh_root(double b1, double c, double lo, double hi) {
  auto f = [&](double s) { return s - std::tanh(b1 * s + c); };
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Positive ordered sentiment s0 of s = tanh(b1 s).
inline double s0(double b1 = 1.1) { return tanh_root(b1, 0.0, 1e-3, 1.0); }

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng); }
  std::vector<double> taus(int n) {
    std::vector<double> t(static_cast<std::size_t>(n));
    for (auto& v : t) v = uniform(0.5, 30.0);
    return t;
  }
};

// Smooth pseudo-random sentiment path: a few slow sinusoids plus an offset,
// kept inside (-1, 1).
inline std::vector<double> smooth_sentiment(Gen& g, std::size_t n) {
  const double two_pi = 6.283185307179586;
  std::vector<double> s(n, g.uniform(-0.2, 0.2));
  for (int c = 0; c < 4; ++c) {
    const double period = g.uniform(60.0, 900.0);
    const double amp = g.uniform(0.05, 0.2);
    const double phase = g.uniform(0.0, two_pi);
    for (std::size_t k = 0; k < n; ++k) s[k] += amp * std::sin(two_pi * static_cast<double>(k) / period + phase);
  }
  return s;
}

inline std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("hetmarket_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testsupport
