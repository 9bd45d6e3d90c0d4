#pragma once

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "quite/rng.hpp"

namespace testutil {

inline std::mt19937_64 rng(std::uint64_t seed = 12345) {
  return std::mt19937_64(seed);
}

// Centered finite difference of a scalar function.
template <class F>
double fd1(F&& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <class F>
double fd2(F&& f, double x, double h = 1e-5) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Brute-force grid argmax over [lo, hi] with the given spacing.
template <class F>
double grid_argmax(F&& f, double lo, double hi, double step) {
  double best_x = lo, best = f(lo);
  for (double x = lo; x <= hi + 0.5 * step; x += step) {
    double v = f(std::min(x, hi));
    if (v > best) {
      best = v;
      best_x = std::min(x, hi);
    }
  }
  return best_x;
}

inline double mean(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

inline double sample_std(const std::vector<double>& v) {
  double m = mean(v), ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

}  // namespace testutil
