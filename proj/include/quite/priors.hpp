#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quite/rng.hpp"

namespace quite {

enum class PriorKind { Uniform, PlanckTaper, Gaussian, TriangularDifference, Empirical };

inline const char* to_string(PriorKind k) {
  switch (k) {
    case PriorKind::Uniform: return "uniform";
    case PriorKind::PlanckTaper: return "planck_taper";
    case PriorKind::Gaussian: return "gaussian";
    case PriorKind::TriangularDifference: return "triangular_difference";
    case PriorKind::Empirical: return "empirical";
  }
  return "?";
}

struct LogDensityDerivs {
  double log_f;
  double d1;
  double d2;
  bool kink = false;  // derivative undefined at this point (reported, not thrown)
};

// One-dimensional prior density with closed support [lo, hi].
// Immutable after construction; all queries are const.
class Prior {
 public:
  static Prior uniform(double a, double b) {
    require(a < b, "uniform: need a < b");
    Prior p(PriorKind::Uniform, a, b);
    p.a_ = a; p.b_ = b;
    return p;
  }

  // C-infinity windowed approximation of U[a,b]; plateau height
  // C_p = 1/(b-a-z), tapers of width z at both ends.
  static Prior planck_taper(double a, double b, double z) {
    require(a < b, "planck_taper: need a < b");
    require(z > 0.0 && z <= 0.5 * (b - a), "planck_taper: need 0 < z <= (b-a)/2");
    Prior p(PriorKind::PlanckTaper, a, b);
    p.a_ = a; p.b_ = b; p.z_ = z;
    p.cp_ = 1.0 / (b - a - z);
    return p;
  }

  static Prior gaussian(double mu, double var) {
    require(var > 0.0, "gaussian: need var > 0");
    double sd = std::sqrt(var);
    Prior p(PriorKind::Gaussian, mu - 10.0 * sd, mu + 10.0 * sd);
    p.mu_ = mu; p.var_ = var;
    return p;
  }

  // Density of q1 - q2 with q1, q2 i.i.d. U[a,b]: triangle on [-(b-a), b-a].
  static Prior triangular_difference(double a, double b) {
    require(a < b, "triangular_difference: need a < b");
    double len = b - a;
    Prior p(PriorKind::TriangularDifference, -len, len);
    p.a_ = a; p.b_ = b;
    return p;
  }

  // Piecewise-linear density on a uniform grid over [lo, hi].
  static Prior empirical(double lo, double hi, std::vector<double> density) {
    require(lo < hi, "empirical: need lo < hi");
    require(density.size() >= 2, "empirical: need at least 2 grid values");
    Prior p(PriorKind::Empirical, lo, hi);
    p.grid_ = std::move(density);
    p.build_cdf();
    return p;
  }

  PriorKind kind() const { return kind_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  std::pair<double, double> gaussian_params() const {
    if (kind_ != PriorKind::Gaussian)
      throw std::logic_error("gaussian_params: not a Gaussian prior");
    return {mu_, var_};
  }

  // Source interval and taper width for PlanckTaper / parents for Uniform
  // and TriangularDifference.
  double param_a() const { return a_; }
  double param_b() const { return b_; }
  double taper_width() const { return z_; }

  double density(double x) const {
    switch (kind_) {
      case PriorKind::Uniform:
        return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
      case PriorKind::PlanckTaper:
        return planck_density(x);
      case PriorKind::Gaussian: {
        double t = x - mu_;
        return std::exp(-0.5 * t * t / var_) /
               std::sqrt(6.283185307179586476925286766559 * var_);
      }
      case PriorKind::TriangularDifference: {
        double len = b_ - a_;
        double ax = std::fabs(x);
        return ax <= len ? (1.0 - ax / len) / len : 0.0;
      }
      case PriorKind::Empirical: {
        if (x < lo_ || x > hi_) return 0.0;
        double t = (x - lo_) / (hi_ - lo_) * (grid_.size() - 1);
        std::size_t i = std::min(static_cast<std::size_t>(t), grid_.size() - 2);
        double frac = t - static_cast<double>(i);
        return grid_[i] * (1.0 - frac) + grid_[i + 1] * frac;
      }
    }
    return 0.0;
  }

  // log f and its first two derivatives, analytic where a closed form exists,
  // centered finite differences (step 1e-5 * support width) for PlanckTaper
  // and Empirical.  Throws outside or on the boundary of the support.
  LogDensityDerivs log_density_derivs(double x) const {
    if (!(x > lo_ && x < hi_))
      throw std::domain_error("log_density_derivs: x outside open support");
    switch (kind_) {
      case PriorKind::Uniform:
        return {-std::log(b_ - a_), 0.0, 0.0, false};
      case PriorKind::Gaussian: {
        double t = x - mu_;
        double lf = -0.5 * t * t / var_ -
                    0.5 * std::log(6.283185307179586476925286766559 * var_);
        return {lf, -t / var_, -1.0 / var_, false};
      }
      case PriorKind::TriangularDifference: {
        double len = b_ - a_;
        double ax = std::fabs(x);
        double lf = std::log((1.0 - ax / len) / len);
        double rem = len - ax;  // distance to the support edge
        if (x == 0.0) return {lf, 0.0, -1.0 / (rem * rem), true};
        double s = x > 0.0 ? 1.0 : -1.0;
        return {lf, -s / rem, -1.0 / (rem * rem), false};
      }
      case PriorKind::PlanckTaper:
      case PriorKind::Empirical:
        return fd_log_derivs(x);
    }
    return {};
  }

  double sample(std::mt19937_64& g) const {
    switch (kind_) {
      case PriorKind::Uniform:
        return quite::uniform(g, a_, b_);
      case PriorKind::Gaussian:
        return quite::normal(g, mu_, std::sqrt(var_));
      case PriorKind::TriangularDifference:
        return quite::uniform(g, a_, b_) - quite::uniform(g, a_, b_);
      case PriorKind::PlanckTaper: {
        // rejection from the plateau-height box; acceptance (b-a-z)/(b-a)
        for (;;) {
          double x = quite::uniform(g, a_, b_);
          if (uniform01(g) * cp_ <= planck_density(x)) return x;
        }
      }
      case PriorKind::Empirical: {
        if (grid_.empty()) throw std::logic_error("empirical prior without data");
        return sample_grid(g);
      }
    }
    return 0.0;
  }

  std::vector<double> sample_n(std::mt19937_64& g, std::size_t n) const {
    if (n < 1) throw std::invalid_argument("sample_n: need n >= 1");
    std::vector<double> out(n);
    for (auto& v : out) v = sample(g);
    return out;
  }

  double mean() const {
    switch (kind_) {
      case PriorKind::Uniform: return 0.5 * (a_ + b_);
      case PriorKind::PlanckTaper: return 0.5 * (a_ + b_);  // even about center
      case PriorKind::Gaussian: return mu_;
      case PriorKind::TriangularDifference: return 0.0;
      case PriorKind::Empirical: {
        double m = 0.0, w = 0.0;
        double h = (hi_ - lo_) / (grid_.size() - 1);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
          double c = (i == 0 || i + 1 == grid_.size()) ? 0.5 : 1.0;  // trapezoid
          m += c * grid_[i] * (lo_ + h * i);
          w += c * grid_[i];
        }
        return m / w;
      }
    }
    return 0.0;
  }

 private:
  Prior(PriorKind k, double lo, double hi) : kind_(k), lo_(lo), hi_(hi) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  double planck_density(double x) const {
    if (x <= a_ || x >= b_) return 0.0;
    if (x < a_ + z_) {
      double t = z_ * (1.0 / (x - a_) - 1.0 / (a_ + z_ - x));
      return cp_ / (1.0 + std::exp(t));
    }
    if (x > b_ - z_) {
      double t = z_ * (1.0 / (b_ - x) - 1.0 / (x - b_ + z_));
      return cp_ / (1.0 + std::exp(t));
    }
    return cp_;
  }

  LogDensityDerivs fd_log_derivs(double x) const {
    double h = 1e-5 * (hi_ - lo_);
    if (x - h <= lo_ || x + h >= hi_)
      throw std::domain_error("log_density_derivs: too close to support edge");
    double f0 = density(x), fp = density(x + h), fm = density(x - h);
    if (!(f0 > 0.0 && fp > 0.0 && fm > 0.0))
      throw std::domain_error("log_density_derivs: density vanishes here");
    double l0 = std::log(f0), lp = std::log(fp), lm = std::log(fm);
    return {l0, (lp - lm) / (2.0 * h), (lp - 2.0 * l0 + lm) / (h * h), false};
  }

  void build_cdf() {
    cdf_.assign(grid_.size(), 0.0);
    double h = (hi_ - lo_) / (grid_.size() - 1);
    for (std::size_t i = 1; i < grid_.size(); ++i)
      cdf_[i] = cdf_[i - 1] + 0.5 * h * (grid_[i - 1] + grid_[i]);
    double total = cdf_.back();
    require(total > 0.0, "empirical: density integrates to zero");
    for (auto& c : cdf_) c /= total;
  }

  double sample_grid(std::mt19937_64& g) const {
    double u = uniform01(g);
    std::size_t lo = 0, hi = cdf_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (cdf_[mid] <= u ? lo : hi) = mid;
    }
    double h = (hi_ - lo_) / (grid_.size() - 1);
    double span = cdf_[hi] - cdf_[lo];
    double frac = span > 0.0 ? (u - cdf_[lo]) / span : 0.5;
    return lo_ + h * (static_cast<double>(lo) + frac);
  }

  PriorKind kind_;
  double lo_, hi_;
  double a_ = 0.0, b_ = 0.0;       // uniform / taper / triangle parents
  double z_ = 0.0, cp_ = 0.0;      // taper width, plateau height
  double mu_ = 0.0, var_ = 1.0;    // gaussian
  std::vector<double> grid_;       // empirical density values
  std::vector<double> cdf_;        // empirical normalized CDF at grid nodes
};

}  // namespace quite
