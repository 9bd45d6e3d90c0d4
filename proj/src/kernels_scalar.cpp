#include <cmath>

#include "quite/kernels.hpp"

namespace quite::kernels::detail {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;

inline double btl_ratio(double x) {
  if (x <= 0.0) return 1.0 / (1.0 + std::exp(x));
  double e = std::exp(-x);
  return e / (1.0 + e);
}

inline double thu_ratio(double x) {
  if (x >= 0.0) {
    double phi = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return phi / (0.5 * std::erfc(-x * kInvSqrt2));
  }
  return kSqrt2OverPi / erfcx(-x * kInvSqrt2);
}

}  // namespace

double deriv_sum_scalar(ModelKind m, const double* s, std::size_t n, double t) {
  double acc = 0.0;
  if (m == ModelKind::Btl) {
    for (std::size_t i = 0; i < n; ++i) acc += s[i] * btl_ratio(s[i] * t);
  } else {
    for (std::size_t i = 0; i < n; ++i) acc += s[i] * thu_ratio(s[i] * t);
  }
  return acc;
}

double curvature_sum_scalar(ModelKind m, const double* s, std::size_t n,
                            double t) {
  double acc = 0.0;
  if (m == ModelKind::Btl) {
    for (std::size_t i = 0; i < n; ++i) {
      double r = btl_ratio(s[i] * t);
      acc += s[i] * s[i] * (-r * (1.0 - r));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double x = s[i] * t;
      double r = thu_ratio(x);
      acc += s[i] * s[i] * (-r * (x + r));
    }
  }
  return acc;
}

double fisher_sum_scalar(ModelKind m, const double* r, std::size_t n,
                         double t) {
  double acc = 0.0;
  if (m == ModelKind::Btl) {
    for (std::size_t i = 0; i < n; ++i) {
      double x = r[i] * t;
      acc += r[i] * r[i] * btl_ratio(x) * btl_ratio(-x);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      double x = r[i] * t;
      acc += r[i] * r[i] * thu_ratio(x) * thu_ratio(-x);
    }
  }
  return acc;
}

void ratio_fill_scalar(ModelKind m, const double* x, std::size_t n,
                       double* out) {
  if (m == ModelKind::Btl) {
    for (std::size_t i = 0; i < n; ++i) out[i] = btl_ratio(x[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = thu_ratio(x[i]);
  }
}

}  // namespace quite::kernels::detail

namespace quite::kernels {

double log_f_sum(ModelKind m, const double* x, std::size_t n) {
  WorkerModel model(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += model.log_F(x[i]);
  return acc;
}

}  // namespace quite::kernels
