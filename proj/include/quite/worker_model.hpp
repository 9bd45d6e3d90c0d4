#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace quite {

enum class ModelKind { Btl, Thurstone };

inline const char* to_string(ModelKind k) {
  return k == ModelKind::Btl ? "btl" : "thurstone";
}

inline ModelKind model_from_string(const std::string& s) {
  if (s == "btl" || s == "BTL") return ModelKind::Btl;
  if (s == "thurstone" || s == "Thurstone") return ModelKind::Thurstone;
  throw std::invalid_argument("unknown worker model: " + s);
}

// Scaled complementary error function e^{u^2} erfc(u) for u >= 0; direct
// product up to u = 10, asymptotic series beyond (full double precision).
inline double erfcx(double u) {
  if (u < 10.0) return std::erfc(u) * std::exp(u * u);
  double s = 1.0, term = 1.0, iu2 = 1.0 / (2.0 * u * u);
  for (int k = 1; k < 80; ++k) {
    term *= -(2.0 * k - 1.0) * iu2;
    s += term;
    if (std::fabs(term) < 1e-19 * std::fabs(s)) break;
  }
  return s / (u * 1.7724538509055160273);  // sqrt(pi)
}

struct FDerivs {
  double f;    // F(x)
  double d1;   // F'(x)
  double d2;   // F''(x)
};

// Comparison law F(x): probability that the first object of a pair wins when
// the scaled quality gap is x = rho * d.  Strictly increasing, F(0) = 1/2,
// F(-x) = 1 - F(x), log-concave for both models.  log F and its derivatives
// are computed in forms that stay finite and accurate deep into the tails,
// so MAP objectives never hit -inf and keep their strict concavity.
struct WorkerModel {
  ModelKind kind;

  explicit WorkerModel(ModelKind k = ModelKind::Btl) : kind(k) {}

  double F(double x) const {
    check_finite(x);
    if (kind == ModelKind::Btl) {
      if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
      double e = std::exp(x);
      return e / (1.0 + e);
    }
    return 0.5 * std::erfc(-x * kInvSqrt2);
  }

  FDerivs F_derivs(double x) const {
    check_finite(x);
    if (kind == ModelKind::Btl) {
      double f = F(x);
      double d1 = f * (1.0 - f);
      return {f, d1, d1 * (1.0 - 2.0 * f)};
    }
    double f = F(x);
    double d1 = kInvSqrt2Pi * std::exp(-0.5 * x * x);
    return {f, d1, -x * d1};
  }

  // P(answer w | reliability rho, distance d) = F((1-2w) rho d).
  double answer_probability(double rho, double d, int w) const {
    if (!(rho > 0.0)) throw std::domain_error("reliability must be positive");
    return F((1.0 - 2.0 * w) * rho * d);
  }

  double log_F(double x) const {
    check_finite(x);
    if (kind == ModelKind::Btl)
      return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
    if (x >= 0.0) return std::log(F(x));
    double u = -x * kInvSqrt2;
    return -u * u + std::log(0.5 * erfcx(u));
  }

  // R(x) = d/dx log F(x) = F'(x)/F(x); positive and strictly decreasing.
  double ratio(double x) const {
    check_finite(x);
    if (kind == ModelKind::Btl) {
      if (x <= 0.0) return 1.0 / (1.0 + std::exp(x));
      double e = std::exp(-x);
      return e / (1.0 + e);
    }
    if (x >= 0.0) {
      double phi = kInvSqrt2Pi * std::exp(-0.5 * x * x);
      return phi / F(x);
    }
    return kSqrt2OverPi / erfcx(-x * kInvSqrt2);
  }

  // C(x) = d^2/dx^2 log F(x); strictly negative for both models.
  double log_curvature(double x) const {
    double r = ratio(x);
    if (kind == ModelKind::Btl) return -r * (1.0 - r);  // = -F'(x)
    return -r * (x + r);                                // R' for the probit
  }

  // Fisher factor F'(x)^2 / (F(x)(1-F(x))) = R(x) R(-x); stable at any x.
  double fisher(double x) const { return ratio(x) * ratio(-x); }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
  static constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;
  static constexpr double kSqrt2OverPi = 0.79788456080286535587989211986876;

  static void check_finite(double x) {
    if (!std::isfinite(x)) throw std::domain_error("non-finite model argument");
  }
};

}  // namespace quite
