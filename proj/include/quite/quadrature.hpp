#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace quite {

// Adaptive Gauss-Kronrod on [a, b].  `tol` is the relative error target;
// for the well-scaled integrands used here it also bounds the absolute error.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      std::forward<F>(f), a, b, 12, tol);
}

// Tensor-product expectation E[h(x, y)] with independent densities fx, fy.
template <class Fx, class Fy, class H>
double expect2d(Fx&& fx, double ax, double bx, Fy&& fy, double ay, double by,
                H&& h, double tol = 1e-6) {
  auto outer = [&](double x) {
    auto inner = [&](double y) { return fy(y) * h(x, y); };
    return fx(x) * integrate(inner, ay, by, tol * 0.1);
  };
  return integrate(outer, ax, bx, tol);
}

}  // namespace quite
