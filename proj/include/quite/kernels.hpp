#pragma once

#include <cstddef>

#include "quite/worker_model.hpp"

// Data-parallel inner loops of the estimators.  Each operation has a scalar
// reference implementation and (on x86-64 with AVX2+FMA) a vectorized variant
// selected at runtime; the two are equivalence-tested against each other.
//
// Notation: R(x) = d/dx log F(x), C(x) = d^2/dx^2 log F(x),
// g(x) = F'(x)^2 / (F(x)(1-F(x))) = R(x) R(-x).  All match WorkerModel's
// scalar definitions, tail-stable with no clamping.
namespace quite::kernels {

// sum_i s[i] * R(s[i] * t) — gradient of a MAP log-likelihood in t.
double deriv_sum(ModelKind m, const double* s, std::size_t n, double t);

// sum_i s[i]^2 * C(s[i] * t) — curvature of the same log-likelihood.
double curvature_sum(ModelKind m, const double* s, std::size_t n, double t);

// sum_i r[i]^2 * g(r[i] * t) — Fisher-information numerator.
double fisher_sum(ModelKind m, const double* r, std::size_t n, double t);

// out[i] = R(x[i]).
void ratio_fill(ModelKind m, const double* x, std::size_t n, double* out);

// sum_i log max(F(x[i]), clamp).  Not on a hot path; always scalar.
double log_f_sum(ModelKind m, const double* x, std::size_t n);

// "avx2" or "scalar".  Honors QUITE_KERNELS=scalar in the environment.
const char* backend();

namespace detail {

double deriv_sum_scalar(ModelKind m, const double* s, std::size_t n, double t);
double curvature_sum_scalar(ModelKind m, const double* s, std::size_t n, double t);
double fisher_sum_scalar(ModelKind m, const double* r, std::size_t n, double t);
void ratio_fill_scalar(ModelKind m, const double* x, std::size_t n, double* out);

#if defined(__x86_64__) || defined(__i386__)
#define QUITE_HAVE_AVX2_KERNELS 1
double deriv_sum_avx2(ModelKind m, const double* s, std::size_t n, double t);
double curvature_sum_avx2(ModelKind m, const double* s, std::size_t n, double t);
double fisher_sum_avx2(ModelKind m, const double* r, std::size_t n, double t);
void ratio_fill_avx2(ModelKind m, const double* x, std::size_t n, double* out);
#endif

bool avx2_selected();

}  // namespace detail
}  // namespace quite::kernels
