#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/test_common.hpp"

#include <cstring>
#include <string>

#include "quite/kernels.hpp"
#include "quite/worker_model.hpp"

namespace k = quite::kernels;
using quite::ModelKind;
using quite::WorkerModel;

namespace {

std::vector<double> random_signs(std::mt19937_64& g, std::size_t n,
                                 double lo = 0.5, double hi = 25.0) {
  std::vector<double> s(n);
  for (auto& v : s) {
    v = quite::uniform(g, lo, hi);
    if (quite::bernoulli(g, 0.5)) v = -v;
  }
  return s;
}

bool close_rel(double a, double b, double tol) {
  return std::fabs(a - b) <= tol * (1.0 + std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace

TEST_CASE("scalar kernels agree with the model definitions") {
  auto g = testutil::rng(21);
  for (ModelKind kind : {ModelKind::Btl, ModelKind::Thurstone}) {
    WorkerModel m(kind);
    for (std::size_t n : {0u, 1u, 3u, 17u, 64u}) {
      auto s = random_signs(g, n);
      double t = quite::uniform(g, -1.2, 1.2);
      double ds = 0.0, cs = 0.0, fs = 0.0, ls = 0.0;
      for (double v : s) {
        ds += v * m.ratio(v * t);
        cs += v * v * m.log_curvature(v * t);
        fs += v * v * m.fisher(v * t);
        ls += m.log_F(v * t);
      }
      CHECK(close_rel(k::detail::deriv_sum_scalar(kind, s.data(), n, t), ds, 1e-11));
      CHECK(close_rel(k::detail::curvature_sum_scalar(kind, s.data(), n, t), cs, 1e-11));
      CHECK(close_rel(k::detail::fisher_sum_scalar(kind, s.data(), n, t), fs, 1e-11));
      CHECK(close_rel(k::log_f_sum(kind, s.data(), n), [&] {
              double acc = 0.0;
              for (double v : s) acc += m.log_F(v);
              return acc;
            }(), 1e-11));
      std::vector<double> out(n);
      k::detail::ratio_fill_scalar(kind, s.data(), n, out.data());
      for (std::size_t i = 0; i < n; ++i)
        CHECK(close_rel(out[i], m.ratio(s[i]), 1e-12));
    }
  }
}

#ifdef QUITE_HAVE_AVX2_KERNELS
TEST_CASE("avx2 kernels are equivalent to the scalar reference") {
  if (!(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))) {
    MESSAGE("no AVX2+FMA on this host, skipping");
    return;
  }
  auto g = testutil::rng(22);
  for (ModelKind kind : {ModelKind::Btl, ModelKind::Thurstone}) {
    for (std::size_t n : {0u, 1u, 4u, 7u, 8u, 9u, 33u, 128u, 255u}) {
      for (double t : {-1.3, -0.4, 0.0, 0.05, 0.9, 30.0, -30.0}) {
        auto s = random_signs(g, n);
        CHECK(close_rel(k::detail::deriv_sum_avx2(kind, s.data(), n, t),
                        k::detail::deriv_sum_scalar(kind, s.data(), n, t),
                        1e-11));
        CHECK(close_rel(k::detail::curvature_sum_avx2(kind, s.data(), n, t),
                        k::detail::curvature_sum_scalar(kind, s.data(), n, t),
                        1e-11));
        CHECK(close_rel(k::detail::fisher_sum_avx2(kind, s.data(), n, t),
                        k::detail::fisher_sum_scalar(kind, s.data(), n, t),
                        1e-11));
        std::vector<double> xs(n), a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) xs[i] = s[i] * t;
        k::detail::ratio_fill_avx2(kind, xs.data(), n, a.data());
        k::detail::ratio_fill_scalar(kind, xs.data(), n, b.data());
        for (std::size_t i = 0; i < n; ++i) CHECK(close_rel(a[i], b[i], 1e-11));
      }
    }
  }
}

TEST_CASE("avx2 kernels survive extreme arguments") {
  if (!(__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))) return;
  std::vector<double> s = {1e-3, -1e-3, 25.0, -25.0, 0.7, -0.7, 12.0, -12.0};
  for (ModelKind kind : {ModelKind::Btl, ModelKind::Thurstone}) {
    for (double t : {-600.0, -100.0, 100.0, 600.0}) {
      double d = k::detail::deriv_sum_avx2(kind, s.data(), s.size(), t);
      double c = k::detail::curvature_sum_avx2(kind, s.data(), s.size(), t);
      double f = k::detail::fisher_sum_avx2(kind, s.data(), s.size(), t);
      CHECK(std::isfinite(d));
      CHECK(std::isfinite(c));
      CHECK(std::isfinite(f));
      CHECK(close_rel(d, k::detail::deriv_sum_scalar(kind, s.data(), s.size(), t), 1e-9));
      CHECK(close_rel(c, k::detail::curvature_sum_scalar(kind, s.data(), s.size(), t), 1e-9));
      CHECK(close_rel(f, k::detail::fisher_sum_scalar(kind, s.data(), s.size(), t), 1e-9));
    }
  }
}
#endif

TEST_CASE("dispatch reports a valid backend") {
  std::string b = k::backend();
  CHECK((b == "avx2" || b == "scalar"));
#ifdef QUITE_HAVE_AVX2_KERNELS
  const char* env = std::getenv("QUITE_KERNELS");
  bool forced = env && std::strcmp(env, "scalar") == 0;
  if (!forced && __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    CHECK(b == "avx2");
#endif
}
