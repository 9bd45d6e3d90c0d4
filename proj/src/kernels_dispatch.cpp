#include <cstdlib>
#include <cstring>

#include "quite/kernels.hpp"

namespace quite::kernels {

namespace {

struct Table {
  double (*deriv)(ModelKind, const double*, std::size_t, double);
  double (*curv)(ModelKind, const double*, std::size_t, double);
  double (*fisher)(ModelKind, const double*, std::size_t, double);
  void (*ratio)(ModelKind, const double*, std::size_t, double*);
  bool avx2;
};

Table make_table() {
  Table t{detail::deriv_sum_scalar, detail::curvature_sum_scalar,
          detail::fisher_sum_scalar, detail::ratio_fill_scalar, false};
#ifdef QUITE_HAVE_AVX2_KERNELS
  const char* env = std::getenv("QUITE_KERNELS");
  bool forced_scalar = env && std::strcmp(env, "scalar") == 0;
  if (!forced_scalar && __builtin_cpu_supports("avx2") &&
      __builtin_cpu_supports("fma")) {
    t = {detail::deriv_sum_avx2, detail::curvature_sum_avx2,
         detail::fisher_sum_avx2, detail::ratio_fill_avx2, true};
  }
#endif
  return t;
}

const Table& table() {
  static const Table t = make_table();
  return t;
}

}  // namespace

double deriv_sum(ModelKind m, const double* s, std::size_t n, double t) {
  return table().deriv(m, s, n, t);
}

double curvature_sum(ModelKind m, const double* s, std::size_t n, double t) {
  return table().curv(m, s, n, t);
}

double fisher_sum(ModelKind m, const double* r, std::size_t n, double t) {
  return table().fisher(m, r, n, t);
}

void ratio_fill(ModelKind m, const double* x, std::size_t n, double* out) {
  table().ratio(m, x, n, out);
}

const char* backend() { return table().avx2 ? "avx2" : "scalar"; }

namespace detail {
bool avx2_selected() { return table().avx2; }
}

}  // namespace quite::kernels
