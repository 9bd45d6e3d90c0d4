#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support/test_common.hpp"

#include <limits>

#include "quite/priors.hpp"
#include "quite/quadrature.hpp"
#include "quite/worker_model.hpp"

using quite::ModelKind;
using quite::Prior;
using quite::WorkerModel;

TEST_CASE("F values match the comparison laws") {
  WorkerModel btl(ModelKind::Btl), thu(ModelKind::Thurstone);
  CHECK(btl.F(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(btl.F(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(thu.F(0.0) == doctest::Approx(0.5).epsilon(1e-15));

  auto g = testutil::rng(7);
  for (int i = 0; i < 200; ++i) {
    double x = quite::uniform(g, -10.0, 10.0);
    CHECK(std::fabs(thu.F(x) + thu.F(-x) - 1.0) < 1e-12);
    CHECK(std::fabs(btl.F(x) + btl.F(-x) - 1.0) < 1e-12);
    CHECK(btl.F(x) > 0.0);
    CHECK(btl.F(x) < 1.0);
  }
  CHECK_THROWS_AS(btl.F(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK_THROWS_AS(thu.F(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("F derivatives are analytic and match finite differences") {
  WorkerModel btl(ModelKind::Btl), thu(ModelKind::Thurstone);
  CHECK(btl.F_derivs(0.0).d1 == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(thu.F_derivs(0.0).d2 == doctest::Approx(0.0).epsilon(1e-14));

  for (double x : {-3.0, -1.0, 0.5, 2.0}) {
    double fd = testutil::fd1([&](double t) { return btl.F(t); }, x);
    CHECK(std::fabs(btl.F_derivs(x).d1 - fd) < 1e-6);
    double fd_t = testutil::fd1([&](double t) { return thu.F(t); }, x);
    CHECK(std::fabs(thu.F_derivs(x).d1 - fd_t) < 1e-6);
    double fd2_b = testutil::fd2([&](double t) { return btl.F(t); }, x);
    CHECK(std::fabs(btl.F_derivs(x).d2 - fd2_b) < 1e-5);
  }
}

TEST_CASE("answer probability follows Eq-style signed composition") {
  WorkerModel btl(ModelKind::Btl), thu(ModelKind::Thurstone);
  CHECK(btl.answer_probability(1.0, 0.0, 0) == doctest::Approx(0.5));
  double p = std::exp(1.0) / (1.0 + std::exp(1.0));
  CHECK(btl.answer_probability(2.0, 0.5, 0) == doctest::Approx(p).epsilon(1e-12));
  auto g = testutil::rng(3);
  for (int i = 0; i < 50; ++i) {
    double rho = quite::uniform(g, 0.2, 20.0);
    double d = quite::uniform(g, -1.0, 1.0);
    for (const WorkerModel& m : {btl, thu}) {
      double s = m.answer_probability(rho, d, 0) + m.answer_probability(rho, d, 1);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(btl.answer_probability(0.0, 0.1, 0), std::domain_error);
  CHECK_THROWS_AS(btl.answer_probability(-1.0, 0.1, 0), std::domain_error);
}

TEST_CASE("log F is log-concave for both models") {
  auto g = testutil::rng(11);
  for (ModelKind kind : {ModelKind::Btl, ModelKind::Thurstone}) {
    WorkerModel m(kind);
    for (int i = 0; i < 1000; ++i) {
      double a = quite::uniform(g, -10.0, 10.0);
      double b = quite::uniform(g, -10.0, 10.0);
      double c = quite::uniform(g, -10.0, 10.0);
      double x1 = std::min({a, b, c}), x3 = std::max({a, b, c});
      double x2 = a + b + c - x1 - x3;
      if (x3 - x1 < 1e-9) continue;
      double lerp = m.log_F(x1) +
                    (m.log_F(x3) - m.log_F(x1)) * (x2 - x1) / (x3 - x1);
      CHECK(m.log_F(x2) >= lerp - 1e-12);
    }
  }
}

TEST_CASE("Fisher factor matches the closed particularizations") {
  WorkerModel btl(ModelKind::Btl), thu(ModelKind::Thurstone);
  for (int i = 0; i <= 100; ++i) {
    double x = -5.0 + 0.1 * i;
    double btl_expect = std::exp(x) / ((1.0 + std::exp(x)) * (1.0 + std::exp(x)));
    CHECK(std::fabs(btl.fisher(x) - btl_expect) < 1e-12);
    double er = std::erf(x / std::sqrt(2.0));
    double thu_expect = (2.0 / M_PI) * std::exp(-x * x) / (1.0 - er * er);
    CHECK(std::fabs(thu.fisher(x) - thu_expect) < 1e-9);
  }
}

TEST_CASE("log F, ratio and curvature stay finite and consistent deep in the tails") {
  for (ModelKind kind : {ModelKind::Btl, ModelKind::Thurstone}) {
    WorkerModel m(kind);
    for (double x : {-50.0, -20.0, -8.5, -7.9, -3.0, 0.0, 4.0, 40.0}) {
      CHECK(std::isfinite(m.log_F(x)));
      CHECK(m.ratio(x) >= 0.0);
      CHECK(std::isfinite(m.ratio(x)));
      CHECK(m.log_curvature(x) < 0.0);
      // ratio == d/dx log F by finite differences where the scale permits
      if (x > -20.0 && x < 20.0) {
        double fd = testutil::fd1([&](double t) { return m.log_F(t); }, x);
        CHECK(m.ratio(x) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("priors integrate to one") {
  auto mass = [](const Prior& p) {
    return quite::integrate([&](double x) { return p.density(x); }, p.lo(),
                            p.hi(), 1e-10);
  };
  CHECK(mass(Prior::uniform(0, 1)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mass(Prior::uniform(1, 20)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mass(Prior::planck_taper(0, 1, 0.2)) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mass(Prior::planck_taper(1, 20, 3.8)) ==
        doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mass(Prior::gaussian(0, 1)) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(mass(Prior::triangular_difference(0, 1)) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("log density derivatives: closed forms and flags") {
  Prior g01 = Prior::gaussian(0.0, 1.0);
  auto d = g01.log_density_derivs(0.0);
  CHECK(d.log_f == doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));
  CHECK(d.d1 == doctest::Approx(0.0));
  CHECK(d.d2 == doctest::Approx(-1.0));
  CHECK_FALSE(d.kink);

  Prior tri = Prior::triangular_difference(0.0, 1.0);
  auto t0 = tri.log_density_derivs(0.0);
  CHECK(t0.kink);
  CHECK(t0.d1 == doctest::Approx(0.0));
  auto tpos = tri.log_density_derivs(0.25);
  CHECK(tpos.d1 == doctest::Approx(-1.0 / 0.75).epsilon(1e-12));
  CHECK_FALSE(tpos.kink);

  Prior pt = Prior::planck_taper(0.0, 1.0, 0.2);
  auto plateau = pt.log_density_derivs(0.5);
  CHECK(plateau.d1 == doctest::Approx(0.0).epsilon(1e-9));
  // rising taper has positive slope of log f
  CHECK(pt.log_density_derivs(0.1).d1 > 0.0);
  CHECK(pt.log_density_derivs(0.9).d1 < 0.0);

  CHECK_THROWS_AS(pt.log_density_derivs(1.5), std::domain_error);
  CHECK_THROWS_AS(pt.log_density_derivs(1.0), std::domain_error);
  CHECK_THROWS_AS(Prior::uniform(0, 1).log_density_derivs(1.0),
                  std::domain_error);
}

TEST_CASE("planck taper is continuous and symmetric with exact unit mass") {
  Prior pt = Prior::planck_taper(0.0, 1.0, 0.2);
  double cp = 1.0 / (1.0 - 0.2);
  CHECK(pt.density(0.5) == doctest::Approx(cp));
  CHECK(pt.density(0.2) == doctest::Approx(cp).epsilon(1e-9));
  CHECK(pt.density(0.8) == doctest::Approx(cp).epsilon(1e-9));
  CHECK(pt.density(0.0) == 0.0);
  CHECK(pt.density(1.0) == 0.0);
  // taper halves sum to the plateau height pointwise
  for (double t : {0.02, 0.05, 0.1, 0.15}) {
    CHECK(pt.density(t) + pt.density(0.2 - t) == doctest::Approx(cp).epsilon(1e-12));
    CHECK(pt.density(t) == doctest::Approx(pt.density(1.0 - t)).epsilon(1e-12));
  }
}

TEST_CASE("prior sampling: moments, support, determinism") {
  auto g = quite::substream(42, quite::Stream::PriorSample);
  Prior u01 = Prior::uniform(0.0, 1.0);
  auto xs = u01.sample_n(g, 100000);
  CHECK(std::fabs(testutil::mean(xs) - 0.5) < 0.01);

  auto g2 = quite::substream(42, quite::Stream::PriorSample, 1);
  Prior u120 = Prior::uniform(1.0, 20.0);
  auto ys = u120.sample_n(g2, 100000);
  for (double y : ys) {
    CHECK(y >= 1.0);
    CHECK(y <= 20.0);
  }

  auto ga = quite::substream(7, quite::Stream::PriorSample);
  auto gb = quite::substream(7, quite::Stream::PriorSample);
  CHECK(u01.sample_n(ga, 1000) == u01.sample_n(gb, 1000));

  CHECK_THROWS(u01.sample_n(ga, 0));
}

TEST_CASE("planck taper samples match the quadrature CDF (KS < 0.01)") {
  Prior pt = Prior::planck_taper(0.0, 1.0, 0.2);
  auto g = quite::substream(99, quite::Stream::PriorSample);
  const int n = 100000;
  std::vector<double> xs = pt.sample_n(g, n);
  std::sort(xs.begin(), xs.end());
  auto cdf = [&](double x) {
    return quite::integrate([&](double t) { return pt.density(t); }, 0.0, x,
                            1e-9);
  };
  // evaluate the exact CDF on a grid and interpolate to keep the test fast
  const int grid = 512;
  std::vector<double> cg(grid + 1);
  for (int i = 0; i <= grid; ++i) cg[i] = cdf(static_cast<double>(i) / grid);
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = xs[i] * grid;
    int j = std::min(static_cast<int>(x), grid - 1);
    double c = cg[j] + (cg[j + 1] - cg[j]) * (x - j);
    ks = std::max(ks, std::fabs(c - (i + 1.0) / n));
    ks = std::max(ks, std::fabs(c - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("empirical prior requires data") {
  CHECK_THROWS_AS(Prior::empirical(0.0, 1.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(Prior::empirical(0.0, 1.0, {1.0}), std::invalid_argument);
}
