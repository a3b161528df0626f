#include <cmath>
#include <numbers>

#include "doctest.h"
#include "errors.hpp"
#include "geometry/envelopes.hpp"
#include "geometry/metric.hpp"

using namespace nullfol;
using namespace nullfol::geometry;

namespace {
// 40-digit bisection on the implicit relation (mpmath), frozen
constexpr double kR_u01_s2 = 3.0670329560723804568;
constexpr double kR_u01_s5 = 6.0834481177606478046;
constexpr double kOmegaSq_u01_s5 = 1.0027434479967708029;
}  // namespace

TEST_CASE("area radius") {
  SchwarzschildParams p;
  CHECK(solve_area_radius(p, 0.0, 0.0).r == 1.0);
  CHECK(solve_area_radius(p, 0.2, 0.0).r == 1.0);
  CHECK(solve_area_radius(p, 0.1, 2.0).r == doctest::Approx(kR_u01_s2).epsilon(1e-14));
  CHECK(solve_area_radius(p, 0.1, 5.0).r == doctest::Approx(kR_u01_s5).epsilon(1e-14));
  CHECK(solve_area_radius(p, -0.3, -0.2).r < 1.0);
  CHECK(solve_area_radius(p, -0.3, -0.2).r > 0.0);
  CHECK_THROWS_AS(solve_area_radius(p, 0.6, 1.0), Error);
  CHECK_THROWS_AS(solve_area_radius(p, 0.0, -0.6), Error);
  // inside the strip but without a positive root
  try {
    solve_area_radius(p, 0.45, -0.45);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DomainError);
  }
}

TEST_CASE("area radius residual and monotonicity on a lattice") {
  SchwarzschildParams p;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double us = -0.49 + 0.98 * i / 99.0;
    double prev = 0.0;
    for (int j = 0; j < 100; ++j) {
      const double s = -0.2 + 100.2 * std::pow(j / 99.0, 2.0);
      const auto sol = solve_area_radius(p, us, s);
      worst = std::max(worst, sol.residual);
      if (j > 0) CHECK(sol.r > prev);
      prev = sol.r;
    }
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("Omega_S^2 closed forms") {
  SchwarzschildParams p;
  CHECK(schwarzschild_omega_sq(p, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(schwarzschild_omega_sq(p, 0.3, 0.0) == doctest::Approx(std::exp(0.3)).epsilon(1e-14));
  CHECK(schwarzschild_omega_sq(p, 0.1, 5.0) == doctest::Approx(kOmegaSq_u01_s5).epsilon(1e-13));
  double worst = 0.0;
  for (double us : {-0.45, -0.1, 0.0, 0.2, 0.45})
    for (double s : {-0.1, -1e-9, 1e-9, 1e-6, 0.3, 3.0, 30.0, 100.0}) {
      const double a = schwarzschild_omega_sq(p, us, s), b = schwarzschild_omega_sq_alt(p, us, s);
      worst = std::max(worst, std::abs(a - b));
    }
  CHECK(worst < 1e-10);

  // us-derivatives of log Omega_S^2 against central differences
  const double h = 1e-4;
  auto lj = schwarzschild_log_omega_sq(p, 0.1, 2.0);
  auto lp = schwarzschild_log_omega_sq(p, 0.1 + h, 2.0), lm = schwarzschild_log_omega_sq(p, 0.1 - h, 2.0);
  CHECK(lj.d_u == doctest::Approx((lp.value - lm.value) / (2 * h)).epsilon(1e-7));
  CHECK(lj.d_uu == doctest::Approx((lp.d_u - lm.d_u) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("background metric reduction") {
  auto grid = sphere::SphereGrid::create({16, 32, 10});
  MetricFamily fam({}, PerturbationProfile::generate(0.0, 3), grid);
  for (int node : {0, 77, 300}) {
    MetricSample m = fam.eval(node, 0.15, 1.5);
    for (double v : m.b.v) CHECK(v == 0.0);
    const double r = solve_area_radius({}, 0.15, 1.5).r;
    auto g = m.gslash_dyad();
    CHECK(g[0] == doctest::Approx(r * r).epsilon(1e-14));
    CHECK(g[1] == doctest::Approx(0.0));
    CHECK(g[2] == doctest::Approx(r * r).epsilon(1e-14));
    CHECK(m.omega_sq.v == doctest::Approx(schwarzschild_omega_sq({}, 0.15, 1.5)).epsilon(1e-14));
  }
}

TEST_CASE("b vanishes on us = 0") {
  auto grid = sphere::SphereGrid::create({16, 32, 10});
  MetricFamily fam({}, PerturbationProfile::generate(0.01, 5), grid);
  MetricSample m = fam.eval(40, 0.0, 3.0);
  for (double v : m.b.v) CHECK(v == 0.0);
  for (double v : m.b.d) CHECK(v == 0.0);
}

TEST_CASE("metric derivatives against finite differences") {
  auto grid = sphere::SphereGrid::create({16, 32, 10});
  MetricFamily fam({}, PerturbationProfile::generate(0.01, 9), grid);
  const double th = 1.1, ph = 0.7, us = 0.2, s = 1.3, h = 1e-5;
  MetricSample m = fam.eval_at(th, ph, us, s);
  MetricSample up = fam.eval_at(th, ph, us + h, s), um = fam.eval_at(th, ph, us - h, s);
  MetricSample tp = fam.eval_at(th + h, ph, us, s), tm = fam.eval_at(th - h, ph, us, s);
  MetricSample pp = fam.eval_at(th, ph + h, us, s), pm = fam.eval_at(th, ph - h, us, s);
  const double st = std::sin(th);

  // Omega^2
  CHECK(m.omega_sq.u == doctest::Approx((up.omega_sq.v - um.omega_sq.v) / (2 * h)).epsilon(1e-8));
  CHECK(m.omega_sq.uu == doctest::Approx((up.omega_sq.u - um.omega_sq.u) / (2 * h)).epsilon(1e-8));
  auto dot = [](const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  CHECK(dot(m.omega_sq.d, m.e_theta) ==
        doctest::Approx((tp.omega_sq.v - tm.omega_sq.v) / (2 * h)).epsilon(1e-6));
  CHECK(dot(m.omega_sq.d, m.e_phi) ==
        doctest::Approx((pp.omega_sq.v - pm.omega_sq.v) / (2 * h) / st).epsilon(1e-6));
  CHECK(dot(m.omega_sq.du, m.e_theta) ==
        doctest::Approx((up.omega_sq.d[0] * m.e_theta[0] + up.omega_sq.d[1] * m.e_theta[1] +
                         up.omega_sq.d[2] * m.e_theta[2] - dot(um.omega_sq.d, m.e_theta)) / (2 * h))
            .epsilon(1e-6));
  // nabla_theta nabla_theta w = d_theta^2 w on the unit sphere
  double hth = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) hth += m.e_theta[a] * m.omega_sq.dd[a + 3 * c] * m.e_theta[c];
  CHECK(hth == doctest::Approx(dot(tp.omega_sq.d, tp.e_theta) / (2 * h) - dot(tm.omega_sq.d, tm.e_theta) / (2 * h))
                   .epsilon(1e-5));

  // b and gslash: us-derivatives and theta-derivative projected on the tangent plane
  for (int a = 0; a < 3; ++a) {
    CHECK(m.b.u[a] == doctest::Approx((up.b.v[a] - um.b.v[a]) / (2 * h)).epsilon(1e-6).scale(1e-3));
    CHECK(m.b.uu[a] == doctest::Approx((up.b.u[a] - um.b.u[a]) / (2 * h)).epsilon(1e-6).scale(1e-3));
  }
  for (int i = 0; i < 9; ++i) {
    CHECK(m.gslash.u[i] == doctest::Approx((up.gslash.v[i] - um.gslash.v[i]) / (2 * h)).epsilon(1e-7));
    CHECK(m.gslash.uu[i] == doctest::Approx((up.gslash.u[i] - um.gslash.u[i]) / (2 * h)).epsilon(1e-7));
  }
  Vec3 db{};
  for (int a = 0; a < 3; ++a) db[a] = (tp.b.v[a] - tm.b.v[a]) / (2 * h);
  const double xdb = dot(m.x, db);
  for (int i = 0; i < 3; ++i) {
    double cov = 0.0;
    for (int k = 0; k < 3; ++k) cov += m.e_theta[k] * m.b.d[k + 3 * i];
    CHECK(cov == doctest::Approx(db[i] - xdb * m.x[i]).epsilon(1e-6).scale(1e-4));
  }
}

TEST_CASE("envelope validation") {
  SchwarzschildParams p;
  auto spec = SampleSpec::defaults(p);
  auto r0 = validate_envelopes(PerturbationProfile::generate(0.0, 1), p, spec);
  CHECK(r0.pass);
  for (const auto& c : r0.checks) CHECK(c.max_ratio == 0.0);

  auto rd = validate_envelopes(PerturbationProfile::generate(0.01, 1), p, spec);
  CHECK(rd.pass);
  MESSAGE("default profile worst envelope ratio " << rd.worst_ratio << " (" << rd.worst << ")");

  auto ra = validate_envelopes(PerturbationProfile::adversarial(0.01), p, spec);
  CHECK_FALSE(ra.pass);
  CHECK(ra.worst_ratio >= 1.0);
  CHECK(ra.worst.rfind("log_omega", 0) == 0);
}
