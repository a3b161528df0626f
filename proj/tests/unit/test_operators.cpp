#include <cmath>
#include <numbers>

#include "doctest.h"
#include "errors.hpp"
#include "evolution/operators.hpp"
#include "helpers.hpp"

using namespace nullfol;
using namespace nullfol::evolution;
using nullfol::geometry::PerturbationProfile;
using nullfol::geometry::SchwarzschildParams;

namespace {

sphere::GridPtr default_grid() { return sphere::SphereGrid::create({48, 96, 31}); }

MetricFamily perturbed(const sphere::GridPtr& g, double eps = 0.01, std::uint64_t seed = 7) {
  return MetricFamily(SchwarzschildParams{}, PerturbationProfile::generate(eps, seed), g);
}

double sup(const ScalarField& f) { return sphere::sup_norm(f); }

}  // namespace

TEST_CASE("constants are fixed points on every metric") {
  auto g = default_grid();
  for (double eps : {0.0, 0.01}) {
    MetricFamily m = eps == 0.0 ? MetricFamily(SchwarzschildParams{}, PerturbationProfile::zero(), g)
                                : perturbed(g, eps);
    ScalarField f(g, 0.15);
    for (double s : {0.0, 1.0, 30.0}) {
      auto t = transport(m, s, f);
      CHECK(sup(t.F) <= 1e-15);
      auto re = assemble_re(m, s, f);
      CHECK(sup(re.ricci) <= 1e-15);
      CHECK(sup(re.b_block) <= 1e-15);
      CHECK(sup(re.a_block) <= 1e-15);
      CHECK(sup(null_residual(m, s, f)) <= 1e-15);
    }
  }
}

TEST_CASE("background reduction of F and X") {
  auto g = default_grid();
  MetricFamily m(SchwarzschildParams{}, PerturbationProfile::zero(), g);
  ScalarField f = testutil::harmonic(g, 1, 0, 0.02) + testutil::random_field(g, 6, 3, 0.02);
  for (double s : {0.0, 2.5, 50.0}) {
    auto t = transport(m, s, f);
    auto gf = sphere::grad(f);
    double err = 0.0, errx = 0.0;
    for (int i = 0; i < g->size(); ++i) {
      const auto sol = geometry::solve_area_radius(m.params(), f[i], s);
      const double w = geometry::schwarzschild_omega_sq(m.params(), f[i], s);
      const double c = w / (sol.r * sol.r);
      const double g2 = gf.th[i] * gf.th[i] + gf.ph[i] * gf.ph[i];
      err = std::max(err, std::abs(t.F[i] - c * g2));
      errx = std::max(errx, std::abs(t.X.th[i] - 2 * c * gf.th[i]) + std::abs(t.X.ph[i] - 2 * c * gf.ph[i]));
    }
    CHECK(err <= 1e-10);
    CHECK(errx <= 1e-10);
  }
}

TEST_CASE("F on a perturbed metric against a pointwise closed-form oracle") {
  auto g = default_grid();
  MetricFamily m = perturbed(g);
  // f = 0.05 Y_2^1 = a sin(theta) cos(theta) cos(phi)
  const double a = 0.05 * std::sqrt(15.0 / (4.0 * std::numbers::pi));
  ScalarField f = testutil::harmonic(g, 2, 1, 0.05);
  const double s = 1.5;
  auto F = rhs_F(m, s, f);
  double err = 0.0;
  for (int j = 0; j < g->nlat(); ++j)
    for (int k = 0; k < g->nlon(); ++k) {
      const int i = j * g->nlon() + k;
      const double th = g->theta(j), ph = g->phi(k);
      const double fv = a * std::sin(th) * std::cos(th) * std::cos(ph);
      const double ft = a * std::cos(2 * th) * std::cos(ph);
      const double fp = -a * std::cos(th) * std::sin(ph);
      auto ms = m.eval_at(th, ph, fv, s, geometry::JetLevel::Pointwise);
      const auto b = ms.b_dyad();
      const auto gd = ms.gslash_dyad();
      const double det = gd[0] * gd[2] - gd[1] * gd[1];
      const double q = (gd[2] * ft * ft - 2 * gd[1] * ft * fp + gd[0] * fp * fp) / det;
      const double oracle = -(b[0] * ft + b[1] * fp) + ms.omega_sq.v * q;
      err = std::max(err, std::abs(F[i] - oracle));
    }
  CHECK(err <= 1e-6);
}

TEST_CASE("frame quantities: bdot = -X and vareps <= 0") {
  auto g = default_grid();
  MetricFamily m = perturbed(g);
  ScalarField f = testutil::random_field(g, 8, 11, 0.05);
  const double s = 3.0;
  auto fq = frame_quantities(m, s, f);
  auto X = assemble_X(m, s, f);
  double err = 0.0, vmax = -1.0;
  for (int i = 0; i < g->size(); ++i) {
    err = std::max(err, std::abs(fq.bdot.th[i] + X.th[i]) + std::abs(fq.bdot.ph[i] + X.ph[i]));
    vmax = std::max(vmax, fq.vareps[i]);
  }
  CHECK(err <= 1e-12);
  CHECK(vmax <= 0.0);
}

TEST_CASE("null residual vanishes for any graph") {
  auto g = default_grid();
  MetricFamily m = perturbed(g);
  ScalarField f = testutil::random_field(g, 8, 5, 0.05);
  // noisy graph: nullness is algebraic in the first derivatives
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd(0.0, 1e-3);
  ScalarField noisy = f;
  for (double& v : noisy.mutable_values()) v += nd(rng);
  for (const ScalarField* h : {&f, &noisy}) {
    auto res = null_residual(m, 4.0, *h);
    auto ms = sample_on_graph(m, 4.0, *h, geometry::JetLevel::Pointwise);
    double worst = 0.0;
    for (int i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(res[i]) / ms[i].omega_sq.v);
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("graph outside the neighbourhood") {
  auto g = default_grid();
  MetricFamily m = perturbed(g);
  ScalarField f(g, 0.6);
  try {
    rhs_F(m, 0.0, f);
    FAIL("expected OutOfDomain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfDomain);
  }
}

TEST_CASE("re: background has no b-block") {
  auto g = default_grid();
  MetricFamily m(SchwarzschildParams{}, PerturbationProfile::zero(), g);
  ScalarField f = testutil::harmonic(g, 2, 0, 0.03);
  auto re = assemble_re(m, 2.0, f);
  CHECK(sup(re.b_block) == 0.0);
  CHECK(sup(re.a_block) > 0.0);
}

TEST_CASE("re matches the spectral route on a fine grid") {
  // the spectral route differentiates F twice, so it needs a grid that resolves
  // the composition of the metric with f
  auto g = sphere::SphereGrid::create({96, 192, 64});
  for (double eps : {0.0, 0.01}) {
    MetricFamily m = eps == 0.0 ? MetricFamily(SchwarzschildParams{}, PerturbationProfile::zero(), g)
                                : perturbed(g, eps);
    ScalarField f = testutil::random_field(g, 5, 21, 0.04);
    for (double s : {0.0, 2.0}) {
      auto re = assemble_re(m, s, f);
      auto ref = re_spectral(m, s, f);
      const double scale = sup(ref);
      CHECK(scale > 0.0);
      CHECK(testutil::max_abs_diff(re.re.values(), ref.values()) <= 1e-9 * std::max(1.0, scale));
    }
  }
}
