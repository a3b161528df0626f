#include <cmath>
#include <numbers>

#include "doctest.h"
#include "errors.hpp"
#include "helpers.hpp"
#include "analysis/flow.hpp"
#include "analysis/transport_check.hpp"
#include "evolution/initial_data.hpp"
#include "evolution/operators.hpp"

using namespace nullfol;
using namespace nullfol::analysis;
using nullfol::geometry::PerturbationProfile;
using nullfol::geometry::SchwarzschildParams;

namespace {

sphere::GridPtr small_grid() { return sphere::SphereGrid::create({32, 64, 21}); }

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> t(n + 1);
  for (int i = 0; i <= n; ++i) t[i] = a + (b - a) * i / n;
  return t;
}

TangentField scaled(TangentField v, double c) {
  for (double& x : v.th) x *= c;
  for (double& x : v.ph) x *= c;
  return v;
}

const double kY10 = std::sqrt(3.0 / (4.0 * std::numbers::pi));

}  // namespace

TEST_CASE("zero field gives the identity flow") {
  auto g = small_grid();
  FlowConfig cfg;
  cfg.times = linspace(0.0, 3.0, 6);
  auto fl = integrate_flow(g, [&](double) { return TangentField(g); }, cfg);
  double x[3];
  double err = 0.0;
  for (int n = 0; n < g->size(); ++n) {
    g->position(n, x);
    for (int a = 0; a < 3; ++a) err = std::max(err, std::abs(fl.map.back()[a][n] - x[a]));
  }
  CHECK(err <= 1e-15);
  CHECK(fl.k_bound == 0.0);
  CHECK(sphere::sup_norm(fl.log_vol_characteristic.back()) <= 1e-15);
  CHECK(sphere::sup_norm(fl.log_vol_jacobian.back()) <= 1e-12);
}

TEST_CASE("rotation flow preserves volume and L^p norms") {
  auto g = small_grid();
  const double omega = 0.3;
  FlowConfig cfg;
  cfg.times = linspace(0.0, 2.0, 40);
  const TangentField R = scaled(sphere::rotation_field(g, 3), omega);
  auto fl = integrate_flow(g, [&](double) { return R; }, cfg);
  // exact: counter-clockwise rotation about the third axis by omega s
  const double ang = omega * 2.0;
  double x[3], err = 0.0;
  for (int n = 0; n < g->size(); ++n) {
    g->position(n, x);
    const double ex = std::cos(ang) * x[0] - std::sin(ang) * x[1];
    const double ey = std::sin(ang) * x[0] + std::cos(ang) * x[1];
    err = std::max({err, std::abs(fl.map.back()[0][n] - ex), std::abs(fl.map.back()[1][n] - ey),
                    std::abs(fl.map.back()[2][n] - x[2])});
  }
  CHECK(err <= 1e-7);
  for (std::size_t i = 0; i < fl.s.size(); ++i) {
    CHECK(sphere::sup_norm(fl.log_vol_characteristic[i]) <= 1e-9);
    CHECK(sphere::sup_norm(fl.log_vol_transported[i]) <= 1e-9);
  }
  CHECK(fl.k_bound <= 1e-9);
  ScalarField f = testutil::random_field(g, 8, 11);
  for (double p : {1.0, 2.0, 4.0}) {
    auto rep = lp_comparability(fl, f, p, fl.s.size() - 1);
    const double tol = p == 1.0 ? 1e-4 : 1e-9;
    CHECK(std::abs(rep.norm_direct - rep.norm_f) <= tol * rep.norm_f);
    CHECK(std::abs(rep.norm_cov - rep.norm_f) <= tol * rep.norm_f);
    CHECK(rep.pass);
  }
}

TEST_CASE("decaying gradient flow matches the closed-form axisymmetric map") {
  auto g = sphere::SphereGrid::create({48, 96, 31});
  const double a = 0.4, r0 = 1.0, s_end = 6.0;
  const TangentField gy = sphere::grad(testutil::harmonic(g, 1, 0));
  FlowConfig cfg;
  cfg.r0 = r0;
  cfg.times = linspace(0.0, s_end, 120);
  auto fl = integrate_flow(g, [&](double s) { return scaled(gy, a * r0 / ((r0 + s) * (r0 + s))); }, cfg);
  // d theta/ds = -a c g(s) sin theta  ->  tan(theta/2) = tan(theta0/2) exp(-a c G(s))
  const double G = 1.0 - r0 / (r0 + s_end);
  const double E = std::exp(-a * kY10 * G);
  double map_err = 0.0, vol_err = 0.0, worst_log = 0.0;
  for (int n = 0; n < g->size(); ++n) {
    const int j = n / g->nlon();
    const double th0 = g->theta(j);
    const double t0 = std::tan(0.5 * th0), t = t0 * E;
    const double th = 2.0 * std::atan(t);
    map_err = std::max(map_err, std::abs(fl.map.back()[2][n] - std::cos(th)));
    const double dth = E * (1.0 + t0 * t0) / (1.0 + t * t);
    const double logJ = std::log(std::sin(th) / std::sin(th0) * dth);
    vol_err = std::max(vol_err, std::abs(fl.log_vol_characteristic.back()[n] + logJ));
    worst_log = std::max(worst_log, std::abs(logJ));
  }
  CHECK(map_err <= 1e-8);
  CHECK(vol_err <= 1e-7);
  CHECK(worst_log > 0.05);
  CHECK(worst_log <= fl.k_bound);
  CHECK(fl.route_mismatch <= 1e-6);
  CHECK(fl.min_jacobian > 0.0);
  ScalarField f = testutil::random_field(g, 6, 3);
  for (double p : {1.0, 2.0, 3.0}) {
    auto rep = lp_comparability(fl, f, p, fl.s.size() - 1);
    CHECK(rep.pass);
    // both are quadratures of integrands that are smooth only for even p
    CHECK(std::abs(rep.norm_direct - rep.norm_cov) <= (p == 2.0 ? 1e-6 : 1e-4) * rep.norm_f);
    CHECK(rep.lower <= rep.norm_direct);
    CHECK(rep.norm_direct <= rep.upper);
  }
}

TEST_CASE("series interpolation reproduces a cubic-in-s field") {
  auto g = small_grid();
  const TangentField R = sphere::rotation_field(g, 1);
  XSeries xs;
  for (int i = 0; i <= 6; ++i) {
    const double s = 0.5 * i;
    xs.s.push_back(s);
    xs.X.push_back(scaled(R, 1.0 + s - 0.2 * s * s + 0.01 * s * s * s));
  }
  const double s = 1.37;
  auto v = xs.at(s);
  const double c = 1.0 + s - 0.2 * s * s + 0.01 * s * s * s;
  CHECK(testutil::max_abs_diff(v.th, scaled(R, c).th) <= 1e-12);
  CHECK(testutil::max_abs_diff(v.ph, scaled(R, c).ph) <= 1e-12);
}

TEST_CASE("band-limit check on off-grid evaluation") {
  auto g = small_grid();
  FlowConfig cfg;
  cfg.times = linspace(0.0, 1.0, 2);
  cfg.eval_band = 3;
  const TangentField gy = sphere::grad(testutil::harmonic(g, 10, 2, 0.1));
  CHECK_THROWS_AS(integrate_flow(g, [&](double) { return gy; }, cfg), Error);
}

TEST_CASE("transport check with vanishing field is plain integration") {
  auto g = small_grid();
  ScalarField u0 = testutil::random_field(g, 6, 5);
  ScalarField h = testutil::random_field(g, 4, 6, 0.1);
  TransportCheckConfig tc;
  auto rep = transport_check(g, [&](double) { return TangentField(g); }, [&](double) { return h; }, u0,
                             linspace(0.0, 4.0, 8), tc);
  ScalarField expect = u0;
  expect.add_scaled(h, 4.0);
  CHECK(std::abs(rep.rows.back().u_norm - sphere::sobolev_norm(expect, tc.m, tc.p)) <= 1e-12);
  CHECK(rep.k == 0.0);
  CHECK(rep.measured_c == 0.0);
  CHECK(rep.pass);
  CHECK(rep.commutator_residual <= 1e-10);
}

TEST_CASE("transport check along a decaying rotation conserves the norm") {
  auto g = small_grid();
  ScalarField u0 = testutil::random_field(g, 8, 7);
  ScalarField zero(g);
  TransportCheckConfig tc;
  tc.k_max = 10.0;
  const TangentField R = sphere::rotation_field(g, 2);
  auto rep = transport_check(
      g, [&](double s) { return scaled(R, 1.0 / ((1.0 + s) * (1.0 + s))); }, [&](double) { return zero; }, u0,
      linspace(0.0, 4.0, 800), tc);
  for (const auto& r : rep.rows) CHECK(std::abs(r.u_norm - rep.rows[0].u_norm) <= 1e-9 * rep.rows[0].u_norm);
  CHECK(rep.measured_c <= 1e-6);
  CHECK(rep.commutator_residual <= 1e-9);
  tc.k_max = 0.1;
  CHECK_THROWS_AS(transport_check(
                      g, [&](double s) { return scaled(R, 1.0 / ((1.0 + s) * (1.0 + s))); },
                      [&](double) { return zero; }, u0, linspace(0.0, 1.0, 4), tc),
                  Error);
}

TEST_CASE("transport check along a foliation tracks the Laplacian") {
  auto g = sphere::SphereGrid::create({48, 96, 31});
  evolution::MetricFamily m(SchwarzschildParams{}, PerturbationProfile::generate(0.01, 4), g);
  ScalarField f0 = evolution::make_initial_data(g, 17, 6, 0.02, 0.05, 3, 2.0);
  evolution::EvolutionConfig cfg;
  cfg.s_end = 10.0;
  cfg.h0 = 0.2;
  cfg.h_max = 1.0;
  TransportCheckConfig tc;
  auto rep = transport_norm_check(m, f0, cfg, tc);
  auto tr = evolution::evolve(m, f0, cfg);
  REQUIRE(tr.rows.size() == rep.rows.size());
  const double lap = sphere::sobolev_norm(sphere::laplacian(tr.final_state.f), tc.m, tc.p);
  CHECK(std::abs(rep.rows.back().u_norm - lap) <= 1e-6 * lap);
  CHECK(rep.k > 0.0);
  CHECK(rep.pass);
  CHECK(rep.commutator_residual <= 1e-6);
}
