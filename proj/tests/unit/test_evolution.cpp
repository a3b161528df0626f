#include <cmath>
#include <numbers>

#include "doctest.h"
#include "errors.hpp"
#include "evolution/integrator.hpp"
#include "helpers.hpp"

using namespace nullfol;
using namespace nullfol::evolution;
using nullfol::geometry::PerturbationProfile;
using nullfol::geometry::SchwarzschildParams;

namespace {

sphere::GridPtr default_grid() { return sphere::SphereGrid::create({48, 96, 31}); }

MetricFamily background(const sphere::GridPtr& g) {
  return MetricFamily(SchwarzschildParams{}, PerturbationProfile::zero(), g);
}

// theta-only reference for axisymmetric data on the background:
// d_s f = Omega_S^2(f, s) / r(f, s)^2 (d_theta f)^2, eighth-order differences on
// a uniform colatitude mesh with even reflection through both poles.
class AxisymmetricReference {
 public:
  explicit AxisymmetricReference(int n) : n_(n), dth_(std::numbers::pi / n), f_(n + 1) {}

  double theta(int i) const { return i * dth_; }
  std::vector<double>& values() { return f_; }

  void advance(double s0, double s1, double h) {
    double s = s0;
    while (s < s1 - 1e-14) {
      const double dt = std::min(h, s1 - s);
      const auto k1 = rhs(s, f_);
      const auto k2 = rhs(s + dt / 2, axpy(f_, dt / 2, k1));
      const auto k3 = rhs(s + dt / 2, axpy(f_, dt / 2, k2));
      const auto k4 = rhs(s + dt, axpy(f_, dt, k3));
      for (int i = 0; i <= n_; ++i) f_[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      s += dt;
    }
  }

 private:
  static std::vector<double> axpy(const std::vector<double>& y, double a, const std::vector<double>& k) {
    std::vector<double> o(y);
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += a * k[i];
    return o;
  }
  double at(const std::vector<double>& f, int i) const {
    if (i < 0) i = -i;
    if (i > n_) i = 2 * n_ - i;
    return f[i];
  }
  std::vector<double> rhs(double s, const std::vector<double>& f) const {
    static constexpr double c[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
    SchwarzschildParams p;
    std::vector<double> out(n_ + 1);
    for (int i = 0; i <= n_; ++i) {
      double d = 0.0;
      for (int k = 1; k <= 4; ++k) d += c[k - 1] * (at(f, i + k) - at(f, i - k));
      d /= dth_;
      const double r = geometry::solve_area_radius(p, f[i], s).r;
      out[i] = geometry::schwarzschild_omega_sq(p, f[i], s) / (r * r) * d * d;
    }
    return out;
  }

  int n_;
  double dth_;
  std::vector<double> f_;
};

double sup_diff(const ScalarField& a, const ScalarField& b) { return testutil::max_abs_diff(a.values(), b.values()); }

}  // namespace

TEST_CASE("constants are preserved by the integrator") {
  auto g = default_grid();
  EvolutionConfig cfg;
  cfg.s_end = 10.0;
  cfg.h0 = 0.1;
  for (double eps : {0.0, 0.01}) {
    MetricFamily m(SchwarzschildParams{}, eps == 0.0 ? PerturbationProfile::zero() : PerturbationProfile::generate(eps, 3), g);
    ScalarField f0(g, 0.15);
    auto tr = evolve(m, f0, cfg);
    CHECK(tr.status == EvolutionStatus::Completed);
    CHECK(tr.final_state.s == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(sup_diff(tr.final_state.f, f0) <= 1e-10);
    auto tl = evolve_laplacian_form(m, f0, cfg);
    CHECK(sup_diff(tl.final_state.f, f0) <= 1e-10);
  }
}

TEST_CASE("stretched step schedule") {
  EvolutionConfig cfg;
  cfg.h0 = 0.1;
  cfg.h_max = 1.0;
  CHECK(step_size(cfg, 1.0, 0.0) == doctest::Approx(0.1));
  CHECK(step_size(cfg, 1.0, 3.0) == doctest::Approx(0.4));
  CHECK(step_size(cfg, 1.0, 50.0) == doctest::Approx(1.0));
  cfg.stretch = false;
  CHECK(step_size(cfg, 1.0, 50.0) == doctest::Approx(0.1));
  cfg.h0 = -1;
  CHECK_THROWS_AS(cfg.validate(1.0, 0.5), Error);
}

TEST_CASE("axisymmetric background evolution against a theta-only reference") {
  auto g = default_grid();
  MetricFamily m = background(g);
  const double amp = 0.02 * std::sqrt(3.0 / (4.0 * std::numbers::pi));
  ScalarField f0 = testutil::harmonic(g, 1, 0, 0.02);

  EvolutionConfig cfg;
  cfg.s_end = 20.0;
  cfg.h0 = 0.05;
  cfg.h_max = 0.5;
  cfg.snapshots = {5.0, 20.0};
  auto tr = evolve(m, f0, cfg);
  REQUIRE(tr.status == EvolutionStatus::Completed);
  REQUIRE(tr.snapshots.size() == 2);

  AxisymmetricReference ref(1024);
  for (int i = 0; i <= 1024; ++i) ref.values()[i] = amp * std::cos(ref.theta(i));
  ref.advance(0.0, 5.0, 0.01);
  auto compare = [&](const ScalarField& f) {
    double worst = 0.0;
    for (int i = 0; i <= 1024; i += 16) {
      sphere::PointSynth ps(g->ltrans(), ref.theta(i), 0.3);
      worst = std::max(worst, std::abs(ps.value(f.coeffs()) - ref.values()[i]));
    }
    return worst;
  };
  CHECK(compare(tr.snapshots[0].f) <= 1e-6);
  ref.advance(5.0, 20.0, 0.02);
  const double err = compare(tr.snapshots[1].f);
  CHECK(err <= 1e-6);
  // the solution actually moved
  CHECK(sup_diff(tr.snapshots[1].f, f0) > 1e-5);

  SUBCASE("Laplacian form agrees") {
    auto tl = evolve_laplacian_form(m, f0, cfg);
    REQUIRE(tl.status == EvolutionStatus::Completed);
    double worst = 0.0;
    for (std::size_t k = 0; k < tl.rows.size(); ++k) worst = std::max(worst, std::abs(tl.rows[k].mean_f - tr.rows[k].mean_f));
    CHECK(worst <= 1e-5);
    CHECK(sup_diff(tl.snapshots[0].f, tr.snapshots[0].f) <= 1e-5);
    CHECK(sup_diff(tl.snapshots[1].f, tr.snapshots[1].f) <= 1e-5);
    CHECK(tl.projected_mean <= 1e-10);
  }
}

TEST_CASE("RK4 self-convergence") {
  auto g = default_grid();
  MetricFamily m(SchwarzschildParams{}, PerturbationProfile::generate(0.01, 5), g);
  ScalarField f0 = testutil::random_field(g, 4, 17, 0.05);
  EvolutionConfig cfg;
  cfg.stretch = false;
  cfg.s_end = 2.0;
  cfg.null_monitor = false;
  std::vector<ScalarField> out;
  for (double h : {0.4, 0.2, 0.1}) {
    cfg.h0 = h;
    cfg.h_max = h;
    auto tr = evolve(m, f0, cfg);
    REQUIRE(tr.status == EvolutionStatus::Completed);
    out.push_back(tr.final_state.f);
  }
  const double e1 = sup_diff(out[0], out[1]);
  const double e2 = sup_diff(out[1], out[2]);
  MESSAGE("self-convergence ratio " << e1 / e2 << " (" << e1 << ", " << e2 << ")");
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("boundary and guard statuses") {
  auto g = default_grid();
  MetricFamily m = background(g);
  EvolutionConfig cfg;
  cfg.s_end = 1.0;
  cfg.h0 = 0.1;
  ScalarField f0(g, 0.47);
  cfg.guard_armed = true;
  auto tr = evolve(m, f0, cfg);
  CHECK(tr.status == EvolutionStatus::GuardHit);
  CHECK(tr.steps == 0);
  cfg.guard_armed = false;
  CHECK(evolve(m, f0, cfg).status == EvolutionStatus::Completed);
  // a graph that starts outside stops immediately
  ScalarField f1 = testutil::harmonic(g, 1, 0, 2.0);
  CHECK(evolve(m, f1, cfg).status == EvolutionStatus::BoundaryHit);
}

TEST_CASE("under-resolved data is rejected") {
  auto g = sphere::SphereGrid::create({16, 32, 10});
  MetricFamily m(SchwarzschildParams{}, PerturbationProfile::generate(0.01, 5), g);
  ScalarField f0 = testutil::random_field(g, 10, 3, 0.6);
  for (double& v : f0.mutable_values()) v *= 0.3;
  EvolutionConfig cfg;
  cfg.s_end = 1.0;
  cfg.h0 = 0.2;
  try {
    evolve(m, f0, cfg);
    FAIL("expected StepRejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StepRejected);
  }
}
