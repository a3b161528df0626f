#include "geometry/metric.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace nullfol::geometry {

namespace {

template <std::size_t N>
void axpy(std::array<double, N>& y, double a, const double* x) {
  for (std::size_t i = 0; i < N; ++i) y[i] += a * x[i];
}

}  // namespace

std::array<double, 2> MetricSample::b_dyad() const {
  double t = 0, p = 0;
  for (int a = 0; a < 3; ++a) {
    t += b.v[a] * e_theta[a];
    p += b.v[a] * e_phi[a];
  }
  return {t, p};
}

std::array<double, 3> MetricSample::gslash_dyad() const {
  double tt = 0, tp = 0, pp = 0;
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) {
      const double g = gslash.v[a + 3 * c];
      tt += e_theta[a] * g * e_theta[c];
      tp += e_theta[a] * g * e_phi[c];
      pp += e_phi[a] * g * e_phi[c];
    }
  return {tt, tp, pp};
}

MetricFamily::MetricFamily(SchwarzschildParams params, PerturbationProfile profile, sphere::GridPtr grid)
    : params_(params), profile_(std::move(profile)), grid_(std::move(grid)) {
  validate(params_);
  profile_.check();
  if (profile_.epsilon != 0.0) cache_ = std::make_shared<ProfileCache>(profile_, grid_);
}

MetricSample MetricFamily::eval(int node, double us, double s, JetLevel level) const {
  double x[3], et[3], ep[3];
  grid_->frame(node, x, et, ep);
  return eval_raw(cache_ ? cache_->node(node, 0) : nullptr, x, et, ep, us, s, level);
}

MetricSample MetricFamily::eval_at(double theta, double phi, double us, double s, JetLevel level) const {
  const double st = std::sin(theta), ct = std::cos(theta), sp = std::sin(phi), cp = std::cos(phi);
  const double x[3] = {st * cp, st * sp, ct};
  const double et[3] = {ct * cp, ct * sp, -st};
  const double ep[3] = {-sp, cp, 0.0};
  std::vector<double> data;
  if (cache_) cache_->at_point(theta, phi, data);
  return eval_raw(cache_ ? data.data() : nullptr, x, et, ep, us, s, level);
}

MetricSample MetricFamily::eval_raw(const double* data, const double x[3], const double et[3],
                                    const double ep[3], double us, double s, JetLevel level) const {
  const double r0 = params_.r0;
  const double eps = profile_.epsilon;
  const bool full = level == JetLevel::Full;

  MetricSample m;
  m.us = us;
  m.s = s;
  for (int a = 0; a < 3; ++a) {
    m.x[a] = x[a];
    m.e_theta[a] = et[a];
    m.e_phi[a] = ep[a];
  }

  const AreaRadiusSolution sol = solve_area_radius(params_, us, s);
  const RadiusJet rj = radius_jet(params_, sol);
  const double r = rj.r, ru = rj.r_u, ruu = rj.r_uu;
  m.r = r;
  const LogOmegaJet ls = schwarzschild_log_omega_sq(params_, sol);

  Mat3 proj{};
  for (int a = 0; a < 3; ++a)
    for (int c = 0; c < 3; ++c) proj[a + 3 * c] = (a == c ? 1.0 : 0.0) - x[a] * x[c];

  // shape functions and their us-derivatives at this point
  ScalarJet chi_o;
  VectorJet chi_b;
  TensorJet chi_g;
  if (data) {
    for (int k = 0; k < profile_.powers; ++k) {
      const double* d = data + static_cast<std::size_t>(k) * ProfileCache::kStride;
      const double q = us / r0;
      const double pk = std::pow(q, k);
      const double pk1 = k >= 1 ? k * std::pow(q, k - 1) / r0 : 0.0;
      const double pk2 = k >= 2 ? k * (k - 1) * std::pow(q, k - 2) / (r0 * r0) : 0.0;
      chi_o.v += pk * d[ProfileCache::kOmega];
      chi_o.u += pk1 * d[ProfileCache::kOmega];
      chi_o.uu += pk2 * d[ProfileCache::kOmega];
      axpy(chi_b.v, pk, d + ProfileCache::kB);
      axpy(chi_b.u, pk1, d + ProfileCache::kB);
      axpy(chi_b.uu, pk2, d + ProfileCache::kB);
      axpy(chi_g.v, pk, d + ProfileCache::kG);
      axpy(chi_g.u, pk1, d + ProfileCache::kG);
      axpy(chi_g.uu, pk2, d + ProfileCache::kG);
      if (full) {
        axpy(chi_o.d, pk, d + ProfileCache::kOmegaD);
        axpy(chi_o.du, pk1, d + ProfileCache::kOmegaD);
        axpy(chi_o.dd, pk, d + ProfileCache::kOmegaDD);
        axpy(chi_b.d, pk, d + ProfileCache::kBD);
        axpy(chi_b.du, pk1, d + ProfileCache::kBD);
        axpy(chi_b.dd, pk, d + ProfileCache::kBDD);
        axpy(chi_g.d, pk, d + ProfileCache::kGD);
        axpy(chi_g.du, pk1, d + ProfileCache::kGD);
        axpy(chi_g.dd, pk, d + ProfileCache::kGDD);
      }
    }
  }

  // Omega^2 = exp(lambda), lambda = log Omega_S^2 + 2 eps rho chi_O, rho = r0/r
  {
    const double rho = r0 / r;
    const double rho_u = -r0 * ru / (r * r);
    const double rho_uu = -r0 * (ruu / (r * r) - 2.0 * ru * ru / (r * r * r));
    const double e2 = 2.0 * eps;
    const double lam = ls.value + e2 * rho * chi_o.v;
    const double lam_u = ls.d_u + e2 * (rho_u * chi_o.v + rho * chi_o.u);
    const double lam_uu = ls.d_uu + e2 * (rho_uu * chi_o.v + 2.0 * rho_u * chi_o.u + rho * chi_o.uu);
    const double w = std::exp(lam);
    ScalarJet& o = m.omega_sq;
    o.v = w;
    o.u = w * lam_u;
    o.uu = w * (lam_uu + lam_u * lam_u);
    if (full) {
      Vec3 dl{}, dlu{};
      for (int a = 0; a < 3; ++a) {
        dl[a] = e2 * rho * chi_o.d[a];
        dlu[a] = e2 * (rho_u * chi_o.d[a] + rho * chi_o.du[a]);
      }
      for (int a = 0; a < 3; ++a) {
        o.d[a] = w * dl[a];
        o.du[a] = w * (dlu[a] + lam_u * dl[a]);
      }
      // dd[k + 3 a] = nabla_k nabla_a w
      for (int k = 0; k < 3; ++k)
        for (int a = 0; a < 3; ++a)
          o.dd[k + 3 * a] = w * (e2 * rho * chi_o.dd[k + 3 * a] + dl[k] * dl[a]);
    }
  }

  // b = eps beta chi_b, beta = r0 us / r^3
  if (data) {
    const double r3 = r * r * r, r4 = r3 * r, r5 = r4 * r;
    const double beta = r0 * us / r3;
    const double beta_u = r0 / r3 - 3.0 * r0 * us * ru / r4;
    const double beta_uu = -6.0 * r0 * ru / r4 - 3.0 * r0 * us * ruu / r4 + 12.0 * r0 * us * ru * ru / r5;
    VectorJet& b = m.b;
    for (int a = 0; a < 3; ++a) {
      b.v[a] = eps * beta * chi_b.v[a];
      b.u[a] = eps * (beta_u * chi_b.v[a] + beta * chi_b.u[a]);
      b.uu[a] = eps * (beta_uu * chi_b.v[a] + 2.0 * beta_u * chi_b.u[a] + beta * chi_b.uu[a]);
    }
    if (full) {
      for (int i = 0; i < 9; ++i) {
        b.d[i] = eps * beta * chi_b.d[i];
        b.du[i] = eps * (beta_u * chi_b.d[i] + beta * chi_b.du[i]);
      }
      for (int i = 0; i < 27; ++i) b.dd[i] = eps * beta * chi_b.dd[i];
    }
  }

  // gslash = gamma (P + eps chi_g), gamma = r^2
  {
    const double gam = r * r, gam_u = 2.0 * r * ru, gam_uu = 2.0 * (ru * ru + r * ruu);
    TensorJet& g = m.gslash;
    for (int i = 0; i < 9; ++i) {
      g.v[i] = gam * (proj[i] + eps * chi_g.v[i]);
      g.u[i] = gam_u * (proj[i] + eps * chi_g.v[i]) + gam * eps * chi_g.u[i];
      g.uu[i] = gam_uu * (proj[i] + eps * chi_g.v[i]) + 2.0 * gam_u * eps * chi_g.u[i] +
                gam * eps * chi_g.uu[i];
    }
    if (full) {
      for (int i = 0; i < 27; ++i) {
        g.d[i] = eps * gam * chi_g.d[i];
        g.du[i] = eps * (gam_u * chi_g.d[i] + gam * chi_g.du[i]);
      }
      for (int i = 0; i < 81; ++i) g.dd[i] = eps * gam * chi_g.dd[i];
    }
    const auto dy = m.gslash_dyad();
    if (!(dy[0] > 0.0 && dy[0] * dy[2] - dy[1] * dy[1] > 0.0))
      throw Error(ErrorCode::ProfileError, "perturbed angular metric is not positive definite");
  }
  return m;
}

MetricSample eval_metric(const MetricFamily& family, double us, double s, int node) {
  return family.eval(node, us, s, JetLevel::Full);
}

}  // namespace nullfol::geometry
