#include "geometry/envelopes.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "sphere/calculus.hpp"

namespace nullfol::geometry {

using sphere::CartField;

namespace {

struct PowerJet {
  double p, p1, p2;
};

PowerJet power_jet(int k, double us, double r0) {
  const double q = us / r0;
  return {std::pow(q, k), k >= 1 ? k * std::pow(q, k - 1) / r0 : 0.0,
          k >= 2 ? k * (k - 1) * std::pow(q, k - 2) / (r0 * r0) : 0.0};
}

// d^m/dus^m (F p_k) given F, F_u, F_uu
double leibniz(int m, const double F[3], const PowerJet& pj) {
  if (m == 0) return F[0] * pj.p;
  if (m == 1) return F[1] * pj.p + F[0] * pj.p1;
  return F[2] * pj.p + 2.0 * F[1] * pj.p1 + F[0] * pj.p2;
}

double sup_norm_combo(const std::vector<CartField>& t, const std::vector<double>& c) {
  const int n = t[0].grid->size();
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    double sq = 0.0;
    for (int a = 0; a < t[0].ncomp(); ++a) {
      double v = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) v += c[k] * t[k].comp[a][i];
      sq += v * v;
    }
    best = std::max(best, sq);
  }
  return std::sqrt(best);
}

}  // namespace

SampleSpec SampleSpec::defaults(const SchwarzschildParams& p, int n) {
  SampleSpec s;
  const double a = 0.9 * p.kappa * p.r0;
  s.us = {-a, -0.5 * a, 0.0, 0.5 * a, a};
  s.s = {-0.1 * p.kappa * p.r0, 0.0, 0.5 * p.r0, 2.0 * p.r0, 10.0 * p.r0, 100.0 * p.r0};
  s.max_k = n + 2;
  return s;
}

ValidationReport validate_envelopes(const PerturbationProfile& profile, const SchwarzschildParams& params,
                                    const SampleSpec& spec) {
  ValidationReport rep;
  validate(params);
  const double r0 = params.r0, eps = profile.epsilon;
  try {
    profile.check();
    auto grid = sphere::SphereGrid::create(spec.grid);
    const int K = profile.powers;

    // lattice points with a valid area radius
    struct Pt {
      double us, s;
      RadiusJet rj;
    };
    std::vector<Pt> pts;
    for (double us : spec.us)
      for (double s : spec.s) {
        if (!in_domain(params, us, s)) continue;
        try {
          pts.push_back({us, s, radius_jet(params, us, s)});
        } catch (const Error&) {
        }
      }

    auto record = [&](const std::string& quantity, int k, int m, double ratio, const Pt& pt) {
      std::ostringstream name;
      name << quantity << " k=" << k << " m=" << m;
      for (auto& c : rep.checks)
        if (c.name == name.str()) {
          if (ratio > c.max_ratio) {
            c.max_ratio = ratio;
            c.at_us = pt.us;
            c.at_s = pt.s;
          }
          return;
        }
      EnvelopeCheck c;
      c.name = name.str();
      c.quantity = quantity;
      c.k = k;
      c.m = m;
      c.max_ratio = ratio;
      c.at_us = pt.us;
      c.at_s = pt.s;
      rep.checks.push_back(c);
    };

    // area radius of the perturbed angular metric against r_S
    {
      std::vector<CartField> gk;
      for (int k = 0; k < K; ++k) gk.push_back(shape_field(profile, grid, 2, k));
      for (const Pt& pt : pts) {
        double area = 0.0;
        for (int i = 0; i < grid->size(); ++i) {
          double x[3], et[3], ep[3];
          grid->frame(i, x, et, ep);
          double h[3] = {0, 0, 0};
          for (int k = 0; k < K; ++k) {
            const double pk = power_jet(k, pt.us, r0).p;
            for (int a = 0; a < 3; ++a)
              for (int b = 0; b < 3; ++b) {
                const double v = pk * gk[k].comp[a + 3 * b][i];
                h[0] += et[a] * v * et[b];
                h[1] += et[a] * v * ep[b];
                h[2] += ep[a] * v * ep[b];
              }
          }
          const double det = (1.0 + eps * h[0]) * (1.0 + eps * h[2]) - eps * eps * h[1] * h[1];
          if (!(det > 0.0 && 1.0 + eps * h[0] > 0.0))
            throw Error(ErrorCode::ProfileError, "perturbed angular metric is not positive definite");
          area += grid->area_weight(i) * std::sqrt(det);
        }
        const double ratio_r = std::sqrt(area / (4.0 * std::numbers::pi));
        record("area_radius", 0, 0, eps == 0.0 ? 0.0 : std::abs(ratio_r - 1.0) / eps, pt);
      }
    }

    const char* names[3] = {"log_omega", "b", "gslash"};
    for (int ch = 0; ch < 3; ++ch) {
      std::vector<CartField> chain;
      for (int k = 0; k < K; ++k) chain.push_back(shape_field(profile, grid, ch, k));
      for (int order = 0; order <= spec.max_k; ++order) {
        if (order > 0)
          for (auto& t : chain) t = sphere::cov_deriv(t);
        for (const Pt& pt : pts) {
          const double r = pt.rj.r, ru = pt.rj.r_u, ruu = pt.rj.r_uu;
          for (int m = 0; m <= spec.max_m; ++m) {
            double F[3] = {1.0, 0.0, 0.0};
            double scale = 1.0;
            if (m > 0) {
              if (ch == 0) {
                // eps (r0/r) chi against eps / (r r0^{m-1})
                F[0] = r0 / r;
                F[1] = -r0 * ru / (r * r);
                F[2] = -r0 * (ruu / (r * r) - 2.0 * ru * ru / (r * r * r));
                scale = r * std::pow(r0, m - 1);
              } else if (ch == 1) {
                // eps (r0 us / r^3) chi against eps / (r^3 r0^{m-2})
                const double r3 = r * r * r, r4 = r3 * r, r5 = r4 * r;
                F[0] = r0 * pt.us / r3;
                F[1] = r0 / r3 - 3.0 * r0 * pt.us * ru / r4;
                F[2] = -6.0 * r0 * ru / r4 - 3.0 * r0 * pt.us * ruu / r4 + 12.0 * r0 * pt.us * ru * ru / r5;
                scale = r3 * std::pow(r0, m - 2);
              } else {
                // eps r^2 chi against eps r^2 / r0^m
                F[0] = r * r;
                F[1] = 2.0 * r * ru;
                F[2] = 2.0 * (ru * ru + r * ruu);
                scale = std::pow(r0, m) / (r * r);
              }
            }
            std::vector<double> c(K);
            for (int k = 0; k < K; ++k) c[k] = leibniz(m, F, power_jet(k, pt.us, r0));
            const double ratio = eps == 0.0 ? 0.0 : sup_norm_combo(chain, c) * scale;
            record(names[ch], order, m, ratio, pt);
          }
        }
      }
    }
  } catch (const Error& e) {
    rep.failure = e.what();
    rep.pass = false;
  }

  for (auto& c : rep.checks) {
    c.pass = c.max_ratio < 1.0;
    if (!c.pass) rep.pass = false;
    if (c.max_ratio > rep.worst_ratio) {
      rep.worst_ratio = c.max_ratio;
      rep.worst = c.name;
    }
  }
  return rep;
}

}  // namespace nullfol::geometry
