#include "analysis/flow.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace nullfol::analysis {

using sphere::CartField;
using sphere::PointSynth;

namespace {

struct XSample {
  double s = 0;
  TangentField X;
  std::array<std::vector<double>, 3> cc;  // coefficients of Cartesian components
  std::vector<double> div_c;
  ScalarField div;
};

XSample prepare(const GridPtr& g, double s, TangentField X, int band, double band_tol) {
  sphere::check_same_grid(g, X.grid, "integrate_flow");
  XSample out;
  out.s = s;
  const auto comps = cartesian_components(X);
  // tail relative to the whole field so that an identically zero component is not judged alone
  const int nkeep = (band + 1) * (band + 1);
  double tail = 0.0, total = 0.0;
  for (int a = 0; a < 3; ++a) {
    out.cc[a] = comps[a].coeffs();
    for (std::size_t i = 0; i < out.cc[a].size(); ++i) {
      const double e = out.cc[a][i] * out.cc[a][i];
      total += e;
      if (static_cast<int>(i) >= nkeep) tail += e;
    }
  }
  const double rel = total > 0.0 ? std::sqrt(tail / total) : 0.0;
  if (!(rel <= band_tol)) {
    std::ostringstream os;
    os << "transport field at s = " << s << " has relative energy " << rel << " above the synthesis band " << band;
    throw Error(ErrorCode::OffGridEvalFailure, os.str());
  }
  out.div = sphere::divergence(X);
  out.div_c = out.div.coeffs();
  out.X = std::move(X);
  return out;
}

void to_angles(const double y[3], double& th, double& ph) {
  const double n = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::OffGridEvalFailure, "flow point left the sphere");
  th = std::acos(std::clamp(y[2] / n, -1.0, 1.0));
  ph = std::atan2(y[1], y[0]);
}

// X (Cartesian) and div X at a point
void eval_point(const XSample& xs, int band, const double y[3], double out[4]) {
  double th, ph;
  to_angles(y, th, ph);
  PointSynth ps(band, th, ph);
  for (int a = 0; a < 3; ++a) out[a] = ps.value(xs.cc[a]);
  out[3] = ps.value(xs.div_c);
}

// d_s l = -X.grad l - div X
ScalarField transported_rhs(const XSample& xs, const ScalarField& l) {
  ScalarField r = sphere::directional(xs.X, l);
  r += xs.div;
  r *= -1.0;
  return r;
}

}  // namespace

std::array<ScalarField, 3> cartesian_components(const TangentField& v) {
  CartField c = sphere::to_cart(v);
  return {ScalarField(v.grid, std::move(c.comp[0])), ScalarField(v.grid, std::move(c.comp[1])),
          ScalarField(v.grid, std::move(c.comp[2]))};
}

TangentField XSeries::at(double s) const {
  if (this->s.empty()) throw Error(ErrorCode::ConfigError, "empty transport-field series");
  const int n = static_cast<int>(this->s.size());
  if (n == 1) return X[0];
  int j = static_cast<int>(std::upper_bound(this->s.begin(), this->s.end(), s) - this->s.begin()) - 1;
  j = std::clamp(j, 0, n - 2);
  // four-point stencil around [s_j, s_j+1], shifted at the ends
  int lo = std::clamp(j - 1, 0, std::max(0, n - 4));
  const int hi = std::min(n - 1, lo + 3);
  lo = std::max(0, hi - 3);
  TangentField out(X[0].grid);
  for (int a = lo; a <= hi; ++a) {
    double w = 1.0;
    for (int b = lo; b <= hi; ++b)
      if (b != a) w *= (s - this->s[b]) / (this->s[a] - this->s[b]);
    for (std::size_t i = 0; i < out.th.size(); ++i) {
      out.th[i] += w * X[a].th[i];
      out.ph[i] += w * X[a].ph[i];
    }
  }
  return out;
}

ScalarField GronwallFlow::vol_factor(std::size_t i) const {
  ScalarField v = log_vol_transported.at(i);
  for (double& x : v.mutable_values()) x = std::exp(x);
  return v;
}

GronwallFlow integrate_flow(const GridPtr& g, const XFunction& X, const FlowConfig& cfg) {
  if (cfg.times.empty()) throw Error(ErrorCode::ConfigError, "integrate_flow needs at least one time");
  for (std::size_t i = 1; i < cfg.times.size(); ++i)
    if (!(cfg.times[i] > cfg.times[i - 1])) throw Error(ErrorCode::ConfigError, "flow times must increase");
  const int band = cfg.eval_band < 0 ? g->lmax() : std::min(cfg.eval_band, g->ltrans());
  const int N = g->size();

  GronwallFlow fl;
  std::vector<std::array<double, 3>> y(N);
  for (int i = 0; i < N; ++i) g->position(i, y[i].data());
  std::vector<double> L(N, 0.0);
  ScalarField ell(g, 0.0);

  auto k_update = [&](const XSample& xs) {
    fl.k_bound = std::max(fl.k_bound, sphere::sup_norm(xs.div) * (cfg.r0 + xs.s) * (cfg.r0 + xs.s) / cfg.r0);
  };
  auto store = [&](double s) {
    fl.s.push_back(s);
    std::array<ScalarField, 3> m{ScalarField(g), ScalarField(g), ScalarField(g)};
    for (int a = 0; a < 3; ++a) {
      auto& v = m[a].mutable_values();
      for (int i = 0; i < N; ++i) v[i] = y[i][a];
    }
    fl.map.push_back(std::move(m));
    fl.log_vol_characteristic.emplace_back(g, L);
    fl.log_vol_transported.push_back(ell);
  };

  XSample x0 = prepare(g, cfg.times[0], X(cfg.times[0]), band, cfg.band_tol);
  k_update(x0);
  store(cfg.times[0]);

  for (std::size_t step = 1; step < cfg.times.size(); ++step) {
    const double t0 = cfg.times[step - 1], t1 = cfg.times[step], h = t1 - t0;
    XSample xm = prepare(g, t0 + 0.5 * h, X(t0 + 0.5 * h), band, cfg.band_tol);
    XSample x1 = prepare(g, t1, X(t1), band, cfg.band_tol);
    k_update(xm);
    k_update(x1);

    for (int i = 0; i < N; ++i) {
      double k[4][4];
      double p[3];
      eval_point(x0, band, y[i].data(), k[0]);
      for (int a = 0; a < 3; ++a) p[a] = y[i][a] + 0.5 * h * k[0][a];
      eval_point(xm, band, p, k[1]);
      for (int a = 0; a < 3; ++a) p[a] = y[i][a] + 0.5 * h * k[1][a];
      eval_point(xm, band, p, k[2]);
      for (int a = 0; a < 3; ++a) p[a] = y[i][a] + h * k[2][a];
      eval_point(x1, band, p, k[3]);
      double nrm = 0.0;
      for (int a = 0; a < 3; ++a) {
        y[i][a] += h / 6.0 * (k[0][a] + 2.0 * k[1][a] + 2.0 * k[2][a] + k[3][a]);
        nrm += y[i][a] * y[i][a];
      }
      nrm = std::sqrt(nrm);
      for (int a = 0; a < 3; ++a) y[i][a] /= nrm;
      L[i] -= h / 6.0 * (k[0][3] + 2.0 * k[1][3] + 2.0 * k[2][3] + k[3][3]);
    }

    {
      const ScalarField k1 = transported_rhs(x0, ell);
      ScalarField e2 = ell;
      e2.add_scaled(k1, 0.5 * h);
      const ScalarField k2 = transported_rhs(xm, sphere::truncate(e2));
      ScalarField e3 = ell;
      e3.add_scaled(k2, 0.5 * h);
      const ScalarField k3 = transported_rhs(xm, sphere::truncate(e3));
      ScalarField e4 = ell;
      e4.add_scaled(k3, h);
      const ScalarField k4 = transported_rhs(x1, sphere::truncate(e4));
      ell.add_scaled(k1, h / 6.0);
      ell.add_scaled(k2, h / 3.0);
      ell.add_scaled(k3, h / 3.0);
      ell.add_scaled(k4, h / 6.0);
      ell = sphere::truncate(ell);
    }
    x0 = std::move(x1);
    store(t1);
  }

  // Jacobian determinant phi . (d_theta phi x d_phi phi / sin theta) of the map
  for (std::size_t t = 0; t < fl.s.size(); ++t) {
    const auto& m = fl.map[t];
    const TangentField d[3] = {sphere::grad(m[0]), sphere::grad(m[1]), sphere::grad(m[2])};
    std::vector<double> lj(N);
    for (int i = 0; i < N; ++i) {
      const double P[3] = {m[0][i], m[1][i], m[2][i]};
      const double A[3] = {d[0].th[i], d[1].th[i], d[2].th[i]};
      const double B[3] = {d[0].ph[i], d[1].ph[i], d[2].ph[i]};
      const double J = P[0] * (A[1] * B[2] - A[2] * B[1]) + P[1] * (A[2] * B[0] - A[0] * B[2]) +
                       P[2] * (A[0] * B[1] - A[1] * B[0]);
      fl.min_jacobian = std::min(fl.min_jacobian, J);
      if (!(J > 0.0)) {
        std::ostringstream os;
        os << "flow map is not a diffeomorphism: Jacobian " << J << " at node " << i << ", s = " << fl.s[t];
        throw Error(ErrorCode::NonDiffeo, os.str());
      }
      lj[i] = -std::log(J);
    }
    fl.log_vol_jacobian.emplace_back(g, std::move(lj));

    const auto& lc = fl.log_vol_characteristic[t];
    const auto& le = fl.log_vol_transported[t];
    const auto& lec = le.coeffs();
    for (int i = 0; i < N; ++i) {
      double th, ph;
      const double P[3] = {m[0][i], m[1][i], m[2][i]};
      to_angles(P, th, ph);
      const double eul = PointSynth(g->lmax(), th, ph).value(lec);
      fl.route_mismatch = std::max({fl.route_mismatch, std::abs(lc[i] - fl.log_vol_jacobian[t][i]),
                                    std::abs(lc[i] - eul)});
    }
  }
  return fl;
}

GronwallFlow integrate_flow(const GridPtr& grid, const XSeries& xs, const FlowConfig& cfg) {
  return integrate_flow(grid, [&](double s) { return xs.at(s); }, cfg);
}

LpReport lp_comparability(const GronwallFlow& flow, const ScalarField& f, double p, std::size_t i,
                          double rel_slack) {
  if (i >= flow.s.size()) throw Error(ErrorCode::ConfigError, "lp_comparability: flow time out of range");
  const GridPtr& g = f.grid();
  const auto& m = flow.map[i];
  const auto& fc = f.coeffs();
  std::vector<double> comp(g->size());
  for (int n = 0; n < g->size(); ++n) {
    double th, ph;
    const double P[3] = {m[0][n], m[1][n], m[2][n]};
    to_angles(P, th, ph);
    comp[n] = PointSynth(g->ltrans(), th, ph).value(fc);
  }
  LpReport r;
  r.norm_f = sphere::lp_norm(f, p);
  r.norm_direct = sphere::lp_norm(ScalarField(g, std::move(comp)), p);
  // |f o phi|^p integrates against tilde-phi
  double acc = 0.0;
  const auto& le = flow.log_vol_transported[i];
  for (int n = 0; n < g->size(); ++n) acc += g->area_weight(n) * std::pow(std::abs(f[n]), p) * std::exp(le[n]);
  r.norm_cov = std::pow(acc, 1.0 / p);
  r.lower = std::exp(-flow.k_bound) * r.norm_f;
  r.upper = std::exp(flow.k_bound) * r.norm_f;
  const double slack = rel_slack * r.norm_f;
  r.pass = r.norm_direct >= r.lower - slack && r.norm_direct <= r.upper + slack && r.norm_cov >= r.lower - slack &&
           r.norm_cov <= r.upper + slack;
  return r;
}

}  // namespace nullfol::analysis
