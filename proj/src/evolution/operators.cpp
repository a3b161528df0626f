#include "evolution/operators.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "evolution/tensor_ops.hpp"

namespace nullfol::evolution {

using geometry::Mat3;
using geometry::Vec3;
using sphere::CartField;

namespace {

Vec3 cart_at(const CartField& t, int i) { return {t.comp[0][i], t.comp[1][i], t.comp[2][i]}; }

Mat3 mat_at(const CartField& t, int i) {
  Mat3 m{};
  for (int c = 0; c < 9; ++c) m[c] = t.comp[c][i];
  return m;
}

Mat3 a_matrix(const MetricSample& m) {
  Mat3 gi = ops::tangent_inverse(m.gslash.v, m.x);
  for (double& v : gi) v *= m.omega_sq.v;
  return gi;
}

TangentField tangent_from(const std::vector<Vec3>& v, const sphere::GridPtr& g) {
  CartField t(g, 1);
  for (int i = 0; i < g->size(); ++i)
    for (int a = 0; a < 3; ++a) t.comp[a][i] = v[i][a];
  return sphere::to_tangent(t);
}

}  // namespace

std::vector<MetricSample> sample_on_graph(const MetricFamily& metric, double s, const ScalarField& f,
                                          JetLevel level) {
  sphere::check_same_grid(metric.grid(), f.grid(), "sample_on_graph");
  const auto& p = metric.params();
  std::vector<MetricSample> out(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const double us = f[i];
    if (!geometry::in_domain(p, us, s)) {
      std::ostringstream os;
      os << "graph point us=" << us << " at s=" << s << " (node " << i << ") left the kappa-neighbourhood";
      throw Error(ErrorCode::OutOfDomain, os.str());
    }
    try {
      out[i] = metric.eval(i, us, s, level);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DomainError) throw Error(ErrorCode::OutOfDomain, e.what());
      throw;
    }
  }
  return out;
}

Transport transport(const MetricFamily& metric, double s, const ScalarField& f) {
  const auto& g = f.grid();
  auto ms = sample_on_graph(metric, s, f, JetLevel::Pointwise);
  CartField df = sphere::cart_grad(f);
  std::vector<double> F(f.size());
  std::vector<Vec3> X(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const Vec3 d = cart_at(df, i);
    const Mat3 A = a_matrix(ms[i]);
    const Vec3 Ad = ops::apply(A, d);
    F[i] = -ops::dot(ms[i].b.v, d) + ops::dot(d, Ad);
    for (int a = 0; a < 3; ++a) X[i][a] = -ms[i].b.v[a] + 2.0 * Ad[a];
  }
  return {ScalarField(g, std::move(F)), tangent_from(X, g)};
}

ScalarField rhs_F(const MetricFamily& metric, double s, const ScalarField& f) {
  return transport(metric, s, f).F;
}

TangentField assemble_X(const MetricFamily& metric, double s, const ScalarField& f) {
  return transport(metric, s, f).X;
}

FrameQuantities frame_quantities(const MetricFamily& metric, double s, const ScalarField& f) {
  const auto& g = f.grid();
  auto ms = sample_on_graph(metric, s, f, JetLevel::Pointwise);
  CartField df = sphere::cart_grad(f);
  std::vector<double> ve(f.size());
  std::vector<Vec3> vv(f.size()), bd(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const Vec3 d = cart_at(df, i);
    const Mat3 A = a_matrix(ms[i]);
    const Vec3 Ad = ops::apply(A, d);
    ve[i] = -ops::dot(d, Ad);
    for (int a = 0; a < 3; ++a) {
      vv[i][a] = -2.0 * Ad[a];
      bd[i][a] = ms[i].b.v[a] + vv[i][a];
    }
  }
  return {ScalarField(g, std::move(ve)), tangent_from(vv, g), tangent_from(bd, g)};
}

ScalarField null_residual(const MetricFamily& metric, double s, const ScalarField& f) {
  const auto& g = f.grid();
  auto ms = sample_on_graph(metric, s, f, JetLevel::Pointwise);
  CartField df = sphere::cart_grad(f);
  std::vector<double> res(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const Vec3 d = cart_at(df, i);
    const MetricSample& m = ms[i];
    const Mat3 A = a_matrix(m);
    const Vec3 Ad = ops::apply(A, d);
    const double ve = -ops::dot(d, Ad);
    Vec3 V{};
    for (int a = 0; a < 3; ++a) V[a] = m.b.v[a] - 2.0 * Ad[a];
    // g = 2 Omega^2 (ds du + du ds) + gslash(dtheta - b ds, dtheta - b ds), L = (1, ve, V)
    const double g_ss = ops::quad(m.gslash.v, m.b.v, m.b.v);
    const double g_su = 2.0 * m.omega_sq.v;
    const Vec3 g_si = ops::apply(m.gslash.v, m.b.v);
    res[i] = g_ss + 2.0 * g_su * ve - 2.0 * ops::dot(g_si, V) + ops::quad(m.gslash.v, V, V);
  }
  return ScalarField(g, std::move(res));
}

ReBreakdown assemble_re(const MetricFamily& metric, double s, const ScalarField& f) {
  const auto& g = f.grid();
  auto ms = sample_on_graph(metric, s, f, JetLevel::Full);
  CartField df = sphere::cart_grad(f);
  CartField hess = sphere::cov_deriv(df);
  ScalarField lap = sphere::laplacian(f);
  const int n = f.size();
  std::vector<double> ricci(n), bblk(n), ablk(n);

  for (int i = 0; i < n; ++i) {
    const MetricSample& m = ms[i];
    const Vec3 d = cart_at(df, i);
    const Mat3 H = mat_at(hess, i);  // H[k + 3 i] = nabla_k nabla_i f
    const double L = lap[i];
    const double grad2 = ops::dot(d, d);

    // A = w Ginv and its jets
    const Mat3 Gi = ops::tangent_inverse(m.gslash.v, m.x);
    const double w = m.omega_sq.v, wu = m.omega_sq.u, wuu = m.omega_sq.uu;
    const Vec3& dw = m.omega_sq.d;
    const Vec3& dwu = m.omega_sq.du;
    double lapw = 0.0;
    for (int k = 0; k < 3; ++k) lapw += m.omega_sq.dd[k + 3 * k];

    const Mat3& Gu = m.gslash.u;
    const Mat3& Guu = m.gslash.uu;
    const Mat3 GiGuGi = ops::mul3(Gi, Gu, Gi);
    const Mat3 dGi_u = ops::axpy(Mat3{}, -1.0, GiGuGi);
    Mat3 dGi_uu = ops::axpy(ops::mul3(GiGuGi, Gu, Gi), 1.0, ops::mul3(Gi, Gu, GiGuGi));
    dGi_uu = ops::axpy(dGi_uu, -1.0, ops::mul3(Gi, Guu, Gi));

    Mat3 dGi[3], dGi_du[3];
    Mat3 lapGi{};
    for (int k = 0; k < 3; ++k) {
      const Mat3 dG = ops::slice(m.gslash.d, k);
      const Mat3 dGu = ops::slice(m.gslash.du, k);
      const Mat3 GidGGi = ops::mul3(Gi, dG, Gi);
      dGi[k] = ops::axpy(Mat3{}, -1.0, GidGGi);
      Mat3 t = ops::axpy(ops::mul3(GiGuGi, dG, Gi), 1.0, ops::mul3(GidGGi, Gu, Gi));
      dGi_du[k] = ops::axpy(t, -1.0, ops::mul3(Gi, dGu, Gi));
      // second derivative along k twice
      Mat3 ddG{};
      for (int ij = 0; ij < 9; ++ij) ddG[ij] = m.gslash.dd[k + 3 * (k + 3 * ij)];
      lapGi = ops::axpy(lapGi, 2.0, ops::mul3(GidGGi, dG, Gi));
      lapGi = ops::axpy(lapGi, -1.0, ops::mul3(Gi, ddG, Gi));
    }

    Mat3 A{}, Au{}, Auu{}, lapA{};
    Mat3 dA[3], dAu[3];
    for (int ij = 0; ij < 9; ++ij) {
      A[ij] = w * Gi[ij];
      Au[ij] = wu * Gi[ij] + w * dGi_u[ij];
      Auu[ij] = wuu * Gi[ij] + 2.0 * wu * dGi_u[ij] + w * dGi_uu[ij];
      lapA[ij] = lapw * Gi[ij] + w * lapGi[ij];
      for (int k = 0; k < 3; ++k) lapA[ij] += 2.0 * dw[k] * dGi[k][ij];
    }
    for (int k = 0; k < 3; ++k)
      for (int ij = 0; ij < 9; ++ij) {
        dA[k][ij] = dw[k] * Gi[ij] + w * dGi[k][ij];
        dAu[k][ij] = dwu[k] * Gi[ij] + dw[k] * dGi_u[ij] + wu * dGi[k][ij] + w * dGi_du[k][ij];
      }

    // Ricci terms
    ricci[i] = -ops::dot(m.b.v, d) + 2.0 * ops::quad(A, d, d);

    // b-block
    double bb = 0.0;
    for (int a = 0; a < 3; ++a) {
      double lapb = 0.0;
      for (int k = 0; k < 3; ++k) lapb += m.b.dd[k + 3 * (k + 3 * a)];
      bb -= lapb * d[a];
      for (int k = 0; k < 3; ++k) {
        bb -= 2.0 * m.b.d[k + 3 * a] * H[k + 3 * a];
        bb -= 2.0 * m.b.du[k + 3 * a] * d[k] * d[a];
        bb -= 2.0 * m.b.u[a] * d[k] * H[k + 3 * a];
      }
      bb -= m.b.u[a] * d[a] * L;
      bb -= m.b.uu[a] * d[a] * grad2;
    }
    bblk[i] = bb;

    // A-block
    double ab = ops::quad(lapA, d, d);
    for (int k = 0; k < 3; ++k) {
      // 4 nabla^k A^{ij} f_i H_kj
      Vec3 Hk{H[k], H[k + 3], H[k + 6]};
      ab += 4.0 * ops::quad(dA[k], d, Hk);
      // 2 f_k d_u nabla^k A^{ij} f_i f_j
      ab += 2.0 * d[k] * ops::quad(dAu[k], d, d);
      // 2 A^{ij} H_ki H_kj
      ab += 2.0 * ops::quad(A, Hk, Hk);
    }
    // 4 d_u A^{ij} f_i f^k H_kj
    Vec3 Hd{};
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) Hd[j] += d[k] * H[k + 3 * j];
    ab += 4.0 * ops::quad(Au, d, Hd);
    ab += ops::quad(Au, d, d) * L;
    ab += ops::quad(Auu, d, d) * grad2;
    ablk[i] = ab;
  }

  ReBreakdown out{ScalarField(g, 0.0), ScalarField(g, std::move(ricci)), ScalarField(g, std::move(bblk)),
                  ScalarField(g, std::move(ablk))};
  out.re = out.ricci + out.b_block + out.a_block;
  return out;
}

ScalarField re_spectral(const MetricFamily& metric, double s, const ScalarField& f) {
  Transport t = transport(metric, s, f);
  ScalarField lapF = sphere::laplacian(t.F);
  ScalarField adv = sphere::directional(t.X, sphere::laplacian(f));
  return lapF - adv;
}

}  // namespace nullfol::evolution
