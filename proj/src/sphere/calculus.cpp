#include "sphere/calculus.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace nullfol::sphere {

namespace {

int degree_of(int idx) {
  int l = static_cast<int>(std::sqrt(static_cast<double>(idx)));
  while (l * l > idx) --l;
  while ((l + 1) * (l + 1) <= idx) ++l;
  return l;
}

double sum_pow(const GridPtr& g, const std::vector<double>& sq, double p) {
  // sq holds the pointwise squared norm
  double acc = 0.0;
  for (int i = 0; i < g->size(); ++i) acc += g->area_weight(i) * std::pow(sq[i], 0.5 * p);
  return acc;
}

void add_squares(const CartField& t, std::vector<double>& sq) {
  for (const auto& c : t.comp)
    for (std::size_t i = 0; i < c.size(); ++i) sq[i] += c[i] * c[i];
}

}  // namespace

ScalarField truncate(const ScalarField& f, int band) {
  const GridPtr& g = f.grid();
  if (band < 0) band = g->lmax();
  if (f.is_uniform()) return f;
  std::vector<double> c(f.coeffs().begin(), f.coeffs().begin() + coeff_count(std::min(band, g->ltrans())));
  c.resize(g->ncoeff(), 0.0);
  return ScalarField::from_coeffs(g, c);
}

double spectral_tail(const ScalarField& f, int band) {
  const auto& c = f.coeffs();
  double tail = 0.0, total = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double e = c[i] * c[i];
    total += e;
    if (static_cast<int>(i) >= coeff_count(band)) tail += e;
  }
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

double integrate(const ScalarField& f) {
  const GridPtr& g = f.grid();
  double acc = 0.0;
  for (int i = 0; i < g->size(); ++i) acc += g->area_weight(i) * f[i];
  return acc;
}

double mean(const ScalarField& f) { return f.is_uniform() ? f[0] : integrate(f) / (4.0 * std::numbers::pi); }

TangentField grad(const ScalarField& f) {
  TangentField v(f.grid());
  f.grid()->synthesis_grad(f.coeffs(), v.th, v.ph);
  return v;
}

ScalarField laplacian(const ScalarField& f) {
  std::vector<double> c = f.coeffs();
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double l = degree_of(static_cast<int>(i));
    c[i] *= -l * (l + 1.0);
  }
  return ScalarField::from_coeffs(f.grid(), c);
}

ScalarField inv_laplacian(const ScalarField& g) {
  const double m = mean(g);
  if (std::abs(m) > 1e-10 * std::max(1.0, sup_norm(g)))
    throw Error(ErrorCode::NotMeanZero, "inv_laplacian: mean is " + std::to_string(m));
  std::vector<double> c = g.coeffs();
  c[0] = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    const double l = degree_of(static_cast<int>(i));
    c[i] /= -l * (l + 1.0);
  }
  return ScalarField::from_coeffs(g.grid(), c);
}

CartField to_cart(const TangentField& v) {
  CartField t(v.grid, 1);
  double x[3], et[3], ep[3];
  for (int i = 0; i < v.grid->size(); ++i) {
    v.grid->frame(i, x, et, ep);
    for (int a = 0; a < 3; ++a) t.comp[a][i] = v.th[i] * et[a] + v.ph[i] * ep[a];
  }
  return t;
}

TangentField to_tangent(const CartField& t) {
  if (t.rank != 1) throw Error(ErrorCode::GridMismatch, "to_tangent: rank must be 1");
  TangentField v(t.grid);
  double x[3], et[3], ep[3];
  for (int i = 0; i < t.grid->size(); ++i) {
    t.grid->frame(i, x, et, ep);
    double a = 0.0, b = 0.0;
    for (int c = 0; c < 3; ++c) {
      a += t.comp[c][i] * et[c];
      b += t.comp[c][i] * ep[c];
    }
    v.th[i] = a;
    v.ph[i] = b;
  }
  return v;
}

SymTensorField to_sym_tensor(const CartField& t) {
  if (t.rank != 2) throw Error(ErrorCode::GridMismatch, "to_sym_tensor: rank must be 2");
  SymTensorField h(t.grid);
  double x[3], et[3], ep[3];
  for (int i = 0; i < t.grid->size(); ++i) {
    t.grid->frame(i, x, et, ep);
    double tt = 0.0, tp = 0.0, pt = 0.0, pp = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double v = t.comp[a + 3 * b][i];
        tt += et[a] * v * et[b];
        tp += et[a] * v * ep[b];
        pt += ep[a] * v * et[b];
        pp += ep[a] * v * ep[b];
      }
    h.tt[i] = tt;
    h.tp[i] = 0.5 * (tp + pt);
    h.pp[i] = pp;
  }
  return h;
}

CartField cart_grad(const ScalarField& f) {
  const GridPtr& g = f.grid();
  CartField t(g, 1);
  std::vector<double> gt(g->size()), gp(g->size());
  g->synthesis_grad(f.coeffs(), gt, gp);
  double x[3], et[3], ep[3];
  for (int i = 0; i < g->size(); ++i) {
    g->frame(i, x, et, ep);
    for (int a = 0; a < 3; ++a) t.comp[a][i] = gt[i] * et[a] + gp[i] * ep[a];
  }
  return t;
}

CartField cov_deriv(const CartField& t) {
  const GridPtr& g = t.grid;
  const int n = g->size();
  CartField out(g, t.rank + 1);
  std::vector<double> coeffs(g->ncoeff()), gt(n), gp(n);
  double x[3], et[3], ep[3];
  for (int c = 0; c < t.ncomp(); ++c) {
    g->analysis(t.comp[c], coeffs);
    g->synthesis_grad(coeffs, gt, gp);
    for (int i = 0; i < n; ++i) {
      g->frame(i, x, et, ep);
      for (int a = 0; a < 3; ++a) out.comp[a + 3 * c][i] = gt[i] * et[a] + gp[i] * ep[a];
    }
  }
  // project the inherited slots back onto the tangent plane
  const int nc = out.ncomp();
  std::vector<double> buf(nc);
  for (int i = 0; i < n; ++i) {
    g->position(i, x);
    for (int slot = 1; slot <= t.rank; ++slot) {
      int stride = 1;
      for (int s = 0; s < slot; ++s) stride *= 3;
      for (int c = 0; c < nc; ++c) buf[c] = out.comp[c][i];
      for (int c = 0; c < nc; ++c) {
        const int a = (c / stride) % 3;
        if (a != 0) continue;
        const double dot =
            x[0] * buf[c] + x[1] * buf[c + stride] + x[2] * buf[c + 2 * stride];
        for (int b = 0; b < 3; ++b) out.comp[c + b * stride][i] = buf[c + b * stride] - x[b] * dot;
      }
    }
  }
  return out;
}

CartField trace01(const CartField& t) {
  if (t.rank < 2) throw Error(ErrorCode::UnsupportedOrder, "trace01: rank below 2");
  CartField out(t.grid, t.rank - 2);
  for (int c = 0; c < out.ncomp(); ++c)
    for (int a = 0; a < 3; ++a) {
      const auto& src = t.comp[a + 3 * a + 9 * c];
      auto& dst = out.comp[c];
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  return out;
}

ScalarField component(const CartField& t, int c) { return ScalarField(t.grid, t.comp[c]); }

SymTensorField hessian(const ScalarField& f) { return to_sym_tensor(cov_deriv(cart_grad(f))); }

ScalarField divergence(const TangentField& v) {
  CartField d = trace01(cov_deriv(to_cart(v)));
  return ScalarField(v.grid, std::move(d.comp[0]));
}

double sobolev_norm(const ScalarField& f, int n, double p) {
  if (n < 0 || n > kMaxScalarDepth)
    throw Error(ErrorCode::UnsupportedOrder,
                "scalar Sobolev order " + std::to_string(n) + " exceeds derivative depth");
  const GridPtr& g = f.grid();
  std::vector<double> sq(g->size());
  for (int i = 0; i < g->size(); ++i) sq[i] = f[i] * f[i];
  double acc = sum_pow(g, sq, p);
  if (n >= 1) {
    CartField t = cart_grad(f);
    for (int k = 1; k <= n; ++k) {
      if (k > 1) t = cov_deriv(t);
      std::fill(sq.begin(), sq.end(), 0.0);
      add_squares(t, sq);
      acc += sum_pow(g, sq, p);
    }
  }
  return std::pow(acc, 1.0 / p);
}

double sobolev_norm(const TangentField& v, int n, double p) {
  if (n < 0 || n > kMaxTangentDepth)
    throw Error(ErrorCode::UnsupportedOrder,
                "tangent Sobolev order " + std::to_string(n) + " exceeds derivative depth");
  const GridPtr& g = v.grid;
  std::vector<double> sq(g->size());
  CartField t = to_cart(v);
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) t = cov_deriv(t);
    std::fill(sq.begin(), sq.end(), 0.0);
    add_squares(t, sq);
    acc += sum_pow(g, sq, p);
  }
  return std::pow(acc, 1.0 / p);
}

double grad_sobolev_norm(const ScalarField& f, int n, double p) {
  if (n < 0 || n > kMaxTangentDepth)
    throw Error(ErrorCode::UnsupportedOrder,
                "gradient Sobolev order " + std::to_string(n) + " exceeds derivative depth");
  const GridPtr& g = f.grid();
  std::vector<double> sq(g->size());
  CartField t = cart_grad(f);
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) t = cov_deriv(t);
    std::fill(sq.begin(), sq.end(), 0.0);
    add_squares(t, sq);
    acc += sum_pow(g, sq, p);
  }
  return std::pow(acc, 1.0 / p);
}

double lp_norm(const ScalarField& f, double p) {
  std::vector<double> sq(f.size());
  for (int i = 0; i < f.size(); ++i) sq[i] = f[i] * f[i];
  return std::pow(sum_pow(f.grid(), sq, p), 1.0 / p);
}

double sup_norm(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

TangentField rotation_field(const GridPtr& grid, int axis) {
  if (axis < 1 || axis > 3) throw Error(ErrorCode::UnsupportedOrder, "rotation axis must be 1, 2 or 3");
  CartField t(grid, 1);
  double x[3];
  const int i = axis - 1, j = (i + 1) % 3, k = (i + 2) % 3;
  for (int n = 0; n < grid->size(); ++n) {
    grid->position(n, x);
    // (e_i x x)_k = x_j, (e_i x x)_j = -x_k
    t.comp[k][n] = x[j];
    t.comp[j][n] = -x[k];
  }
  return to_tangent(t);
}

ScalarField directional(const TangentField& v, const ScalarField& f) {
  check_same_grid(v.grid, f.grid(), "directional");
  TangentField g = grad(f);
  std::vector<double> out(f.size());
  for (int i = 0; i < f.size(); ++i) out[i] = v.th[i] * g.th[i] + v.ph[i] * g.ph[i];
  return ScalarField(f.grid(), std::move(out));
}

ScalarField rotate_derivative(const ScalarField& f, int axis) {
  return directional(rotation_field(f.grid(), axis), f);
}

TangentField lie_derivative(const TangentField& r, const TangentField& x) {
  check_same_grid(r.grid, x.grid, "lie_derivative");
  CartField rc = to_cart(r), xc = to_cart(x);
  CartField dr = cov_deriv(rc), dx = cov_deriv(xc);
  CartField out(r.grid, 1);
  for (int i = 0; i < r.grid->size(); ++i)
    for (int a = 0; a < 3; ++a) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k)
        acc += rc.comp[k][i] * dx.comp[k + 3 * a][i] - xc.comp[k][i] * dr.comp[k + 3 * a][i];
      out.comp[a][i] = acc;
    }
  return to_tangent(out);
}

}  // namespace nullfol::sphere
