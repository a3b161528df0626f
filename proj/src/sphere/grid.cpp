#include "sphere/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace nullfol::sphere {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kPi = std::numbers::pi;

}  // namespace

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

std::shared_ptr<const SphereGrid> SphereGrid::create(const GridSpec& spec) {
  if (spec.nlat < 4) throw Error(ErrorCode::GridMismatch, "nlat must be at least 4");
  if (spec.nlon < 2 * spec.nlat)
    throw Error(ErrorCode::GridMismatch, "nlon must be at least 2*nlat");
  if (spec.lmax < 1 || spec.lmax > (2 * spec.nlat) / 3)
    throw Error(ErrorCode::GridMismatch,
                "lmax must lie in [1, floor(2*nlat/3)], got " + std::to_string(spec.lmax));
  return std::shared_ptr<const SphereGrid>(new SphereGrid(spec));
}

SphereGrid::SphereGrid(const GridSpec& spec)
    : spec_(spec), ltrans_(spec.nlat - 1), nfreq_(spec.nlon / 2 + 1) {
  const int nlat = spec.nlat;
  gauss_legendre(nlat, x_, w_);
  s_.resize(nlat);
  theta_.resize(nlat);
  area_w_.resize(nlat);
  for (int j = 0; j < nlat; ++j) {
    s_[j] = std::sqrt((1.0 - x_[j]) * (1.0 + x_[j]));
    theta_[j] = std::acos(x_[j]);
    area_w_[j] = w_[j] * 2.0 * kPi / spec.nlon;
  }

  cphi_.resize(spec.nlon);
  sphi_.resize(spec.nlon);
  for (int k = 0; k < spec.nlon; ++k) {
    cphi_[k] = std::cos(phi(k));
    sphi_[k] = std::sin(phi(k));
  }

  const std::size_t nt = tri_count(ltrans_);
  p_.assign(nt * nlat, 0.0);
  dp_.assign(nt * nlat, 0.0);
  mq_.assign(nt * nlat, 0.0);
  LegendreColumn col;
  for (int j = 0; j < nlat; ++j) {
    legendre_column(ltrans_, x_[j], s_[j], col);
    for (std::size_t t = 0; t < nt; ++t) {
      p_[t * nlat + j] = col.p[t];
      dp_[t * nlat + j] = col.dp[t];
      mq_[t * nlat + j] = col.mq[t];
    }
  }

  std::vector<double> rbuf(static_cast<std::size_t>(size()));
  std::vector<std::complex<double>> cbuf(static_cast<std::size_t>(nlat) * nfreq_);
  int n[1] = {spec.nlon};
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_many_dft_r2c(1, n, nlat, rbuf.data(), nullptr, 1, spec.nlon,
                                     reinterpret_cast<fftw_complex*>(cbuf.data()), nullptr, 1,
                                     nfreq_, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_many_dft_c2r(1, n, nlat, reinterpret_cast<fftw_complex*>(cbuf.data()),
                                     nullptr, 1, nfreq_, rbuf.data(), nullptr, 1, spec.nlon,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SphereGrid::~SphereGrid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

double SphereGrid::phi(int k) const { return 2.0 * kPi * k / spec_.nlon; }

void SphereGrid::position(int idx, double out[3]) const {
  const int j = idx / spec_.nlon, k = idx % spec_.nlon;
  out[0] = s_[j] * cphi_[k];
  out[1] = s_[j] * sphi_[k];
  out[2] = x_[j];
}

void SphereGrid::frame(int idx, double x[3], double et[3], double ep[3]) const {
  const int j = idx / spec_.nlon, k = idx % spec_.nlon;
  const double c = cphi_[k], s = sphi_[k];
  x[0] = s_[j] * c;
  x[1] = s_[j] * s;
  x[2] = x_[j];
  et[0] = x_[j] * c;
  et[1] = x_[j] * s;
  et[2] = -s_[j];
  ep[0] = -s;
  ep[1] = c;
  ep[2] = 0.0;
}

bool SphereGrid::same_as(const SphereGrid& o) const {
  return this == &o || (spec_.nlat == o.spec_.nlat && spec_.nlon == o.spec_.nlon &&
                        spec_.lmax == o.spec_.lmax);
}

void SphereGrid::fft_forward(const double* values, double* re, double* im) const {
  const int nlat = spec_.nlat;
  std::vector<double> in(values, values + size());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(nlat) * nfreq_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(plan_fwd_), in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  // layout of re/im: [m * nlat + j]
  for (int j = 0; j < nlat; ++j)
    for (int m = 0; m <= ltrans_; ++m) {
      re[m * nlat + j] = out[static_cast<std::size_t>(j) * nfreq_ + m].real();
      im[m * nlat + j] = out[static_cast<std::size_t>(j) * nfreq_ + m].imag();
    }
}

void SphereGrid::fft_backward(const double* a, const double* b, double* values) const {
  const int nlat = spec_.nlat;
  std::vector<std::complex<double>> in(static_cast<std::size_t>(nlat) * nfreq_);
  for (int j = 0; j < nlat; ++j) {
    in[static_cast<std::size_t>(j) * nfreq_] = {a[j], 0.0};
    for (int m = 1; m <= ltrans_; ++m)
      in[static_cast<std::size_t>(j) * nfreq_ + m] = {0.5 * a[m * nlat + j], -0.5 * b[m * nlat + j]};
  }
  fftw_execute_dft_c2r(static_cast<fftw_plan>(plan_bwd_), reinterpret_cast<fftw_complex*>(in.data()),
                       values);
}

void SphereGrid::analysis(std::span<const double> values, std::span<double> coeffs) const {
  if (static_cast<int>(values.size()) != size() || static_cast<int>(coeffs.size()) != ncoeff())
    throw Error(ErrorCode::GridMismatch, "analysis: buffer size does not match grid");
  const int nlat = spec_.nlat;
  const int nm = ltrans_ + 1;
  std::vector<double> re(static_cast<std::size_t>(nm) * nlat), im(re.size());
  fft_forward(values.data(), re.data(), im.data());
  const double scale = 2.0 * kPi / spec_.nlon;
  for (int m = 0; m <= ltrans_; ++m) {
    double* rr = &re[static_cast<std::size_t>(m) * nlat];
    double* ii = &im[static_cast<std::size_t>(m) * nlat];
    const double f = scale * (m == 0 ? 1.0 : std::numbers::sqrt2);
    for (int j = 0; j < nlat; ++j) {
      rr[j] *= w_[j] * f;
      ii[j] *= -w_[j] * f;
    }
    for (int l = m; l <= ltrans_; ++l) {
      const double* p = &p_[tri_index(ltrans_, m, l) * nlat];
      double ac = 0.0, as = 0.0;
      for (int j = 0; j < nlat; ++j) {
        ac += p[j] * rr[j];
        as += p[j] * ii[j];
      }
      coeffs[coeff_index(l, m)] = ac;
      if (m > 0) coeffs[coeff_index(l, -m)] = as;
    }
  }
}

void SphereGrid::fourier_to_values(const std::vector<double>& a, const std::vector<double>& b,
                                   std::span<double> values) const {
  fft_backward(a.data(), b.data(), values.data());
}

void SphereGrid::synthesis(std::span<const double> coeffs, std::span<double> values) const {
  if (static_cast<int>(values.size()) != size() || static_cast<int>(coeffs.size()) > ncoeff())
    throw Error(ErrorCode::GridMismatch, "synthesis: buffer size does not match grid");
  const int nlat = spec_.nlat;
  const int nc = static_cast<int>(coeffs.size());
  int lb = 0;
  while (coeff_count(lb) < nc) ++lb;
  std::vector<double> a(static_cast<std::size_t>(ltrans_ + 1) * nlat, 0.0), b(a.size(), 0.0);
  for (int m = 0; m <= lb; ++m) {
    double* am = &a[static_cast<std::size_t>(m) * nlat];
    double* bm = &b[static_cast<std::size_t>(m) * nlat];
    const double f = m == 0 ? 1.0 : std::numbers::sqrt2;
    for (int l = m; l <= lb; ++l) {
      const int ic = coeff_index(l, m);
      const double c = ic < nc ? coeffs[ic] * f : 0.0;
      const int is = coeff_index(l, -m);
      const double d = (m > 0 && is < nc) ? coeffs[is] * f : 0.0;
      if (c == 0.0 && d == 0.0) continue;
      const double* p = &p_[tri_index(ltrans_, m, l) * nlat];
      for (int j = 0; j < nlat; ++j) {
        am[j] += c * p[j];
        bm[j] += d * p[j];
      }
    }
  }
  fourier_to_values(a, b, values);
}

void SphereGrid::synthesis_grad(std::span<const double> coeffs, std::span<double> d_theta,
                                std::span<double> d_phi) const {
  if (static_cast<int>(d_theta.size()) != size() || static_cast<int>(d_phi.size()) != size() ||
      static_cast<int>(coeffs.size()) > ncoeff())
    throw Error(ErrorCode::GridMismatch, "synthesis_grad: buffer size does not match grid");
  const int nlat = spec_.nlat;
  const int nc = static_cast<int>(coeffs.size());
  int lb = 0;
  while (coeff_count(lb) < nc) ++lb;
  const std::size_t n = static_cast<std::size_t>(ltrans_ + 1) * nlat;
  std::vector<double> ta(n, 0.0), tb(n, 0.0), pa(n, 0.0), pb(n, 0.0);
  for (int m = 0; m <= lb; ++m) {
    const std::size_t off = static_cast<std::size_t>(m) * nlat;
    const double f = m == 0 ? 1.0 : std::numbers::sqrt2;
    for (int l = m; l <= lb; ++l) {
      const int ic = coeff_index(l, m);
      const double c = ic < nc ? coeffs[ic] * f : 0.0;
      const int is = coeff_index(l, -m);
      const double d = (m > 0 && is < nc) ? coeffs[is] * f : 0.0;
      if (c == 0.0 && d == 0.0) continue;
      const std::size_t t = tri_index(ltrans_, m, l) * nlat;
      const double* dp = &dp_[t];
      const double* mq = &mq_[t];
      for (int j = 0; j < nlat; ++j) {
        ta[off + j] += c * dp[j];
        tb[off + j] += d * dp[j];
        // d_phi of (c cos + d sin) = m(-c sin + d cos)
        pa[off + j] += d * mq[j];
        pb[off + j] -= c * mq[j];
      }
    }
  }
  fourier_to_values(ta, tb, d_theta);
  fourier_to_values(pa, pb, d_phi);
}

PointSynth::PointSynth(int lband, double theta, double phi) : lband_(lband) {
  legendre_column(lband, std::cos(theta), std::sin(theta), col_);
  cm_.resize(lband + 1);
  sm_.resize(lband + 1);
  for (int m = 0; m <= lband; ++m) {
    cm_[m] = std::cos(m * phi);
    sm_[m] = std::sin(m * phi);
  }
}

double PointSynth::value(std::span<const double> coeffs) const {
  const int nc = static_cast<int>(coeffs.size());
  double acc = 0.0;
  for (int m = 0; m <= lband_; ++m) {
    const double f = m == 0 ? 1.0 : std::numbers::sqrt2;
    for (int l = m; l <= lband_; ++l) {
      const int ic = coeff_index(l, m);
      if (ic >= nc) break;
      double v = coeffs[ic] * cm_[m];
      if (m > 0) v += coeffs[coeff_index(l, -m)] * sm_[m];
      acc += f * col_.p[tri_index(lband_, m, l)] * v;
    }
  }
  return acc;
}

void PointSynth::grad(std::span<const double> coeffs, double& d_theta, double& d_phi) const {
  const int nc = static_cast<int>(coeffs.size());
  double gt = 0.0, gp = 0.0;
  for (int m = 0; m <= lband_; ++m) {
    const double f = m == 0 ? 1.0 : std::numbers::sqrt2;
    for (int l = m; l <= lband_; ++l) {
      const int ic = coeff_index(l, m);
      if (ic >= nc) break;
      const double c = coeffs[ic];
      const double d = m > 0 ? coeffs[coeff_index(l, -m)] : 0.0;
      const std::size_t t = tri_index(lband_, m, l);
      gt += f * col_.dp[t] * (c * cm_[m] + d * sm_[m]);
      gp += f * col_.mq[t] * (d * cm_[m] - c * sm_[m]);
    }
  }
  d_theta = gt;
  d_phi = gp;
}

}  // namespace nullfol::sphere
