#pragma once

#include <memory>
#include <span>
#include <vector>

#include "sphere/legendre.hpp"

namespace nullfol::sphere {

struct GridSpec {
  int nlat = 48;
  int nlon = 96;
  int lmax = 31;
};

// Gauss-Legendre x equispaced grid on the unit sphere. Values are stored
// latitude-major: index = j * nlon + k.
//
// Two bands are involved: lmax is the dealiasing band used to truncate
// evolving fields, ltrans = nlat - 1 is the band of the transforms, so
// products and derivatives of lmax-limited data are represented exactly.
class SphereGrid {
 public:
  static std::shared_ptr<const SphereGrid> create(const GridSpec& spec);
  ~SphereGrid();
  SphereGrid(const SphereGrid&) = delete;
  SphereGrid& operator=(const SphereGrid&) = delete;

  const GridSpec& spec() const { return spec_; }
  int nlat() const { return spec_.nlat; }
  int nlon() const { return spec_.nlon; }
  int lmax() const { return spec_.lmax; }
  int ltrans() const { return ltrans_; }
  int size() const { return spec_.nlat * spec_.nlon; }
  int ncoeff() const { return coeff_count(ltrans_); }

  double cos_theta(int j) const { return x_[j]; }
  double sin_theta(int j) const { return s_[j]; }
  double theta(int j) const { return theta_[j]; }
  double phi(int k) const;
  double lat_weight(int j) const { return w_[j]; }
  // quadrature weight of a node for integrals against dvol of the unit sphere
  double area_weight(int idx) const { return area_w_[idx / spec_.nlon]; }
  // unit position vector of a node
  void position(int idx, double out[3]) const;
  // position and the orthonormal dyad (e_theta, e_phi) at a node
  void frame(int idx, double x[3], double et[3], double ep[3]) const;

  // values (size()) -> coefficients (ncoeff())
  void analysis(std::span<const double> values, std::span<double> coeffs) const;
  // coefficients (any length up to ncoeff(), missing entries are zero) -> values
  void synthesis(std::span<const double> coeffs, std::span<double> values) const;
  // values of d_theta f and (1/sin theta) d_phi f
  void synthesis_grad(std::span<const double> coeffs, std::span<double> d_theta,
                      std::span<double> d_phi) const;

  bool same_as(const SphereGrid& other) const;

 private:
  explicit SphereGrid(const GridSpec& spec);
  void fft_forward(const double* values, double* re, double* im) const;
  void fft_backward(const double* re, const double* im, double* values) const;
  // values from per-latitude Fourier sums:  sum_m a_m cos(m phi) + b_m sin(m phi)
  void fourier_to_values(const std::vector<double>& a, const std::vector<double>& b,
                         std::span<double> values) const;

  GridSpec spec_;
  int ltrans_;
  int nfreq_;
  std::vector<double> x_, s_, theta_, w_, area_w_, cphi_, sphi_;
  // packed tables [tri_index * nlat + j]
  std::vector<double> p_, dp_, mq_;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

// Direct synthesis at arbitrary points (used for flows and off-grid checks).
class PointSynth {
 public:
  PointSynth(int lband, double theta, double phi);
  double value(std::span<const double> coeffs) const;
  // d_theta and (1/sin theta) d_phi; the latter is regular at the poles
  void grad(std::span<const double> coeffs, double& d_theta, double& d_phi) const;

 private:
  int lband_;
  LegendreColumn col_;
  std::vector<double> cm_, sm_;
};

// Gauss-Legendre nodes on [-1, 1], descending order, with weights.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

}  // namespace nullfol::sphere
