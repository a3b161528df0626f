#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "sphere/field.hpp"

namespace nullfol::geometry {

// Coefficients of one potential: power k of (us/r0) -> harmonic coefficients
// (index l*l+l+m, band <= profile band).
using PotentialTable = std::vector<std::vector<double>>;

// Shape functions of the perturbed family, each a polynomial in us/r0 with
// harmonic coefficients:
//   chi_omega = psi_O
//   chi_b     = grad psi_E + x cross grad psi_B
//   chi_g     = psi_T circg + (hess psi_S - 1/2 lap psi_S circg) + sym grad(x cross grad psi_R)
struct PerturbationProfile {
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  int band = 0;
  int powers = 1;
  PotentialTable omega;
  PotentialTable b_grad, b_curl;
  PotentialTable g_trace, g_grad, g_curl;

  static PerturbationProfile zero(int band = 1, int powers = 1);
  // Random profile with derivative-aware decay so that the envelope ratios stay
  // well below one for k <= 4, |us| < r0.
  static PerturbationProfile generate(double epsilon, std::uint64_t seed, int band = 3, int powers = 3,
                                      double amplitude = 1.0);
  // chi_omega = amplitude, every other channel zero
  static PerturbationProfile adversarial(double epsilon, double amplitude = 10.0);

  void check() const;
  int channel_count() const { return 6; }
  const PotentialTable& channel(int c) const;
  PotentialTable& channel(int c);
  static const char* channel_name(int c);
};

// Cartesian tangent jets of the shape functions at every node of one grid.
// Per node and power k: chi_O (1), grad (3), hess (9), chi_b (3), grad (9),
// hess (27), chi_g (9), grad (27), hess (81).
class ProfileCache {
 public:
  static constexpr int kOmega = 0, kOmegaD = 1, kOmegaDD = 4;
  static constexpr int kB = 13, kBD = 16, kBDD = 25;
  static constexpr int kG = 52, kGD = 61, kGDD = 88;
  static constexpr int kStride = 169;

  ProfileCache(const PerturbationProfile& profile, sphere::GridPtr grid);

  const sphere::GridPtr& grid() const { return grid_; }
  int powers() const { return powers_; }
  const double* node(int idx, int k) const {
    return &data_[(static_cast<std::size_t>(idx) * powers_ + k) * kStride];
  }
  // same layout evaluated at an arbitrary point by harmonic synthesis
  void at_point(double theta, double phi, std::vector<double>& out) const;

 private:
  sphere::GridPtr grid_;
  int powers_;
  std::vector<double> data_;
  mutable std::once_flag coeff_once_;
  mutable std::vector<std::vector<double>> coeffs_;  // [k * kStride + c]
};

// coefficient of (us/r0)^power in chi_omega (channel 0, rank 0), chi_b (1, rank 1)
// or chi_g (2, rank 2), as a Cartesian tangent field
sphere::CartField shape_field(const PerturbationProfile& profile, const sphere::GridPtr& grid,
                              int channel, int power);

}  // namespace nullfol::geometry
