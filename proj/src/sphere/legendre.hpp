#pragma once

#include <cstddef>
#include <vector>

namespace nullfol::sphere {

// Real orthonormal spherical harmonics, no Condon-Shortley phase:
//   Y_l0 = P_l0,  Y_lm = sqrt2 P_lm cos(m phi),  Y_l,-m = sqrt2 P_lm sin(m phi)  (m > 0)
// where P_lm are the 4pi-orthonormalised associated Legendre functions.
// Coefficient vectors are indexed by l*l + l + m.
constexpr int coeff_index(int l, int m) { return l * l + l + m; }
constexpr int coeff_count(int lmax) { return (lmax + 1) * (lmax + 1); }

// Packed (m, l) layout for tables with m >= 0, l in [m, lmax].
constexpr std::size_t tri_index(int lmax, int m, int l) {
  return static_cast<std::size_t>(m * (lmax + 1) - (m * (m - 1)) / 2 + (l - m));
}
constexpr std::size_t tri_count(int lmax) { return tri_index(lmax, lmax, lmax) + 1; }

struct LegendreColumn {
  std::vector<double> p;       // P_lm(cos theta)
  std::vector<double> dp;      // d/dtheta P_lm
  std::vector<double> mq;      // m * P_lm / sin theta (regular at the poles)
};

// Fills the packed tables for a single colatitude.
void legendre_column(int lmax, double cos_theta, double sin_theta, LegendreColumn& out);

}  // namespace nullfol::sphere
