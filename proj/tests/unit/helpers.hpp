#pragma once

#include <random>
#include <vector>

#include "sphere/field.hpp"

namespace testutil {

inline std::vector<double> random_coeffs(const nullfol::sphere::GridPtr& g, int band, unsigned seed,
                                         double amp = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> c(g->ncoeff(), 0.0);
  for (int l = 0; l <= band; ++l)
    for (int m = -l; m <= l; ++m) c[l * l + l + m] = amp * nd(rng) / (1.0 + l * l);
  return c;
}

inline nullfol::sphere::ScalarField random_field(const nullfol::sphere::GridPtr& g, int band,
                                                 unsigned seed, double amp = 1.0) {
  return nullfol::sphere::ScalarField::from_coeffs(g, random_coeffs(g, band, seed, amp));
}

inline nullfol::sphere::ScalarField harmonic(const nullfol::sphere::GridPtr& g, int l, int m,
                                             double amp = 1.0) {
  std::vector<double> c(g->ncoeff(), 0.0);
  c[l * l + l + m] = amp;
  return nullfol::sphere::ScalarField::from_coeffs(g, c);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
