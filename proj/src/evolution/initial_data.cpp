#include "evolution/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "errors.hpp"
#include "sphere/calculus.hpp"
#include "sphere/legendre.hpp"

namespace nullfol::evolution {

sphere::ScalarField make_initial_data(const sphere::GridPtr& grid, std::uint64_t seed, int band, double grad_norm,
                                      double mean, int depth, double p, double decay) {
  if (band < 1 || band > grid->lmax())
    throw Error(ErrorCode::ConfigError, "initial data band must lie in [1, lmax]");
  if (grad_norm < 0.0) throw Error(ErrorCode::ConfigError, "initial gradient norm must be non-negative");
  std::vector<double> c(grid->ncoeff(), 0.0);
  if (grad_norm > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int l = 1; l <= band; ++l)
      for (int m = -l; m <= l; ++m)
        c[sphere::coeff_index(l, m)] = nd(rng) / std::pow(1.0 + l * (l + 1.0), 0.5 * decay);
    const double g = sphere::grad_sobolev_norm(sphere::ScalarField::from_coeffs(grid, c), depth, p);
    for (double& v : c) v *= grad_norm / g;
  }
  c[0] = mean * std::sqrt(4.0 * std::numbers::pi);
  return sphere::ScalarField::from_coeffs(grid, c);
}

}  // namespace nullfol::evolution
