#pragma once

#include <cstdint>

#include "sphere/field.hpp"

namespace nullfol::evolution {

// Random smooth graph with prescribed size: normal coefficients for
// 1 <= l <= band damped by (1 + l(l+1))^{-decay/2}, rescaled so that
// |grad f|^{depth,p} = grad_norm, plus the constant mean.
sphere::ScalarField make_initial_data(const sphere::GridPtr& grid, std::uint64_t seed, int band, double grad_norm,
                                      double mean, int depth, double p, double decay = 2.0);

}  // namespace nullfol::evolution
