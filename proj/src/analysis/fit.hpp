#pragma once

#include <vector>

namespace nullfol::analysis {

// Non-negative least squares y ~ sum_k c_k x_k by enumerating feature subsets
// (meant for a handful of features), then rescaled by the smallest factor
// lambda with lambda * c . x_i >= y_i for every sample.
struct BoundFit {
  std::vector<double> raw;       // least-squares coefficients
  double inflation = 1.0;
  std::vector<double> constants;  // inflation * raw
  double residual = 0.0;         // rms of y - raw . x
  bool ok = false;               // false when no non-negative fit bounds every sample
};

BoundFit fit_bound(const std::vector<std::vector<double>>& features, const std::vector<double>& y);

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace nullfol::analysis
