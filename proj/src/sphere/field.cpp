#include "sphere/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace nullfol::sphere {

void check_same_grid(const GridPtr& a, const GridPtr& b, const char* where) {
  if (!a || !b || !a->same_as(*b))
    throw Error(ErrorCode::GridMismatch, std::string(where) + ": fields live on different grids");
}

ScalarField::ScalarField(GridPtr grid, double value)
    : grid_(std::move(grid)), values_(grid_->size(), value) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_->size())
    throw Error(ErrorCode::GridMismatch, "scalar field: value count does not match grid");
}

ScalarField ScalarField::from_coeffs(GridPtr grid, std::span<const double> coeffs) {
  std::vector<double> v(grid->size());
  grid->synthesis(coeffs, v);
  ScalarField f(grid, std::move(v));
  if (static_cast<int>(coeffs.size()) == grid->ncoeff()) {
    f.coeffs_.assign(coeffs.begin(), coeffs.end());
    f.coeffs_valid_ = true;
  }
  return f;
}

std::vector<double>& ScalarField::mutable_values() {
  coeffs_valid_ = false;
  return values_;
}

const std::vector<double>& ScalarField::coeffs() const {
  if (!coeffs_valid_) {
    coeffs_.resize(grid_->ncoeff());
    if (is_uniform()) {
      // exact transform of a constant; quadrature would leave round-off in l > 0
      std::fill(coeffs_.begin(), coeffs_.end(), 0.0);
      coeffs_[0] = values_[0] * std::sqrt(4.0 * std::numbers::pi);
    } else {
      grid_->analysis(values_, coeffs_);
    }
    coeffs_valid_ = true;
  }
  return coeffs_;
}

bool ScalarField::is_uniform() const {
  return !values_.empty() && std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_[0]; });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) { return add_scaled(o, 1.0); }
ScalarField& ScalarField::operator-=(const ScalarField& o) { return add_scaled(o, -1.0); }

ScalarField& ScalarField::operator*=(double a) {
  for (double& v : values_) v *= a;
  if (coeffs_valid_)
    for (double& c : coeffs_) c *= a;
  return *this;
}

ScalarField& ScalarField::add_scaled(const ScalarField& o, double a) {
  check_same_grid(grid_, o.grid_, "add");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * o.values_[i];
  coeffs_valid_ = false;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double a, ScalarField b) { return b *= a; }

CartField::CartField(GridPtr g, int r) : grid(std::move(g)), rank(r) {
  int n = 1;
  for (int i = 0; i < r; ++i) n *= 3;
  comp.assign(n, std::vector<double>(grid->size(), 0.0));
}

}  // namespace nullfol::sphere
