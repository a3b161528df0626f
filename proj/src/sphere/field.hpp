#pragma once

#include <span>
#include <vector>

#include "sphere/grid.hpp"

namespace nullfol::sphere {

// Real function on the sphere. Grid values are authoritative; the
// coefficient table is computed on demand and cached until the values change.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double value = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);
  static ScalarField from_coeffs(GridPtr grid, std::span<const double> coeffs);

  const GridPtr& grid() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  // invalidates the coefficient cache
  std::vector<double>& mutable_values();
  double operator[](int i) const { return values_[i]; }

  // coefficients up to the transform band of the grid
  const std::vector<double>& coeffs() const;
  bool is_uniform() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double a);
  ScalarField& add_scaled(const ScalarField& o, double a);

 private:
  GridPtr grid_;
  std::vector<double> values_;
  mutable std::vector<double> coeffs_;
  mutable bool coeffs_valid_ = false;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField b);

// Tangent vector field, components against the orthonormal dyad (e_theta, e_phi).
struct TangentField {
  GridPtr grid;
  std::vector<double> th, ph;

  TangentField() = default;
  explicit TangentField(GridPtr g)
      : grid(std::move(g)), th(grid->size(), 0.0), ph(grid->size(), 0.0) {}
};

// Symmetric 2-tensor, dyad components tt, tp, pp.
struct SymTensorField {
  GridPtr grid;
  std::vector<double> tt, tp, pp;

  SymTensorField() = default;
  explicit SymTensorField(GridPtr g)
      : grid(std::move(g)), tt(grid->size(), 0.0), tp(grid->size(), 0.0), pp(grid->size(), 0.0) {}
};

// Tangent tensor of rank r embedded in R^3: 3^r Cartesian component fields,
// every slot orthogonal to the position vector. comp[a0 + 3*a1 + 9*a2 + ...],
// slot 0 being the most recently added derivative index.
struct CartField {
  GridPtr grid;
  int rank = 0;
  std::vector<std::vector<double>> comp;

  CartField() = default;
  CartField(GridPtr g, int r);
  int ncomp() const { return static_cast<int>(comp.size()); }
};

void check_same_grid(const GridPtr& a, const GridPtr& b, const char* where);

}  // namespace nullfol::sphere
