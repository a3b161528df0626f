#pragma once

#include "sphere/field.hpp"

namespace nullfol::sphere {

// band truncation; band < 0 means the grid's dealiasing band lmax
ScalarField truncate(const ScalarField& f, int band = -1);
// coefficient energy above degree `band` relative to the total
double spectral_tail(const ScalarField& f, int band);

double integrate(const ScalarField& f);
double mean(const ScalarField& f);

TangentField grad(const ScalarField& f);
SymTensorField hessian(const ScalarField& f);
ScalarField laplacian(const ScalarField& f);
ScalarField divergence(const TangentField& v);
ScalarField inv_laplacian(const ScalarField& g);

// Cartesian (embedded) representation
CartField to_cart(const TangentField& v);
TangentField to_tangent(const CartField& v);
SymTensorField to_sym_tensor(const CartField& t);
CartField cart_grad(const ScalarField& f);
// covariant derivative of a tangent tensor; the new index is slot 0
CartField cov_deriv(const CartField& t);
// trace over slots 0 and 1
CartField trace01(const CartField& t);
// Cartesian components as scalar fields
ScalarField component(const CartField& t, int c);

// (sum_k int |nabla^k f|^p)^(1/p), k = 0..n; n <= 4
double sobolev_norm(const ScalarField& f, int n, double p);
// same for a tangent field; n <= 3
double sobolev_norm(const TangentField& v, int n, double p);
// norm of grad f of order n, i.e. derivatives 1..n+1 of f; n <= 3
double grad_sobolev_norm(const ScalarField& f, int n, double p);
double lp_norm(const ScalarField& f, double p);
double sup_norm(const ScalarField& f);

constexpr int kMaxScalarDepth = 4;
constexpr int kMaxTangentDepth = 3;

// R_i = e_i x position, i = 1, 2, 3
TangentField rotation_field(const GridPtr& grid, int axis);
ScalarField rotate_derivative(const ScalarField& f, int axis);
// v . grad f
ScalarField directional(const TangentField& v, const ScalarField& f);
// [R, X] = R.nabla X - X.nabla R
TangentField lie_derivative(const TangentField& r, const TangentField& x);

}  // namespace nullfol::sphere
