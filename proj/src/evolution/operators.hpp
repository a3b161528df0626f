#pragma once

#include <vector>

#include "geometry/metric.hpp"
#include "sphere/calculus.hpp"

namespace nullfol::evolution {

using geometry::JetLevel;
using geometry::MetricFamily;
using geometry::MetricSample;
using sphere::ScalarField;
using sphere::TangentField;

// Metric coefficients evaluated on the graph us = f(node) at one s.
// Throws OutOfDomain if any graph point leaves the kappa-neighbourhood.
std::vector<MetricSample> sample_on_graph(const MetricFamily& metric, double s, const ScalarField& f,
                                          JetLevel level);

// F = -b^i f_i + Omega^2 (gslash^-1)^{ij} f_i f_j
ScalarField rhs_F(const MetricFamily& metric, double s, const ScalarField& f);
// X^i = -b^i + 2 Omega^2 (gslash^-1)^{ij} f_j
TangentField assemble_X(const MetricFamily& metric, double s, const ScalarField& f);

// F and X together (one metric evaluation)
struct Transport {
  ScalarField F;
  TangentField X;
};
Transport transport(const MetricFamily& metric, double s, const ScalarField& f);

struct FrameQuantities {
  ScalarField vareps;       // -Omega^2 |grad f|^2_gslash
  TangentField vareps_vec;  // -2 Omega^2 gslash^{ik} f_i
  TangentField bdot;        // b + vareps_vec
};
FrameQuantities frame_quantities(const MetricFamily& metric, double s, const ScalarField& f);

// g(L, L) for L = d_s + vareps d_us + (b + vareps_vec)^i d_i, from the full metric
ScalarField null_residual(const MetricFamily& metric, double s, const ScalarField& f);

// Non-advective part of the evolution of lap f:
//   d_s lap f = X . grad(lap f) + re
struct ReBreakdown {
  ScalarField re;
  ScalarField ricci;    // -b.grad f + 2 A(grad f, grad f), curvature of the unit sphere
  ScalarField b_block;  // terms carrying derivatives of b
  ScalarField a_block;  // terms carrying derivatives of A = Omega^2 gslash^-1 or two Hessians
};
ReBreakdown assemble_re(const MetricFamily& metric, double s, const ScalarField& f);

// re through the spectral route lap(F) - X.grad(lap f); an independent check of
// assemble_re limited by the aliasing of F
ScalarField re_spectral(const MetricFamily& metric, double s, const ScalarField& f);

}  // namespace nullfol::evolution
