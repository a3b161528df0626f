#pragma once

#include <array>
#include <functional>
#include <vector>

#include "sphere/calculus.hpp"

namespace nullfol::analysis {

using sphere::GridPtr;
using sphere::ScalarField;
using sphere::TangentField;

using XFunction = std::function<TangentField(double s)>;

// X sampled at increasing s; evaluated in between by cubic interpolation
struct XSeries {
  std::vector<double> s;
  std::vector<TangentField> X;

  TangentField at(double s) const;
};

struct FlowConfig {
  // integration times, first entry is the start; the flow is stored at each
  std::vector<double> times;
  double r0 = 1.0;
  int eval_band = -1;  // off-grid synthesis band, -1 for lmax
  // relative energy of X above eval_band tolerated before OffGridEvalFailure
  double band_tol = 1e-8;
};

// Flow of d(phi)/ds = X(phi) on the sphere and the volume factor
// tilde-phi with d vol_s = tilde-phi d vol_round, obtained three ways.
struct GronwallFlow {
  std::vector<double> s;
  // Cartesian components of phi_s at each grid label x
  std::vector<std::array<ScalarField, 3>> map;
  // log tilde-phi at phi_s(x) integrated along characteristics: d/ds = -div X
  std::vector<ScalarField> log_vol_characteristic;
  // -log of the Jacobian determinant of the discrete map at x
  std::vector<ScalarField> log_vol_jacobian;
  // log tilde-phi as a field on the fixed grid, from (d_s + X.grad) l = -div X
  std::vector<ScalarField> log_vol_transported;
  // sup_s (r0 + s)^2 / r0 sup|div X|
  double k_bound = 0.0;
  // largest disagreement between the three routes, compared at phi_s(x)
  double route_mismatch = 0.0;
  double min_jacobian = 1.0;

  ScalarField vol_factor(std::size_t i) const;  // exp of the transported field
};

GronwallFlow integrate_flow(const GridPtr& grid, const XFunction& X, const FlowConfig& cfg);
GronwallFlow integrate_flow(const GridPtr& grid, const XSeries& xs, const FlowConfig& cfg);

struct LpReport {
  double norm_f = 0;       // |f|_{L^p}
  double norm_direct = 0;  // |f o phi_s|_{L^p} by off-grid synthesis and quadrature
  double norm_cov = 0;     // same through the change of variables with tilde-phi
  double lower = 0, upper = 0;  // exp(-k) |f|, exp(k) |f|
  bool pass = false;
};
// comparability at flow time index i; rel_slack absorbs quadrature error, which for odd p
// (|f|^p not smooth) is far above round-off
LpReport lp_comparability(const GronwallFlow& flow, const ScalarField& f, double p, std::size_t i,
                          double rel_slack = 1e-4);

// Cartesian components of a tangent field as scalar fields
std::array<ScalarField, 3> cartesian_components(const TangentField& v);

}  // namespace nullfol::analysis
