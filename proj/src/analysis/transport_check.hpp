#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "analysis/flow.hpp"
#include "evolution/integrator.hpp"

namespace nullfol::analysis {

// Gronwall check for d_s u + Y.grad u = re, Y the transport field of the
// estimate (Y = -X for the Laplacian-form equation of a foliation).
struct TransportCheckConfig {
  int m = 2;           // order of the norm of u and re
  int x_depth = 3;     // order of the norm of Y in the decay hypothesis
  double p = 2.0;
  double r0 = 1.0;
  double c_ceiling = 4.0;
  double k_max = 1.0;  // largest decay constant accepted as satisfying the hypothesis
};

struct TransportRow {
  double s = 0;
  double u_norm = 0;
  double base = 0;     // |u(0)| + int_0^s |re|
  double re_norm = 0;
  double y_norm = 0;   // |Y|^{x_depth,p}
  double commutator = 0;
};

struct TransportReport {
  std::vector<TransportRow> rows;
  double k = 0;           // sup_s (r0+s)^2/r0 |Y|^{x_depth,p}
  double measured_c = 0;  // smallest c with |u| <= exp(c k) base at every s
  double commutator_residual = 0;  // sup over s and axes, relative to |u|^{m,p} / r0
  bool pass = false;
};

using ScalarFunction = std::function<ScalarField(double s)>;

// u driven by prescribed Y(s) and re(s) with RK4 over the given times
TransportReport transport_check(const GridPtr& grid, const XFunction& Y, const ScalarFunction& re,
                                const ScalarField& u0, const std::vector<double>& times,
                                const TransportCheckConfig& cfg);

// u co-evolved with the foliation f (Y = -X, re from the remainder assembly);
// u0 defaults to lap f0, for which u tracks lap f.
TransportReport transport_norm_check(const evolution::MetricFamily& metric, const ScalarField& f0,
                                     const evolution::EvolutionConfig& cfg, const TransportCheckConfig& tc,
                                     const std::optional<ScalarField>& u0 = std::nullopt);

// pointwise residual of the first-order commutator identity for all three rotations
double commutator_residual(const TangentField& Y, const ScalarField& u, const ScalarField& re);

}  // namespace nullfol::analysis
