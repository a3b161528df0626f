#pragma once

namespace nullfol::geometry {

struct SchwarzschildParams {
  double r0 = 1.0;
  double kappa = 0.5;
};

void validate(const SchwarzschildParams& p);
bool in_domain(const SchwarzschildParams& p, double us, double s);

struct AreaRadiusSolution {
  double r = 0.0;
  double r_minus_r0 = 0.0;
  double us = 0.0;
  double s = 0.0;
  // |(r-r0) e^{(r-us-s-r0)/r0} - s| / max(r0, |s|): the implicit relation divided
  // by its right-hand exponential, relative to the scale of s
  double residual = 0.0;
  int iterations = 0;
};

AreaRadiusSolution solve_area_radius(const SchwarzschildParams& p, double us, double s);

// r and its us-derivatives at fixed s
struct RadiusJet {
  double r, r_u, r_uu;
};
RadiusJet radius_jet(const SchwarzschildParams& p, double us, double s);
RadiusJet radius_jet(const SchwarzschildParams& p, const AreaRadiusSolution& sol);

double schwarzschild_omega_sq(const SchwarzschildParams& p, double us, double s);
// (s+r0)/r * exp((us+s+r0-r)/r0), valid for every s including 0
double schwarzschild_omega_sq_alt(const SchwarzschildParams& p, double us, double s);

// log Omega_S^2 and its first two us-derivatives
struct LogOmegaJet {
  double value, d_u, d_uu;
};
LogOmegaJet schwarzschild_log_omega_sq(const SchwarzschildParams& p, double us, double s);
LogOmegaJet schwarzschild_log_omega_sq(const SchwarzschildParams& p, const AreaRadiusSolution& sol);

}  // namespace nullfol::geometry
