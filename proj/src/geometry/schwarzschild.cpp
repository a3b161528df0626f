#include "geometry/schwarzschild.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace nullfol::geometry {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kResidualTol = 1e-12;
constexpr double kSmallS = 1e-8;

std::string point_str(double us, double s) {
  std::ostringstream os;
  os.precision(17);
  os << "(us=" << us << ", s=" << s << ")";
  return os.str();
}

}  // namespace

void validate(const SchwarzschildParams& p) {
  if (!(p.r0 > 0.0)) throw Error(ErrorCode::ConfigError, "r0 must be positive");
  if (!(p.kappa > 0.0 && p.kappa <= 1.0)) throw Error(ErrorCode::ConfigError, "kappa must lie in (0, 1]");
}

bool in_domain(const SchwarzschildParams& p, double us, double s) {
  return s > -p.kappa * p.r0 && std::abs(us) < p.kappa * p.r0;
}

AreaRadiusSolution solve_area_radius(const SchwarzschildParams& p, double us, double s) {
  if (!in_domain(p, us, s))
    throw Error(ErrorCode::DomainError, "point " + point_str(us, s) + " outside the kappa-neighbourhood");
  const double r0 = p.r0;
  const double c = us + s + r0;
  // no r > 0 exists when s e^{c/r0} <= -r0 (possible for s < 0 and large us)
  if (s < 0.0 && s * std::exp(c / r0) <= -r0)
    throw Error(ErrorCode::DomainError, "no positive area radius at " + point_str(us, s));

  AreaRadiusSolution out;
  out.us = us;
  out.s = s;
  const double scale = std::max(r0, std::abs(s));
  // unknown d = r - r0 keeps relative precision of (r - r0)/s near s = 0
  auto h = [&](double d) { return d * std::exp((d - us - s) / r0) - s; };

  if (s == 0.0) {
    out.r = r0;
    return out;
  }

  double lo = -r0, hi = s > 0.0 ? s + std::abs(us) + r0 : 0.0;
  double d = s > r0 ? s + us : s * std::exp(us / r0);
  if (!(d > lo && d < hi)) d = 0.5 * (lo + hi);
  int it = 0;
  for (; it < kMaxIterations; ++it) {
    const double hv = h(d);
    if (hv > 0.0)
      hi = std::min(hi, d);
    else
      lo = std::max(lo, d);
    if (hv == 0.0) break;
    const double dh = ((d + r0) / r0) * std::exp((d - us - s) / r0);
    double next = d - hv / dh;
    // Newton left the bracket (r outside (0, inf)): bisect instead
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    // stop once the update is at round-off level and the residual is met
    const bool tiny = std::abs(next - d) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(d);
    d = next;
    if (tiny && std::abs(h(d)) <= kResidualTol * scale) break;
  }
  out.r = r0 + d;
  out.r_minus_r0 = d;
  out.iterations = it;
  out.residual = std::abs(h(d)) / scale;
  if (!(out.residual <= kResidualTol))
    throw Error(ErrorCode::NoConvergence, "area radius did not converge at " + point_str(us, s));
  return out;
}

RadiusJet radius_jet(const SchwarzschildParams& p, double us, double s) {
  return radius_jet(p, solve_area_radius(p, us, s));
}

RadiusJet radius_jet(const SchwarzschildParams& p, const AreaRadiusSolution& sol) {
  const double r = sol.r, d = sol.r_minus_r0;
  return {r, d / r, p.r0 * d / (r * r * r)};
}

double schwarzschild_omega_sq(const SchwarzschildParams& p, double us, double s) {
  if (std::abs(s) < kSmallS * p.r0) return schwarzschild_omega_sq_alt(p, us, s);
  const auto sol = solve_area_radius(p, us, s);
  return (s + p.r0) / sol.r * (sol.r_minus_r0 / s);
}

double schwarzschild_omega_sq_alt(const SchwarzschildParams& p, double us, double s) {
  const auto sol = solve_area_radius(p, us, s);
  return (s + p.r0) / sol.r * std::exp((us + s - sol.r_minus_r0) / p.r0);
}

LogOmegaJet schwarzschild_log_omega_sq(const SchwarzschildParams& p, double us, double s) {
  return schwarzschild_log_omega_sq(p, solve_area_radius(p, us, s));
}

LogOmegaJet schwarzschild_log_omega_sq(const SchwarzschildParams& p, const AreaRadiusSolution& sol) {
  const double us = sol.us, s = sol.s;
  const double r0 = p.r0, r = sol.r;
  const double r_u = sol.r_minus_r0 / r;
  double w;
  if (std::abs(s) < kSmallS * r0)
    w = (s + r0) / r * std::exp((us + s - sol.r_minus_r0) / r0);
  else
    w = (s + r0) / r * (sol.r_minus_r0 / s);
  return {std::log(w), r0 / (r * r), -2.0 * r0 * r_u / (r * r * r)};
}

}  // namespace nullfol::geometry
