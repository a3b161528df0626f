#pragma once

#include <array>
#include <memory>

#include "geometry/profile.hpp"
#include "geometry/schwarzschild.hpp"

namespace nullfol::geometry {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;     // [a + 3 b]
using Ten3 = std::array<double, 27>;    // [k + 3 (a + 3 b)], k the derivative index
using Ten4 = std::array<double, 81>;    // [l + 3 (k + 3 (a + 3 b))]

// Jets of one metric coefficient at fixed (us, s): value, first and second
// us-derivatives, angular covariant derivatives (first, second) and the mixed
// us/angular first derivative. Tangent tensors are stored as Cartesian
// components in R^3, orthogonal to the position vector. There is deliberately
// no s-derivative anywhere: the family is only assumed continuous in s.
struct ScalarJet {
  double v = 0, u = 0, uu = 0;
  Vec3 d{}, du{};
  Mat3 dd{};
};
struct VectorJet {
  Vec3 v{}, u{}, uu{};
  Mat3 d{}, du{};
  Ten3 dd{};
};
struct TensorJet {
  Mat3 v{}, u{}, uu{};
  Ten3 d{}, du{};
  Ten4 dd{};
};

enum class JetLevel { Pointwise, Full };

struct MetricSample {
  double us = 0, s = 0, r = 0;
  Vec3 x{}, e_theta{}, e_phi{};
  ScalarJet omega_sq;
  VectorJet b;
  TensorJet gslash;

  // components against the dyad (e_theta, e_phi)
  std::array<double, 2> b_dyad() const;
  std::array<double, 3> gslash_dyad() const;  // tt, tp, pp
};

// Perturbed family bound to a grid: Omega^2 = Omega_S^2 exp(2 eps (r0/r) chi_O),
// b = eps (r0 us / r^3) chi_b, gslash = r^2 (circg + eps chi_g).
class MetricFamily {
 public:
  MetricFamily(SchwarzschildParams params, PerturbationProfile profile, sphere::GridPtr grid);

  const SchwarzschildParams& params() const { return params_; }
  const PerturbationProfile& profile() const { return profile_; }
  const sphere::GridPtr& grid() const { return grid_; }
  bool is_background() const { return profile_.epsilon == 0.0; }

  MetricSample eval(int node, double us, double s, JetLevel level = JetLevel::Full) const;
  MetricSample eval_at(double theta, double phi, double us, double s, JetLevel level = JetLevel::Full) const;

 private:
  MetricSample eval_raw(const double* data, const double x[3], const double et[3], const double ep[3],
                        double us, double s, JetLevel level) const;

  SchwarzschildParams params_;
  PerturbationProfile profile_;
  sphere::GridPtr grid_;
  std::shared_ptr<ProfileCache> cache_;
};

MetricSample eval_metric(const MetricFamily& family, double us, double s, int node);

}  // namespace nullfol::geometry
