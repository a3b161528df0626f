#pragma once

#include <string>
#include <vector>

#include "geometry/profile.hpp"
#include "geometry/schwarzschild.hpp"

namespace nullfol::geometry {

struct SampleSpec {
  std::vector<double> us;  // in units of r0
  std::vector<double> s;
  int max_k = 4;           // angular order, n + 2 with n = 2
  int max_m = 2;           // us order
  sphere::GridSpec grid{24, 48, 16};

  static SampleSpec defaults(const SchwarzschildParams& p, int n = 2);
};

struct EnvelopeCheck {
  std::string name;   // e.g. "log_omega k=2 m=1"
  std::string quantity;
  int k = 0, m = 0;
  double max_ratio = 0.0;
  double at_us = 0.0, at_s = 0.0;
  bool pass = true;
};

struct ValidationReport {
  std::vector<EnvelopeCheck> checks;
  bool pass = true;
  std::string worst;
  double worst_ratio = 0.0;
  std::string failure;  // set when the profile could not be evaluated at all
};

// Samples every envelope inequality of the eps-close family over the lattice;
// ratios are measured/envelope and the report passes iff all are below one.
ValidationReport validate_envelopes(const PerturbationProfile& profile, const SchwarzschildParams& params,
                                    const SampleSpec& spec);

}  // namespace nullfol::geometry
