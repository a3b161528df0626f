#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "analysis/certify.hpp"
#include "analysis/transport_check.hpp"
#include "geometry/envelopes.hpp"
#include "io/toml.hpp"

namespace nullfol::app {

enum class Mode { Evolve, Perturb, Linearize, Gronwall, ValidateMetric, Sweep, Certify };
const char* to_string(Mode m);
Mode parse_mode(const std::string& s);

struct ProfileSpec {
  std::string kind = "random";  // random (background at epsilon = 0) | zero | adversarial | table | file
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  int band = 3, powers = 3;
  double amplitude = 1.0;              // random profiles: overall scale
  double adversarial_amplitude = 10.0;  // constant chi_omega of the adversarial profile
  std::string path;        // file: a TOML file with a [profile] table
  geometry::PerturbationProfile table;  // kind = table, inline coefficient rows
};

// A scalar on the sphere: a random graph with prescribed gradient norm and mean,
// an explicit (l, m, coeff) table, a constant, or a coefficient CSV.
struct DataSpec {
  std::string kind = "seed";  // seed | coeffs | constant | file
  std::uint64_t seed = 7;
  int band = 6;
  double decay = 2.0;
  // seed: |grad f|^{depth,p} = grad_budget r0 and mean = mean_budget r0
  double grad_budget = 0.01, mean_budget = 0.0;
  std::vector<std::vector<double>> coeffs;  // rows (l, m, value)
  double value = 0.0;
  std::string path;
};

struct OutputSpec {
  std::string dir = "out";
  int cadence = 1;     // keep every cadence-th ledger row (first and last always)
  bool fields = true;  // write snapshots under fields/
};

struct GronwallSpec {
  analysis::TransportCheckConfig transport;
  bool flow = true;  // volume factors and Lp comparability along the flow of the transport field
  std::vector<double> lp = {1.0, 2.0, 4.0};
};

struct RunConfig {
  Mode mode = Mode::Evolve;
  geometry::SchwarzschildParams geometry;
  sphere::GridSpec grid;
  ProfileSpec profile;
  DataSpec data;
  DataSpec delta;  // d with f2 = f1 + d; the seed recipe uses depth n instead of n + 1
  bool variation = false;
  evolution::EvolutionConfig evolution;
  OutputSpec output;
  // ensemble modes; epsilon and the profile seed come from [profile]
  analysis::EnsembleSpec ensemble;
  GronwallSpec gronwall;
  std::optional<geometry::SampleSpec> lattice;  // validate-metric; defaults when absent
  std::vector<std::string> sweep_params;        // "key=a:step:b"
  int workers = 1;

  RunConfig();
  // parses and type-checks; consistency is checked by validate(), which run_mode calls
  static RunConfig from_config(const io::Config& cfg);
  io::Config to_config() const;
  std::string to_toml() const { return to_config().to_toml(); }
  void validate() const;

  // --seed: the data seeds of single runs and of the ensemble
  void apply_seed(std::uint64_t seed);
  // sweepable names (epsilon, delta_o, delta_m, dd_o, dd_m, runs) or any dotted config key
  void apply_override(const std::string& key, const std::string& value);
  analysis::EnsembleSpec ensemble_spec() const;
};

// builds the metric and initial data of single runs
geometry::PerturbationProfile build_profile(const RunConfig& rc);
sphere::ScalarField build_data(const DataSpec& d, const sphere::GridPtr& g, double r0, int depth, double p);

}  // namespace nullfol::app
