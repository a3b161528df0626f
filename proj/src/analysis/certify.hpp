#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "analysis/transport_check.hpp"
#include "evolution/integrator.hpp"
#include "perturbation/perturbation.hpp"
#include "sphere/grid.hpp"

namespace nullfol::analysis {

struct Ceilings {
  double grad_growth = 2.0;       // c_o
  double mean_mean = 2.0;         // c_{m,m}
  double mean_grad = 8.0;         // c_{m,o}
  double drift = 8.0;
  double rhs_exponent = 1.9;      // a floor
  double guard = 8.0;
  double pert_grad = 2.0;         // c_o for df
  double pert_mean = 2.0;         // c_m
  double pert_grad_mean = 2.0;    // c_{o,m}
  double pert_mean_grad = 8.0;    // c_{m,o}
  double pert_const = 2.0;
  double lin_error = 8.0;
  double lin_growth = 2.0;
  double lin_mean_change = 1e-10;
  double transport = 4.0;
  double commutator = 1e-6;
};

// Run i uses profile seed profile_seed + i and initial data drawn from data_seed + i.
// f1 has |grad f1|^{n+1,p} = a delta_o r0 and mean b delta_m r0 with a in [0.5, 0.9],
// b in [-1, 1]; f2 = f1 + d with the same recipe for d at order n and the dd budgets.
struct EnsembleSpec {
  geometry::SchwarzschildParams params;
  sphere::GridSpec grid;
  double epsilon = 0.01;
  std::uint64_t profile_seed = 1;
  std::uint64_t data_seed = 1000;
  int runs = 20;
  int data_band = 6;
  double data_decay = 2.0;
  double delta_o = 0.02, delta_m = 0.1, dd_o = 0.002, dd_m = 0.002;
  // when set, the mean fraction b is +-mean_fraction with alternating sign
  std::optional<double> mean_fraction;
  bool constants_only = false;
  evolution::EvolutionConfig evolution = default_evolution();
  bool perturbation = true;   // evolve f2 as well
  bool linearisation = true;  // linearised system and error function
  int constant_partner_runs = 4;  // runs that also evolve (const, const + d)
  // runs that also pair f1 with f1 + mean(d) and with f1 + d - mean(d), which isolate the
  // cross terms of the perturbation bounds
  int decomposition_runs = 1 << 30;
  int transport_runs = 2;         // runs with the co-evolved Laplacian transport check
  double transport_k_max = 1.0;
  double rhs_fit_from = 1.0, rhs_fit_to = 100.0;  // in units of r0
  int workers = 1;  // 0 for the hardware concurrency
  Ceilings ceilings;

  static evolution::EvolutionConfig default_evolution();
  void validate() const;
};

struct RunRecord {
  int index = 0;
  std::uint64_t profile_seed = 0, data_seed = 0;
  bool ok = false;
  std::string error;
  perturbation::Budgets budgets;
  std::vector<std::vector<evolution::LedgerRow>> foliations;  // f1, then f2 when evolved
  std::vector<std::string> statuses;
  std::vector<perturbation::PerturbationRow> pert;            // empty without f2
  bool has_decomposition = false;
  perturbation::Budgets shift_budgets, free_budgets;
  std::vector<perturbation::PerturbationRow> pert_shift, pert_free;
  bool has_partner = false;
  perturbation::Budgets partner_budgets;
  std::vector<perturbation::PerturbationRow> partner;
  std::optional<double> transport_c, transport_commutator, transport_k;
};

struct Constant {
  std::string name;
  double value = 0;
  double limit = 0;
  bool is_floor = false;  // value must reach the limit instead of staying below it
  bool pass() const { return is_floor ? value >= limit : value <= limit; }
};

enum class CertStatus { Pass, Fail, Inconclusive, NotApplicable };
const char* to_string(CertStatus s);

struct Certificate {
  std::string id;
  CertStatus status = CertStatus::Inconclusive;
  std::vector<Constant> constants;
  int samples = 0;
  std::string note;
};

struct EnsembleResult {
  std::vector<RunRecord> runs;
  std::vector<Certificate> certificates;
  bool incomplete = false;
  bool all_pass() const;
};

// An aborted run comes back with ok = false and the error message.
RunRecord run_member(const EnsembleSpec& spec, const GridPtr& g, int i);
RunRecord run_member(const EnsembleSpec& spec, int i);
// Sequential reduction of the per-run records; depends on nothing else.
std::vector<Certificate> aggregate(const EnsembleSpec& spec, const std::vector<RunRecord>& runs);
EnsembleResult certify(const EnsembleSpec& spec);

// Initial data of run i (f1, f2); exposed for the CLI and the tests.
std::pair<sphere::ScalarField, sphere::ScalarField> member_data(const EnsembleSpec& spec, const sphere::GridPtr& g,
                                                                int i);

// Runs fn(i) for i in [0, count) on a pool of worker threads.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);
int resolve_workers(int requested);

}  // namespace nullfol::analysis
