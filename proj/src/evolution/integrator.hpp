#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "evolution/operators.hpp"

namespace nullfol::evolution {

struct EvolutionConfig {
  double s_start = 0.0;
  double s_end = 10.0;
  double h0 = 0.05;
  bool stretch = true;  // h = h0 (r0 + s) / r0, capped at h_max
  double h_max = 2.0;
  int n = 2;
  double p = 2.0;
  double guard = 0.9;
  bool guard_armed = false;
  double tail_tol = 1e-6;
  bool null_monitor = true;
  // Sobolev norms in the ledger; coupled runs that only need states switch them off
  bool record_norms = true;
  std::vector<double> snapshots;  // s values where the field is kept
  // explicit step sizes; when set they replace the h0 schedule and s_end
  std::vector<double> step_schedule;
  // initial-data budgets; violations only produce warnings
  std::optional<double> delta_o, delta_m;

  void validate(double r0, double kappa) const;
};

enum class EvolutionStatus { Completed, BoundaryHit, GuardHit };
const char* to_string(EvolutionStatus s);

struct LedgerRow {
  double s = 0;
  double mean_f = 0;
  double grad_norm = 0;  // |grad f|^{n+1,p}
  double lap_norm = 0;   // |lap f|^{n,p}
  double max_abs_f = 0;
  double null_residual = 0;
  double rhs_sup = 0;  // sup|F|
  double step = 0;
};

struct FoliationState {
  double s = 0;
  ScalarField f;
};

struct Trajectory {
  EvolutionStatus status = EvolutionStatus::Completed;
  std::string message;
  std::vector<std::string> warnings;
  std::vector<LedgerRow> rows;
  std::vector<FoliationState> snapshots;
  FoliationState final_state;
  int steps = 0;
  // Laplacian form: largest mean of the evolved variable removed after a step
  double projected_mean = 0.0;
};

LedgerRow measure(const MetricFamily& metric, double s, const ScalarField& f, const EvolutionConfig& cfg,
                  double step);

// step size at s
double step_size(const EvolutionConfig& cfg, double r0, double s);

using StateObserver = std::function<void(double s, const ScalarField& f)>;

// RK4 on d_s f = F(s, f, grad f); the observer sees every accepted state
Trajectory evolve(const MetricFamily& metric, const ScalarField& f0, const EvolutionConfig& cfg,
                  const StateObserver& observer = {});

// co-evolves u = lap f by d_s u = X.grad u + re and mean f by d_s mean = mean(F)
Trajectory evolve_laplacian_form(const MetricFamily& metric, const ScalarField& f0, const EvolutionConfig& cfg);

// f = inv_lap(u - mean u) + mean_value
ScalarField reconstruct(const ScalarField& u, double mean_value);
// subtracts the mean in place and returns it
double remove_mean(ScalarField& u);

std::vector<std::string> ledger_header();
std::vector<double> ledger_values(const LedgerRow& r);

}  // namespace nullfol::evolution
