#pragma once

#include <string>
#include <vector>

#include "evolution/integrator.hpp"

namespace nullfol::perturbation {

using evolution::EvolutionConfig;
using evolution::EvolutionStatus;
using evolution::MetricFamily;
using evolution::Trajectory;
using sphere::ScalarField;
using sphere::TangentField;

// Smallness parameters measured on initial data (all scaled by r0):
//   delta_o = max_a |grad f_a(0)|^{n+1,p} / r0, delta_m = max_a |mean f_a(0)| / r0,
//   dd_o = |grad df(0)|^{n,p} / r0, dd_m = |mean df(0)| / r0.
struct Budgets {
  double epsilon = 0, delta_o = 0, delta_m = 0, dd_o = 0, dd_m = 0;
  // |grad df(0)|^{n+1,p} / r0, for the improved estimate when f2 is constant
  double dd_o_n1 = 0;
};

struct PerturbationRow {
  double s = 0;
  double delta_grad = 0;     // |grad df|^{n,p}
  double delta_grad_n1 = 0;  // |grad df|^{n+1,p}
  double delta_mean = 0;
  double lin_grad = 0;       // |grad bdf|^{n,p}
  double lin_lap = 0;        // |lap bdf|^{n,p}
  double lin_mean = 0;
  double err_grad = 0;       // |grad er f|^{n,p}
  double err_mean = 0;
  double var_diff = 0;       // sup|v - bdf|, NaN without a variation run
  double dd_F_sup = 0;       // sup|F(f2) - F(f1)|, NaN when not monitored
};

struct PerturbationRun {
  Trajectory f1, f2;
  EvolutionStatus status = EvolutionStatus::Completed;
  std::string message;
  int n = 2;
  double p = 2.0;
  Budgets budgets;
  std::vector<double> s, steps;  // common step sequence, steps[0] = 0
  std::vector<ScalarField> f1_states, f2_states;
  std::vector<ScalarField> delta_f, lin_delta_f, err_f, variation;
  double lin_projected_mean = 0.0;
  std::vector<PerturbationRow> ledger;

  std::size_t size() const { return s.size(); }
  EvolutionConfig schedule(const EvolutionConfig& base) const;
};

// Evolves both foliations with identical step sequences and forms df = f2 - f1.
// LockstepViolation if the common part of the step sequences differs.
PerturbationRun evolve_pair(const MetricFamily& metric, const ScalarField& f1_0, const ScalarField& f2_0,
                            const EvolutionConfig& cfg, bool monitor_dd_F = false);

// Pairs the f1 of an existing run with a new second foliation evolved on the
// same step sequence; f2 norms are not recorded.
PerturbationRun evolve_against(const MetricFamily& metric, const PerturbationRun& base, const ScalarField& f2_0,
                               const EvolutionConfig& cfg);

struct DDQuantities {
  ScalarField dd_F;
  TangentField dd_X;
  ScalarField dd_re;
};
DDQuantities dd_quantities(const MetricFamily& metric, double s, const ScalarField& f1, const ScalarField& f2);
DDQuantities dd_quantities(const MetricFamily& metric, const PerturbationRun& run, std::size_t step);

// Right side of the linear system for u = lap(bdf): X1.grad u - mean(X1.grad u)
ScalarField linearised_rhs(const TangentField& x1, const ScalarField& u);

// Fills lin_delta_f: u = lap(bdf) transported by the f1 field X1, mean(bdf) held
// at mean(df(0)); f1 is re-integrated in lockstep and compared bitwise.
void evolve_linearised(const MetricFamily& metric, PerturbationRun& run, const EvolutionConfig& cfg);
// Same system from an arbitrary initial bdf(0) (linearity checks).
std::vector<ScalarField> evolve_linearised_from(const MetricFamily& metric, const PerturbationRun& run,
                                                const EvolutionConfig& cfg, const ScalarField& init,
                                                double* projected_mean = nullptr);

// Variation through solutions with coefficients frozen on f1:
//   d_s v = -b.grad v - (d_us b . grad f1) v + 2 A(grad f1, grad v) + d_us A(grad f1, grad f1) v
ScalarField variation_rhs(const MetricFamily& metric, double s, const ScalarField& f1, const ScalarField& v);
void evolve_variation(const MetricFamily& metric, PerturbationRun& run, const EvolutionConfig& cfg);

struct ErrorReport {
  // d/ds mean(er f) against mean(dF), trapezoidal in s over the step sequence
  double mean_consistency = 0;
  double max_err_grad = 0;
  double max_delta_grad = 0;
};
// er f = df - bdf per step and the ledger
ErrorReport compute_error(const MetricFamily& metric, PerturbationRun& run, bool check_consistency = true);

Budgets measure_budgets(const ScalarField& f1_0, const ScalarField& f2_0, double epsilon, double r0, int n,
                        double p);

std::vector<std::string> ledger_header();
std::vector<double> ledger_values(const PerturbationRow& r);

}  // namespace nullfol::perturbation
