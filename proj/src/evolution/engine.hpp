#pragma once

#include <functional>
#include <vector>

#include "evolution/integrator.hpp"

// Lockstep RK4 driver shared by the single-foliation forms and the coupled
// systems of the perturbation module. Every field is truncated to lmax after
// each stage and checked for spectral tail growth after each step.
namespace nullfol::evolution::engine {

struct State {
  std::vector<ScalarField> fields;
  std::vector<double> scalars;
};

State combine(const State& y, double h, const State& k);

struct Hooks {
  std::function<State(double s, const State& y)> rhs;
  // graph function whose domain status is monitored and ledgered
  std::function<ScalarField(const State& y)> primary;
  // applied after each accepted step; returns the largest amount it removed
  std::function<double(State& y)> project;
  // sup|F| at the state, read from the first stage of the next step when possible
  std::function<double(const State& k1)> rhs_sup_from_stage;
  // called after the initial state and after every accepted step
  std::function<void(double s, const State& y)> on_step;
};

Trajectory run(const MetricFamily& metric, State y0, const EvolutionConfig& cfg, const Hooks& hooks);

}  // namespace nullfol::evolution::engine
