#include "perturbation/perturbation.hpp"

#include <cmath>
#include <sstream>

#include "errors.hpp"
#include "evolution/engine.hpp"
#include "evolution/tensor_ops.hpp"

namespace nullfol::perturbation {

using evolution::engine::Hooks;
using evolution::engine::State;
using geometry::Mat3;
using geometry::Vec3;
namespace ops = evolution::ops;

namespace {

void lockstep_fail(const std::string& what) { throw Error(ErrorCode::LockstepViolation, what); }

// re-integrated f1 agrees with the stored one up to the round-off of re-truncating the initial state
void check_f1(const PerturbationRun& run, std::size_t j, double s, const ScalarField& f1) {
  if (j >= run.size()) lockstep_fail("coupled run took more steps than the pair");
  if (s != run.s[j]) {
    std::ostringstream os;
    os << "step " << j << " at s = " << s << " but the pair is at s = " << run.s[j];
    lockstep_fail(os.str());
  }
  const auto& a = f1.values();
  const auto& b = run.f1_states[j].values();
  double d = 0.0, m = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
    m = std::max(m, std::abs(b[i]));
  }
  if (d > 1e-11 * m) {
    std::ostringstream os;
    os << "re-integrated f1 differs by " << d << " at step " << j;
    lockstep_fail(os.str());
  }
}

EvolutionConfig coupled_config(const PerturbationRun& run, const EvolutionConfig& base) {
  EvolutionConfig c = run.schedule(base);
  c.record_norms = false;
  c.null_monitor = false;
  c.snapshots.clear();
  c.delta_o.reset();
  c.delta_m.reset();
  return c;
}

}  // namespace

EvolutionConfig PerturbationRun::schedule(const EvolutionConfig& base) const {
  EvolutionConfig c = base;
  c.s_start = s.empty() ? base.s_start : s.front();
  c.step_schedule.assign(steps.begin() + (steps.empty() ? 0 : 1), steps.end());
  if (!s.empty()) c.s_end = s.back();
  return c;
}

Budgets measure_budgets(const ScalarField& f1_0, const ScalarField& f2_0, double epsilon, double r0, int n,
                        double p) {
  Budgets b;
  b.epsilon = epsilon;
  b.delta_o = std::max(sphere::grad_sobolev_norm(f1_0, n + 1, p), sphere::grad_sobolev_norm(f2_0, n + 1, p)) / r0;
  b.delta_m = std::max(std::abs(sphere::mean(f1_0)), std::abs(sphere::mean(f2_0))) / r0;
  const ScalarField d = f2_0 - f1_0;
  b.dd_o = sphere::grad_sobolev_norm(d, n, p) / r0;
  b.dd_o_n1 = sphere::grad_sobolev_norm(d, n + 1, p) / r0;
  b.dd_m = std::abs(sphere::mean(d)) / r0;
  return b;
}

namespace {

PerturbationRun finish_pair(const MetricFamily& metric, PerturbationRun run, const std::vector<double>& t1,
                            std::vector<ScalarField> s1, const std::vector<double>& steps1, const std::vector<double>& t2,
                            std::vector<ScalarField> s2, const EvolutionConfig& cfg, bool monitor_dd_F);

}  // namespace

PerturbationRun evolve_pair(const MetricFamily& metric, const ScalarField& f1_0, const ScalarField& f2_0,
                            const EvolutionConfig& cfg, bool monitor_dd_F) {
  PerturbationRun run;
  std::vector<double> t1, t2;
  std::vector<ScalarField> s1, s2;
  run.f1 = evolution::evolve(metric, f1_0, cfg, [&](double s, const ScalarField& f) {
    t1.push_back(s);
    s1.push_back(f);
  });
  run.f2 = evolution::evolve(metric, f2_0, cfg, [&](double s, const ScalarField& f) {
    t2.push_back(s);
    s2.push_back(f);
  });
  std::vector<double> steps1;
  for (const auto& r : run.f1.rows) steps1.push_back(r.step);
  return finish_pair(metric, std::move(run), t1, std::move(s1), steps1, t2, std::move(s2), cfg, monitor_dd_F);
}

PerturbationRun evolve_against(const MetricFamily& metric, const PerturbationRun& base, const ScalarField& f2_0,
                               const EvolutionConfig& cfg) {
  PerturbationRun run;
  run.f1 = base.f1;
  std::vector<double> t2;
  std::vector<ScalarField> s2;
  EvolutionConfig c = base.schedule(cfg);
  c.record_norms = false;
  c.null_monitor = false;
  c.snapshots.clear();
  run.f2 = evolution::evolve(metric, f2_0, c, [&](double s, const ScalarField& f) {
    t2.push_back(s);
    s2.push_back(f);
  });
  return finish_pair(metric, std::move(run), base.s, base.f1_states, base.steps, t2, std::move(s2), cfg, false);
}

namespace {

PerturbationRun finish_pair(const MetricFamily& metric, PerturbationRun run, const std::vector<double>& t1,
                            std::vector<ScalarField> s1, const std::vector<double>& steps1, const std::vector<double>& t2,
                            std::vector<ScalarField> s2, const EvolutionConfig& cfg, bool monitor_dd_F) {
  run.n = cfg.n;
  run.p = cfg.p;
  const std::size_t L = std::min({t1.size(), t2.size(), steps1.size(), run.f2.rows.size()});
  for (std::size_t j = 0; j < L; ++j)
    if (t1[j] != t2[j] || steps1[j] != run.f2.rows[j].step) {
      std::ostringstream os;
      os << "step sequences diverge at step " << j << " (s = " << t1[j] << " vs " << t2[j] << ")";
      lockstep_fail(os.str());
    }
  run.s.assign(t1.begin(), t1.begin() + L);
  for (std::size_t j = 0; j < L; ++j) run.steps.push_back(steps1[j]);
  s1.resize(L);
  s2.resize(L);
  run.f1_states = std::move(s1);
  run.f2_states = std::move(s2);

  if (run.f1.status != EvolutionStatus::Completed) {
    run.status = run.f1.status;
    run.message = "f1: " + run.f1.message;
  } else if (run.f2.status != EvolutionStatus::Completed) {
    run.status = run.f2.status;
    run.message = "f2: " + run.f2.message;
  }

  run.delta_f.reserve(L);
  for (std::size_t j = 0; j < L; ++j) run.delta_f.push_back(run.f2_states[j] - run.f1_states[j]);
  const auto& prm = metric.params();
  run.budgets = measure_budgets(run.f1_states[0], run.f2_states[0], metric.profile().epsilon, prm.r0, cfg.n, cfg.p);

  run.ledger.resize(L);
  for (std::size_t j = 0; j < L; ++j) {
    auto& row = run.ledger[j];
    row.s = run.s[j];
    row.delta_grad = sphere::grad_sobolev_norm(run.delta_f[j], cfg.n, cfg.p);
    row.delta_grad_n1 = sphere::grad_sobolev_norm(run.delta_f[j], cfg.n + 1, cfg.p);
    row.delta_mean = sphere::mean(run.delta_f[j]);
    row.lin_grad = row.lin_lap = row.lin_mean = row.err_grad = row.err_mean = std::nan("");
    row.var_diff = std::nan("");
    row.dd_F_sup = std::nan("");
    if (monitor_dd_F) {
      try {
        run.ledger[j].dd_F_sup =
            sphere::sup_norm(evolution::rhs_F(metric, run.s[j], run.f2_states[j]) -
                             evolution::rhs_F(metric, run.s[j], run.f1_states[j]));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::OutOfDomain) throw;
      }
    }
  }
  return run;
}

}  // namespace

DDQuantities dd_quantities(const MetricFamily& metric, double s, const ScalarField& f1, const ScalarField& f2) {
  const auto t1 = evolution::transport(metric, s, f1);
  const auto t2 = evolution::transport(metric, s, f2);
  DDQuantities d;
  d.dd_F = t2.F - t1.F;
  d.dd_X = TangentField(f1.grid());
  for (std::size_t i = 0; i < d.dd_X.th.size(); ++i) {
    d.dd_X.th[i] = t2.X.th[i] - t1.X.th[i];
    d.dd_X.ph[i] = t2.X.ph[i] - t1.X.ph[i];
  }
  d.dd_re = evolution::assemble_re(metric, s, f2).re - evolution::assemble_re(metric, s, f1).re;
  return d;
}

DDQuantities dd_quantities(const MetricFamily& metric, const PerturbationRun& run, std::size_t step) {
  if (step >= run.size()) throw Error(ErrorCode::ConfigError, "dd_quantities: step out of range");
  return dd_quantities(metric, run.s[step], run.f1_states[step], run.f2_states[step]);
}

ScalarField linearised_rhs(const TangentField& x1, const ScalarField& u) {
  ScalarField du = sphere::directional(x1, u);
  evolution::remove_mean(du);
  return du;
}

std::vector<ScalarField> evolve_linearised_from(const MetricFamily& metric, const PerturbationRun& run,
                                                const EvolutionConfig& cfg, const ScalarField& init,
                                                double* projected_mean) {
  if (run.size() == 0) throw Error(ErrorCode::ConfigError, "evolve_linearised: empty pair run");
  const double m0 = sphere::mean(init);
  std::vector<ScalarField> out;
  out.reserve(run.size());
  std::size_t j = 0;
  Hooks hk;
  hk.primary = [](const State& y) { return y.fields[0]; };
  hk.rhs = [&](double s, const State& y) {
    const auto t = evolution::transport(metric, s, y.fields[0]);
    return State{{t.F, linearised_rhs(t.X, y.fields[1])}, {}};
  };
  hk.project = [](State& y) { return evolution::remove_mean(y.fields[1]); };
  hk.on_step = [&](double s, const State& y) {
    check_f1(run, j++, s, y.fields[0]);
    out.push_back(evolution::reconstruct(y.fields[1], m0));
  };
  State y0{{run.f1_states[0], sphere::laplacian(init)}, {}};
  const Trajectory tr = evolution::engine::run(metric, std::move(y0), coupled_config(run, cfg), hk);
  if (out.size() != run.size()) lockstep_fail("linearised run stopped early: " + tr.message);
  if (projected_mean) *projected_mean = tr.projected_mean;
  return out;
}

void evolve_linearised(const MetricFamily& metric, PerturbationRun& run, const EvolutionConfig& cfg) {
  run.lin_delta_f = evolve_linearised_from(metric, run, cfg, run.delta_f.at(0), &run.lin_projected_mean);
  // initial identity bdf(0) = df(0) holds exactly, not only to inversion round-off
  run.lin_delta_f[0] = run.delta_f[0];
}

ScalarField variation_rhs(const MetricFamily& metric, double s, const ScalarField& f1, const ScalarField& v) {
  sphere::check_same_grid(f1.grid(), v.grid(), "variation_rhs");
  const auto ms = evolution::sample_on_graph(metric, s, f1, geometry::JetLevel::Pointwise);
  const auto d1 = sphere::cart_grad(f1);
  const auto dv = sphere::cart_grad(v);
  std::vector<double> out(f1.size());
  for (int i = 0; i < f1.size(); ++i) {
    const auto& m = ms[i];
    const Vec3 a{d1.comp[0][i], d1.comp[1][i], d1.comp[2][i]};
    const Vec3 b{dv.comp[0][i], dv.comp[1][i], dv.comp[2][i]};
    const Mat3 gi = ops::tangent_inverse(m.gslash.v, m.x);
    Mat3 A{}, Au{};
    const Mat3 giugi = ops::mul3(gi, m.gslash.u, gi);
    for (int k = 0; k < 9; ++k) {
      A[k] = m.omega_sq.v * gi[k];
      Au[k] = m.omega_sq.u * gi[k] - m.omega_sq.v * giugi[k];
    }
    out[i] = -ops::dot(m.b.v, b) - ops::dot(m.b.u, a) * v[i] + 2.0 * ops::quad(A, a, b) + ops::quad(Au, a, a) * v[i];
  }
  return ScalarField(f1.grid(), std::move(out));
}

void evolve_variation(const MetricFamily& metric, PerturbationRun& run, const EvolutionConfig& cfg) {
  if (run.size() == 0) throw Error(ErrorCode::ConfigError, "evolve_variation: empty pair run");
  run.variation.clear();
  std::size_t j = 0;
  Hooks hk;
  hk.primary = [](const State& y) { return y.fields[0]; };
  hk.rhs = [&](double s, const State& y) {
    return State{{evolution::rhs_F(metric, s, y.fields[0]), variation_rhs(metric, s, y.fields[0], y.fields[1])}, {}};
  };
  hk.on_step = [&](double s, const State& y) {
    check_f1(run, j++, s, y.fields[0]);
    run.variation.push_back(y.fields[1]);
  };
  State y0{{run.f1_states[0], run.delta_f[0]}, {}};
  const Trajectory tr = evolution::engine::run(metric, std::move(y0), coupled_config(run, cfg), hk);
  if (run.variation.size() != run.size()) lockstep_fail("variation run stopped early: " + tr.message);
}

ErrorReport compute_error(const MetricFamily& metric, PerturbationRun& run, bool check_consistency) {
  if (run.lin_delta_f.size() != run.size())
    throw Error(ErrorCode::ConfigError, "compute_error needs the linearised perturbation");
  const int n = run.n;
  const double p = run.p;
  ErrorReport rep;
  run.err_f.clear();
  for (std::size_t j = 0; j < run.size(); ++j) {
    run.err_f.push_back(run.delta_f[j] - run.lin_delta_f[j]);
    auto& row = run.ledger[j];
    row.lin_grad = sphere::grad_sobolev_norm(run.lin_delta_f[j], n, p);
    row.lin_lap = sphere::sobolev_norm(sphere::laplacian(run.lin_delta_f[j]), n, p);
    row.lin_mean = sphere::mean(run.lin_delta_f[j]);
    row.err_grad = sphere::grad_sobolev_norm(run.err_f[j], n, p);
    row.err_mean = sphere::mean(run.err_f[j]);
    if (run.variation.size() == run.size())
      row.var_diff = sphere::sup_norm(run.variation[j] - run.lin_delta_f[j]);
    rep.max_err_grad = std::max(rep.max_err_grad, row.err_grad);
    rep.max_delta_grad = std::max(rep.max_delta_grad, row.delta_grad);
  }
  if (check_consistency && run.size() > 1) {
    std::vector<double> mdF(run.size());
    for (std::size_t j = 0; j < run.size(); ++j)
      mdF[j] = sphere::mean(evolution::rhs_F(metric, run.s[j], run.f2_states[j]) -
                            evolution::rhs_F(metric, run.s[j], run.f1_states[j]));
    for (std::size_t j = 0; j + 1 < run.size(); ++j) {
      const double h = run.s[j + 1] - run.s[j];
      const double lhs = run.ledger[j + 1].err_mean - run.ledger[j].err_mean;
      rep.mean_consistency = std::max(rep.mean_consistency, std::abs(lhs - 0.5 * h * (mdF[j] + mdF[j + 1])));
    }
  }
  return rep;
}

std::vector<std::string> ledger_header() {
  return {"s",        "delta_grad", "delta_grad_n1", "delta_mean", "lin_grad", "lin_lap",
          "lin_mean", "err_grad",   "err_mean",      "var_diff",   "dd_F_sup"};
}

std::vector<double> ledger_values(const PerturbationRow& r) {
  return {r.s,        r.delta_grad, r.delta_grad_n1, r.delta_mean, r.lin_grad, r.lin_lap,
          r.lin_mean, r.err_grad,   r.err_mean,      r.var_diff,   r.dd_F_sup};
}

}  // namespace nullfol::perturbation
