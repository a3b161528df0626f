#include "evolution/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "errors.hpp"
#include "evolution/engine.hpp"
#include "sphere/legendre.hpp"

namespace nullfol::evolution {

namespace engine {

namespace {

// coefficient-space L2 norms of the whole field and of the part above band
std::pair<double, double> tail_split(const ScalarField& f, int band) {
  const auto& c = f.coeffs();
  double tail = 0.0, total = 0.0;
  const int cut = sphere::coeff_count(band);
  for (int i = 0; i < static_cast<int>(c.size()); ++i) {
    total += c[i] * c[i];
    if (i >= cut) tail += c[i] * c[i];
  }
  return {std::sqrt(total), std::sqrt(tail)};
}

State truncated(State y) {
  for (auto& f : y.fields) f = sphere::truncate(f);
  return y;
}

}  // namespace

State combine(const State& y, double h, const State& k) {
  State out = y;
  for (std::size_t i = 0; i < out.fields.size(); ++i) out.fields[i].add_scaled(k.fields[i], h);
  for (std::size_t i = 0; i < out.scalars.size(); ++i) out.scalars[i] += h * k.scalars[i];
  return out;
}

Trajectory run(const MetricFamily& metric, State y, const EvolutionConfig& cfg, const Hooks& hooks) {
  const auto& prm = metric.params();
  cfg.validate(prm.r0, prm.kappa);
  const int lmax = metric.grid()->lmax();
  const double edge = prm.kappa * prm.r0;

  Trajectory tr;
  y = truncated(std::move(y));
  if (hooks.project) hooks.project(y);
  double s = cfg.s_start;
  ScalarField f = hooks.primary(y);

  if (cfg.delta_o) {
    const double g = sphere::grad_sobolev_norm(f, cfg.n + 1, cfg.p);
    if (g > *cfg.delta_o * prm.r0) {
      std::ostringstream os;
      os << "initial gradient norm " << g << " exceeds budget " << *cfg.delta_o * prm.r0;
      tr.warnings.push_back(os.str());
    }
  }
  if (cfg.delta_m) {
    const double m = std::abs(sphere::mean(f));
    if (m > *cfg.delta_m * prm.r0) {
      std::ostringstream os;
      os << "initial mean " << m << " exceeds budget " << *cfg.delta_m * prm.r0;
      tr.warnings.push_back(os.str());
    }
  }

  std::vector<double> snaps = cfg.snapshots;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  while (next_snap < snaps.size() && snaps[next_snap] < s) ++next_snap;
  auto keep_snapshot = [&]() {
    while (next_snap < snaps.size() && std::abs(snaps[next_snap] - s) <= 1e-12 * std::max(1.0, std::abs(s))) {
      tr.snapshots.push_back({s, f});
      ++next_snap;
    }
  };

  // false when the run has to stop
  auto check_status = [&]() {
    const double mx = sphere::sup_norm(f);
    if (mx >= edge) {
      tr.status = EvolutionStatus::BoundaryHit;
      std::ostringstream os;
      os << "max|f| = " << mx << " reached the boundary at s = " << s;
      tr.message = os.str();
      return false;
    }
    if (cfg.guard_armed && mx >= cfg.guard * edge) {
      tr.status = EvolutionStatus::GuardHit;
      std::ostringstream os;
      os << "max|f| = " << mx << " crossed the guard " << cfg.guard * edge << " at s = " << s;
      tr.message = os.str();
      return false;
    }
    return true;
  };

  // rhs_sup of the last row is filled from the next step's first stage
  bool pending_rhs = false;
  auto record = [&](double h) {
    LedgerRow row;
    const bool inside = sphere::sup_norm(f) < edge;
    EvolutionConfig c2 = cfg;
    if (!inside) c2.null_monitor = false;
    row = measure(metric, s, f, c2, h);
    if (!inside) row.null_residual = std::nan("");
    row.rhs_sup = std::nan("");
    pending_rhs = inside && cfg.record_norms;
    tr.rows.push_back(row);
  };
  auto finish_rhs = [&]() {
    if (!pending_rhs) return;
    try {
      tr.rows.back().rhs_sup = sphere::sup_norm(rhs_F(metric, s, f));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OutOfDomain) throw;
    }
    pending_rhs = false;
  };

  record(0.0);
  if (hooks.on_step) hooks.on_step(s, y);
  keep_snapshot();
  if (!check_status()) {
    finish_rhs();
    tr.final_state = {s, f};
    return tr;
  }

  const double tiny = 1e-12 * std::max(1.0, std::abs(cfg.s_end));
  const bool scheduled = !cfg.step_schedule.empty();
  for (std::size_t j = 0;; ++j) {
    double h;
    if (scheduled) {
      if (j >= cfg.step_schedule.size()) break;
      h = cfg.step_schedule[j];
    } else {
      if (!(s < cfg.s_end - tiny)) break;
      h = std::min(step_size(cfg, prm.r0, s), cfg.s_end - s);
      if (next_snap < snaps.size() && snaps[next_snap] > s && snaps[next_snap] - s < h) h = snaps[next_snap] - s;
    }

    State raw;
    try {
      auto stage = [&](double c, const State& k) { return truncated(combine(y, c, k)); };
      const State k1 = hooks.rhs(s, y);
      if (pending_rhs && hooks.rhs_sup_from_stage) {
        tr.rows.back().rhs_sup = hooks.rhs_sup_from_stage(k1);
        pending_rhs = false;
      }
      finish_rhs();
      const State k2 = hooks.rhs(s + 0.5 * h, stage(0.5 * h, k1));
      const State k3 = hooks.rhs(s + 0.5 * h, stage(0.5 * h, k2));
      const State k4 = hooks.rhs(s + h, stage(h, k3));
      raw = combine(y, h / 6.0, k1);
      raw = combine(raw, h / 3.0, k2);
      raw = combine(raw, h / 3.0, k3);
      raw = combine(raw, h / 6.0, k4);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::OutOfDomain) throw;
      tr.status = EvolutionStatus::BoundaryHit;
      tr.message = std::string("stage left the neighbourhood: ") + e.what();
      break;
    }

    for (std::size_t i = 0; i < raw.fields.size(); ++i) {
      const auto [norm, tail] = tail_split(raw.fields[i], lmax);
      if (tail > cfg.tail_tol * std::max(norm, 1e-10)) {
        std::ostringstream os;
        os << "spectral tail " << tail / std::max(norm, 1e-300) << " above lmax=" << lmax << " at s = " << s
           << " (step " << h << "); refine the grid or the step";
        throw Error(ErrorCode::StepRejected, os.str());
      }
    }
    y = truncated(std::move(raw));
    if (hooks.project) tr.projected_mean = std::max(tr.projected_mean, std::abs(hooks.project(y)));
    s += h;
    f = hooks.primary(y);
    ++tr.steps;
    record(h);
    if (hooks.on_step) hooks.on_step(s, y);
    keep_snapshot();
    if (!check_status()) break;
  }
  finish_rhs();
  tr.final_state = {s, f};
  return tr;
}

}  // namespace engine

void EvolutionConfig::validate(double r0, double kappa) const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::ConfigError, m); };
  if (!(h0 > 0.0)) bad("h0 must be positive");
  if (!(h_max >= h0)) bad("h_max must be at least h0");
  if (s_start < -kappa * r0) bad("s_start below -kappa r0");
  if (!(s_end >= s_start)) bad("s_end before s_start");
  for (double h : step_schedule)
    if (!(h > 0.0)) bad("scheduled steps must be positive");
  if (!(guard > 0.0 && guard < 1.0)) bad("guard fraction must lie in (0,1)");
  if (n < 0 || n + 1 > sphere::kMaxTangentDepth) bad("norm order n out of range");
  if (!(p >= 1.0)) bad("norm exponent p must be >= 1");
  if (!(tail_tol > 0.0)) bad("tail tolerance must be positive");
}

const char* to_string(EvolutionStatus s) {
  switch (s) {
    case EvolutionStatus::Completed: return "Completed";
    case EvolutionStatus::BoundaryHit: return "BoundaryHit";
    case EvolutionStatus::GuardHit: return "GuardHit";
  }
  return "?";
}

double step_size(const EvolutionConfig& cfg, double r0, double s) {
  if (!cfg.stretch) return cfg.h0;
  return std::min(cfg.h_max, cfg.h0 * std::max(1.0, (r0 + s) / r0));
}

LedgerRow measure(const MetricFamily& metric, double s, const ScalarField& f, const EvolutionConfig& cfg,
                  double step) {
  LedgerRow r;
  r.s = s;
  r.mean_f = sphere::mean(f);
  if (cfg.record_norms) {
    r.grad_norm = sphere::grad_sobolev_norm(f, cfg.n + 1, cfg.p);
    r.lap_norm = sphere::sobolev_norm(sphere::laplacian(f), cfg.n, cfg.p);
  } else {
    r.grad_norm = r.lap_norm = std::nan("");
  }
  r.max_abs_f = sphere::sup_norm(f);
  r.step = step;
  if (cfg.null_monitor) r.null_residual = sphere::sup_norm(null_residual(metric, s, f));
  return r;
}

Trajectory evolve(const MetricFamily& metric, const ScalarField& f0, const EvolutionConfig& cfg,
                  const StateObserver& observer) {
  sphere::check_same_grid(metric.grid(), f0.grid(), "evolve");
  engine::Hooks hk;
  hk.rhs = [&](double s, const engine::State& y) { return engine::State{{rhs_F(metric, s, y.fields[0])}, {}}; };
  hk.primary = [](const engine::State& y) { return y.fields[0]; };
  hk.rhs_sup_from_stage = [](const engine::State& k1) { return sphere::sup_norm(k1.fields[0]); };
  if (observer) hk.on_step = [&](double s, const engine::State& y) { observer(s, y.fields[0]); };
  return engine::run(metric, engine::State{{f0}, {}}, cfg, hk);
}

Trajectory evolve_laplacian_form(const MetricFamily& metric, const ScalarField& f0, const EvolutionConfig& cfg) {
  sphere::check_same_grid(metric.grid(), f0.grid(), "evolve_laplacian_form");
  engine::Hooks hk;
  hk.primary = [](const engine::State& y) { return reconstruct(y.fields[0], y.scalars[0]); };
  hk.rhs = [&](double s, const engine::State& y) {
    // stage values of u carry a round-off mean; reconstruct ignores it
    const ScalarField f = reconstruct(y.fields[0], y.scalars[0]);
    const Transport t = transport(metric, s, f);
    ScalarField du = sphere::directional(t.X, y.fields[0]);
    du += assemble_re(metric, s, f).re;
    return engine::State{{std::move(du)}, {sphere::mean(t.F)}};
  };
  hk.project = [](engine::State& y) { return remove_mean(y.fields[0]); };
  engine::State y0{{sphere::laplacian(sphere::truncate(f0))}, {sphere::mean(f0)}};
  return engine::run(metric, std::move(y0), cfg, hk);
}

ScalarField reconstruct(const ScalarField& u, double mean_value) {
  ScalarField uc = u;
  remove_mean(uc);
  ScalarField f = sphere::inv_laplacian(uc);
  for (double& v : f.mutable_values()) v += mean_value;
  return f;
}

double remove_mean(ScalarField& u) {
  const double mu = sphere::mean(u);
  for (double& v : u.mutable_values()) v -= mu;
  return mu;
}

std::vector<std::string> ledger_header() {
  return {"s", "mean_f", "grad_norm", "lap_norm", "max_abs_f", "null_residual", "rhs_sup", "step"};
}

std::vector<double> ledger_values(const LedgerRow& r) {
  return {r.s, r.mean_f, r.grad_norm, r.lap_norm, r.max_abs_f, r.null_residual, r.rhs_sup, r.step};
}

}  // namespace nullfol::evolution
