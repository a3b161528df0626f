#include "analysis/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

#include "analysis/fit.hpp"
#include "errors.hpp"
#include "evolution/initial_data.hpp"

namespace nullfol::analysis {

using perturbation::PerturbationRow;

const char* to_string(CertStatus s) {
  switch (s) {
    case CertStatus::Pass: return "pass";
    case CertStatus::Fail: return "fail";
    case CertStatus::Inconclusive: return "inconclusive";
    case CertStatus::NotApplicable: return "not_applicable";
  }
  return "unknown";
}

bool EnsembleResult::all_pass() const {
  if (incomplete) return false;
  for (const auto& c : certificates)
    if (c.status != CertStatus::Pass && c.status != CertStatus::NotApplicable) return false;
  return true;
}

evolution::EvolutionConfig EnsembleSpec::default_evolution() {
  evolution::EvolutionConfig c;
  c.s_end = 100.0;
  c.h0 = 0.1;
  c.h_max = 4.0;
  return c;
}

void EnsembleSpec::validate() const {
  geometry::validate(params);
  evolution.validate(params.r0, params.kappa);
  if (runs < 1) throw Error(ErrorCode::ConfigError, "ensemble needs at least one run");
  if (data_band < 1 || data_band > grid.lmax) throw Error(ErrorCode::ConfigError, "data band outside [1, lmax]");
  for (double b : {delta_o, delta_m, dd_o, dd_m})
    if (!(b >= 0.0) || !std::isfinite(b)) throw Error(ErrorCode::ConfigError, "budgets must be finite and >= 0");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::ConfigError, "epsilon must be >= 0");
  if (mean_fraction && !(std::abs(*mean_fraction) <= 1.0))
    throw Error(ErrorCode::ConfigError, "mean fraction must lie in [-1, 1]");
  if (!(rhs_fit_to > rhs_fit_from)) throw Error(ErrorCode::ConfigError, "empty right-side fit window");
}

std::pair<ScalarField, ScalarField> member_data(const EnsembleSpec& spec, const GridPtr& g, int i) {
  std::mt19937_64 rng(spec.data_seed + static_cast<std::uint64_t>(i));
  std::uniform_real_distribution<double> size(0.5, 0.9), sign(-1.0, 1.0);
  const double a1 = size(rng), b1r = sign(rng), a2 = size(rng), b2 = sign(rng);
  const std::uint64_t s1 = rng(), s2 = rng();
  const double b1 = spec.mean_fraction ? (i % 2 == 0 ? *spec.mean_fraction : -*spec.mean_fraction) : b1r;
  const double r0 = spec.params.r0;
  const int n = spec.evolution.n;
  const double p = spec.evolution.p;
  if (spec.constants_only) {
    ScalarField f1(g, b1 * spec.delta_m * r0);
    return {f1, ScalarField(g, f1[0] + b2 * spec.dd_m * r0)};
  }
  ScalarField f1 = evolution::make_initial_data(g, s1, spec.data_band, a1 * spec.delta_o * r0,
                                                b1 * spec.delta_m * r0, n + 1, p, spec.data_decay);
  ScalarField d = evolution::make_initial_data(g, s2, spec.data_band, a2 * spec.dd_o * r0, b2 * spec.dd_m * r0, n, p,
                                               spec.data_decay);
  ScalarField f2 = f1;
  f2 += d;
  return {f1, f2};
}

namespace {

geometry::PerturbationProfile member_profile(const EnsembleSpec& spec, int i) {
  if (spec.epsilon == 0.0) return geometry::PerturbationProfile::zero();
  return geometry::PerturbationProfile::generate(spec.epsilon, spec.profile_seed + static_cast<std::uint64_t>(i));
}

RunRecord run_member_impl(const EnsembleSpec& spec, const GridPtr& g, int i) {
  RunRecord rec;
  rec.index = i;
  rec.profile_seed = spec.profile_seed + static_cast<std::uint64_t>(i);
  rec.data_seed = spec.data_seed + static_cast<std::uint64_t>(i);
  evolution::MetricFamily metric(spec.params, member_profile(spec, i), g);
  auto [f1, f2] = member_data(spec, g, i);
  const double r0 = spec.params.r0;
  const auto& cfg = spec.evolution;
  rec.budgets = perturbation::measure_budgets(f1, spec.perturbation ? f2 : f1, spec.epsilon, r0, cfg.n, cfg.p);
  if (spec.perturbation) {
    auto run = perturbation::evolve_pair(metric, f1, f2, cfg);
    rec.foliations = {run.f1.rows, run.f2.rows};
    rec.statuses = {evolution::to_string(run.f1.status), evolution::to_string(run.f2.status)};
    if (spec.linearisation && run.status == evolution::EvolutionStatus::Completed) {
      perturbation::evolve_linearised(metric, run, cfg);
      perturbation::compute_error(metric, run, false);
    }
    rec.pert = run.ledger;
    if (i < spec.decomposition_runs && run.status == evolution::EvolutionStatus::Completed) {
      ScalarField d = f2;
      d -= f1;
      const ScalarField dm(g, sphere::mean(d));
      ScalarField shifted = f1, freed = f2;
      shifted += dm;
      freed -= dm;
      auto a = perturbation::evolve_against(metric, run, shifted, cfg);
      auto b = perturbation::evolve_against(metric, run, freed, cfg);
      rec.has_decomposition = true;
      rec.shift_budgets = a.budgets;
      rec.free_budgets = b.budgets;
      rec.pert_shift = a.ledger;
      rec.pert_free = b.ledger;
    }
    if (i < spec.constant_partner_runs) {
      // a constant solution and a small perturbation of it
      ScalarField c(g, f1.coeffs()[0] / std::sqrt(4.0 * std::acos(-1.0)));
      ScalarField cd = f2;
      cd -= f1;
      cd += c;
      auto pr = perturbation::evolve_pair(metric, cd, c, cfg);
      rec.has_partner = true;
      rec.partner_budgets = pr.budgets;
      rec.partner = pr.ledger;
    }
  } else {
    auto tr = evolution::evolve(metric, f1, cfg);
    rec.foliations = {tr.rows};
    rec.statuses = {evolution::to_string(tr.status)};
  }
  if (i < spec.transport_runs) {
    TransportCheckConfig tc;
    tc.m = cfg.n;
    tc.x_depth = cfg.n + 1;
    tc.p = cfg.p;
    tc.r0 = r0;
    tc.c_ceiling = spec.ceilings.transport;
    tc.k_max = spec.transport_k_max;
    try {
      const auto rep = transport_norm_check(metric, f1, cfg, tc);
      rec.transport_c = rep.measured_c;
      rec.transport_commutator = rep.commutator_residual;
      rec.transport_k = rep.k;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::HypothesisViolated) throw;
      rec.transport_c = std::numeric_limits<double>::infinity();
    }
  }
  rec.ok = true;
  return rec;
}

double sup_of(const std::vector<evolution::LedgerRow>& rows, double evolution::LedgerRow::*field, bool absval) {
  double m = 0.0;
  for (const auto& r : rows) {
    const double v = absval ? std::abs(r.*field) : r.*field;
    if (std::isfinite(v)) m = std::max(m, v);
  }
  return m;
}

double sup_of(const std::vector<PerturbationRow>& rows, double PerturbationRow::*field) {
  double m = 0.0;
  for (const auto& r : rows) {
    const double v = std::abs(r.*field);
    if (std::isfinite(v)) m = std::max(m, v);
  }
  return m;
}

// ratio with 0/0 = 0; numerators below kNumericalZero r0 are round-off of the
// differences that formed them and count as zero
constexpr double kNumericalZero = 1e-14;
double ratio(double num, double den, double r0 = 1.0) {
  if (num <= kNumericalZero * r0) return 0.0;
  if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
  return num / den;
}

void settle(Certificate& c, bool incomplete) {
  bool ok = true;
  for (const auto& k : c.constants) ok &= k.pass();
  c.status = ok ? CertStatus::Pass : CertStatus::Fail;
  if (incomplete) c.status = CertStatus::Inconclusive;
}

}  // namespace

RunRecord run_member(const EnsembleSpec& spec, const GridPtr& g, int i) {
  try {
    return run_member_impl(spec, g, i);
  } catch (const std::exception& e) {
    RunRecord r;
    r.index = i;
    r.profile_seed = spec.profile_seed + static_cast<std::uint64_t>(i);
    r.data_seed = spec.data_seed + static_cast<std::uint64_t>(i);
    r.error = e.what();
    return r;
  }
}

RunRecord run_member(const EnsembleSpec& spec, int i) {
  return run_member(spec, sphere::SphereGrid::create(spec.grid), i);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
  const int nt = std::max(1, std::min(resolve_workers(workers), count));
  if (nt == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errs(nt);
  std::vector<std::thread> pool;
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errs[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

std::vector<Certificate> aggregate(const EnsembleSpec& spec, const std::vector<RunRecord>& runs) {
  const double r0 = spec.params.r0, eps = spec.epsilon;
  const auto& ce = spec.ceilings;
  int aborted = 0;
  for (const auto& r : runs) aborted += r.ok ? 0 : 1;
  const bool incomplete = aborted > 0;
  std::ostringstream inc;
  if (incomplete) inc << aborted << " of " << runs.size() << " runs aborted; ";
  std::vector<Certificate> out;

  // foliation estimates: every evolved foliation is a sample
  {
    Certificate c;
    c.id = "foliation_bounds";
    double co = 0.0;
    int co_samples = 0;
    std::vector<std::vector<double>> X;
    std::vector<double> y;
    for (const auto& r : runs) {
      if (!r.ok) continue;
      for (const auto& rows : r.foliations) {
        if (rows.empty()) continue;
        const double g0 = rows[0].grad_norm, m0 = std::abs(rows[0].mean_f);
        if (g0 >= 1e-12 * r0) {
          co = std::max(co, sup_of(rows, &evolution::LedgerRow::grad_norm, false) / g0);
          ++co_samples;
        }
        X.push_back({m0, g0 * g0 / r0});
        y.push_back(sup_of(rows, &evolution::LedgerRow::mean_f, true));
      }
    }
    if (co_samples == 0) co = 1.0;  // no sample with a gradient
    const auto fit = fit_bound(X, y);
    c.samples = static_cast<int>(y.size());
    c.constants = {{"c_o", co, ce.grad_growth},
                   {"c_mm", fit.ok ? fit.constants[0] : std::numeric_limits<double>::infinity(), ce.mean_mean},
                   {"c_mo", fit.ok ? fit.constants[1] : std::numeric_limits<double>::infinity(), ce.mean_grad}};
    std::ostringstream note;
    note << inc.str() << co_samples << " gradient samples; mean fit inflation " << fit.inflation;
    c.note = note.str();
    settle(c, incomplete);
    out.push_back(c);
  }

  {
    Certificate c;
    c.id = "mean_drift";
    double worst = 0.0;
    for (const auto& r : runs) {
      if (!r.ok) continue;
      const auto& b = r.budgets;
      for (const auto& rows : r.foliations) {
        if (rows.empty()) continue;
        double drift = 0.0;
        for (const auto& row : rows) drift = std::max(drift, std::abs(row.mean_f - rows[0].mean_f));
        worst = std::max(worst, ratio(drift, (eps * b.delta_m * b.delta_o + b.delta_o * b.delta_o) * r0, r0));
        ++c.samples;
      }
    }
    c.constants = {{"c", worst, ce.drift}};
    c.note = inc.str();
    settle(c, incomplete);
    out.push_back(c);
  }

  {
    Certificate c;
    c.id = "rhs_decay";
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& r : runs) {
      if (!r.ok) continue;
      for (const auto& rows : r.foliations) {
        std::vector<double> x, y;
        for (const auto& row : rows)
          if (row.s >= spec.rhs_fit_from * r0 && row.s <= spec.rhs_fit_to * r0 && std::isfinite(row.rhs_sup) &&
              row.rhs_sup > 0.0) {
            x.push_back(std::log(r0 + row.s));
            y.push_back(std::log(row.rhs_sup));
          }
        if (x.size() < 3) continue;
        worst = std::min(worst, -fit_slope(x, y));
        ++c.samples;
      }
    }
    if (c.samples == 0) {
      c.status = incomplete ? CertStatus::Inconclusive : CertStatus::NotApplicable;
      c.note = inc.str() + "no trajectory with a nonzero right side in the fit window";
    } else {
      c.constants = {{"exponent", worst, ce.rhs_exponent, true}};
      c.note = inc.str();
      settle(c, incomplete);
    }
    out.push_back(c);
  }

  {
    Certificate c;
    c.id = "boundary_guard";
    double worst = 0.0;
    int exits = 0;
    for (const auto& r : runs) {
      if (!r.ok) continue;
      for (const auto& st : r.statuses) exits += st == std::string("Completed") ? 0 : 1;
      const auto& b = r.budgets;
      for (const auto& rows : r.foliations) {
        if (rows.empty() || !(b.delta_o > 0.0)) continue;
        const double top = sup_of(rows, &evolution::LedgerRow::max_abs_f, false) / r0;
        worst = std::max(worst, (top - b.delta_m) / b.delta_o);
        ++c.samples;
      }
    }
    c.constants = {{"c", worst, ce.guard}, {"domain_exits", static_cast<double>(exits), 0.0}};
    c.note = inc.str();
    settle(c, incomplete);
    out.push_back(c);
  }

  bool any_pert = false;
  for (const auto& r : runs) any_pert |= r.ok && !r.pert.empty();
  if (any_pert) {
    Certificate c;
    c.id = "perturbation_bounds";
    const double inf = std::numeric_limits<double>::infinity();
    // features of the two bounds: gradient (dd_o, (delta_o^2 + eps delta_o) dd_m),
    // mean (dd_m, (delta_o + eps delta_m) dd_o)
    auto gfeat = [&](const perturbation::Budgets& b) {
      return std::vector<double>{b.dd_o * r0, (b.delta_o * b.delta_o + eps * b.delta_o) * b.dd_m * r0};
    };
    auto mfeat = [&](const perturbation::Budgets& b) {
      return std::vector<double>{b.dd_m * r0, (b.delta_o + eps * b.delta_m) * b.dd_o * r0};
    };
    struct Sample {
      std::vector<double> xg, xm;
      double yg, ym;
    };
    std::vector<Sample> mixed;
    double c_om = 0.0, c_mo = 0.0;
    int isolated = 0;
    for (const auto& r : runs) {
      if (!r.ok || r.pert.empty()) continue;
      mixed.push_back({gfeat(r.budgets), mfeat(r.budgets), sup_of(r.pert, &PerturbationRow::delta_grad),
                       sup_of(r.pert, &PerturbationRow::delta_mean)});
      if (!r.has_decomposition) continue;
      ++isolated;
      // a pure mean shift has dd_o = 0: the gradient it develops is all cross term
      c_om = std::max(c_om, ratio(sup_of(r.pert_shift, &PerturbationRow::delta_grad), gfeat(r.shift_budgets)[1], r0));
      // a mean-free difference has dd_m = 0: the mean it develops is all cross term
      c_mo = std::max(c_mo, ratio(sup_of(r.pert_free, &PerturbationRow::delta_mean), mfeat(r.free_budgets)[1], r0));
      mixed.push_back({gfeat(r.shift_budgets), mfeat(r.shift_budgets),
                       sup_of(r.pert_shift, &PerturbationRow::delta_grad),
                       sup_of(r.pert_shift, &PerturbationRow::delta_mean)});
      mixed.push_back({gfeat(r.free_budgets), mfeat(r.free_budgets), sup_of(r.pert_free, &PerturbationRow::delta_grad),
                       sup_of(r.pert_free, &PerturbationRow::delta_mean)});
    }
    double c_o = 0.0, c_m = 0.0;
    std::ostringstream note;
    note << inc.str();
    if (isolated > 0) {
      // primary constants: what remains after the measured cross terms
      for (const auto& sm : mixed) {
        const double rg = std::max(0.0, sm.yg - c_om * sm.xg[1]);
        const double rm = std::max(0.0, sm.ym - c_mo * sm.xm[1]);
        c_o = std::max(c_o, ratio(rg, sm.xg[0], r0));
        c_m = std::max(c_m, ratio(rm, sm.xm[0], r0));
      }
      note << "cross constants from " << isolated << " mean-shift and mean-free partner pairs";
    } else {
      std::vector<std::vector<double>> Xg, Xm;
      std::vector<double> yg, ym;
      for (const auto& sm : mixed) {
        Xg.push_back(sm.xg);
        Xm.push_back(sm.xm);
        yg.push_back(sm.yg);
        ym.push_back(sm.ym);
      }
      const auto fg = fit_bound(Xg, yg), fm = fit_bound(Xm, ym);
      c_o = fg.ok ? fg.constants[0] : inf;
      c_om = fg.ok ? fg.constants[1] : inf;
      c_m = fm.ok ? fm.constants[0] : inf;
      c_mo = fm.ok ? fm.constants[1] : inf;
      note << "least-squares fit over mixed runs";
    }
    c.samples = static_cast<int>(mixed.size());
    c.constants = {{"c_o", c_o, ce.pert_grad},
                   {"c_m", c_m, ce.pert_mean},
                   {"c_om", c_om, ce.pert_grad_mean},
                   {"c_mo", c_mo, ce.pert_mean_grad}};
    c.note = note.str();
    settle(c, incomplete);
    out.push_back(c);

    Certificate k;
    k.id = "perturbation_bounds_const";
    double worst = 0.0;
    for (const auto& r : runs) {
      if (!r.ok || !r.has_partner || r.partner.empty()) continue;
      const double d0 = r.partner[0].delta_grad_n1;
      if (!(d0 >= 1e-12 * r0)) continue;
      worst = std::max(worst, sup_of(r.partner, &PerturbationRow::delta_grad_n1) / d0);
      ++k.samples;
    }
    if (k.samples == 0) {
      k.status = incomplete ? CertStatus::Inconclusive : CertStatus::NotApplicable;
      k.note = inc.str() + "no run with a constant partner and nonzero difference";
    } else {
      k.constants = {{"c", worst, ce.pert_const}};
      k.note = inc.str();
      settle(k, incomplete);
    }
    out.push_back(k);
  }

  bool any_lin = false;
  for (const auto& r : runs)
    any_lin |= r.ok && !r.pert.empty() && spec.linearisation && std::isfinite(r.pert[0].lin_lap);
  if (any_lin) {
    Certificate c;
    c.id = "linearisation_error";
    double worst = 0.0;
    Certificate g;
    g.id = "linearised_growth";
    double growth = 0.0, mean_change = 0.0;
    for (const auto& r : runs) {
      if (!r.ok || r.pert.empty() || !std::isfinite(r.pert[0].lin_lap)) continue;
      const auto& b = r.budgets;
      const double num = std::max(sup_of(r.pert, &PerturbationRow::err_grad), sup_of(r.pert, &PerturbationRow::err_mean));
      const double den = ((b.delta_o + eps * b.delta_m) * b.dd_o + (b.delta_o * b.delta_o + eps * b.delta_o) * b.dd_m) * r0;
      worst = std::max(worst, ratio(num, den, r0));
      ++c.samples;
      const double l0 = r.pert[0].lin_lap;
      if (l0 >= 1e-14 * r0) growth = std::max(growth, sup_of(r.pert, &PerturbationRow::lin_lap) / l0);
      for (const auto& row : r.pert) mean_change = std::max(mean_change, std::abs(row.lin_mean - r.pert[0].lin_mean));
      ++g.samples;
    }
    c.constants = {{"c", worst, ce.lin_error}};
    c.note = inc.str();
    settle(c, incomplete);
    out.push_back(c);
    g.constants = {{"c", growth, ce.lin_growth}, {"mean_change", mean_change, ce.lin_mean_change}};
    g.note = inc.str();
    settle(g, incomplete);
    out.push_back(g);
  }

  bool any_tr = false;
  for (const auto& r : runs) any_tr |= r.ok && r.transport_c.has_value();
  if (any_tr) {
    Certificate c;
    c.id = "transport_gronwall";
    double worst = 0.0, comm = 0.0, k = 0.0;
    for (const auto& r : runs) {
      if (!r.ok || !r.transport_c) continue;
      worst = std::max(worst, *r.transport_c);
      if (r.transport_commutator) comm = std::max(comm, *r.transport_commutator);
      if (r.transport_k) k = std::max(k, *r.transport_k);
      ++c.samples;
    }
    c.constants = {{"c", worst, ce.transport}, {"commutator", comm, ce.commutator}};
    std::ostringstream note;
    note << inc.str() << "largest decay constant k = " << k << "; the ceiling on c is an empirical choice";
    c.note = note.str();
    settle(c, incomplete);
    out.push_back(c);
  }
  return out;
}

EnsembleResult certify(const EnsembleSpec& spec) {
  spec.validate();
  const GridPtr g = sphere::SphereGrid::create(spec.grid);
  EnsembleResult res;
  res.runs.resize(static_cast<std::size_t>(spec.runs));
  parallel_for(spec.runs, spec.workers, [&](int i) { res.runs[i] = run_member(spec, g, i); });
  for (const auto& r : res.runs) res.incomplete |= !r.ok;
  res.certificates = aggregate(spec, res.runs);
  return res;
}

}  // namespace nullfol::analysis
