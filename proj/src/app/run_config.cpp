#include "app/run_config.hpp"

#include <cmath>

#include "errors.hpp"
#include "evolution/initial_data.hpp"
#include "io/csv.hpp"
#include "io/profile_io.hpp"

namespace nullfol::app {

using io::Config;
using io::TomlArray;
using io::TomlValue;

namespace {

constexpr const char* kModes[] = {"evolve", "perturb", "linearize", "gronwall", "validate-metric", "sweep", "certify"};

TomlValue num(double v) { return {v}; }
TomlValue integer(std::int64_t v) { return {v}; }
TomlValue str(std::string s) { return {std::move(s)}; }
TomlValue flag(bool b) { return {b}; }

TomlValue list(const std::vector<double>& v) {
  TomlArray a;
  for (double x : v) a.push_back({x});
  return {a};
}

TomlValue rows(const std::vector<std::vector<double>>& m) {
  TomlArray a;
  for (const auto& r : m) a.push_back(list(r));
  return {a};
}

int get_int(const Config& c, const std::string& k, int fallback) {
  const auto v = c.get_int(k, fallback);
  if (v < INT32_MIN || v > INT32_MAX) throw Error(ErrorCode::ConfigError, k + " out of range");
  return static_cast<int>(v);
}

std::uint64_t get_seed(const Config& c, const std::string& k, std::uint64_t fallback) {
  const auto v = c.get_int(k, static_cast<std::int64_t>(fallback));
  if (v < 0) throw Error(ErrorCode::ConfigError, k + " must be >= 0");
  return static_cast<std::uint64_t>(v);
}

void put_data(Config& c, const std::string& t, const DataSpec& d) {
  c.set(t + ".kind", str(d.kind));
  c.set(t + ".seed", integer(static_cast<std::int64_t>(d.seed)));
  c.set(t + ".band", integer(d.band));
  c.set(t + ".decay", num(d.decay));
  c.set(t + ".grad_budget", num(d.grad_budget));
  c.set(t + ".mean_budget", num(d.mean_budget));
  c.set(t + ".coeffs", rows(d.coeffs));
  c.set(t + ".value", num(d.value));
  c.set(t + ".path", str(d.path));
}

DataSpec get_data(const Config& c, const std::string& t, const DataSpec& def) {
  DataSpec d;
  d.kind = c.get_string(t + ".kind", def.kind);
  d.seed = get_seed(c, t + ".seed", def.seed);
  d.band = get_int(c, t + ".band", def.band);
  d.decay = c.get_double(t + ".decay", def.decay);
  d.grad_budget = c.get_double(t + ".grad_budget", def.grad_budget);
  d.mean_budget = c.get_double(t + ".mean_budget", def.mean_budget);
  d.coeffs = c.has(t + ".coeffs") ? c.get_matrix(t + ".coeffs") : def.coeffs;
  d.value = c.get_double(t + ".value", def.value);
  d.path = c.get_string(t + ".path", def.path);
  if (d.kind != "seed" && d.kind != "coeffs" && d.kind != "constant" && d.kind != "file")
    throw Error(ErrorCode::ConfigError, t + ".kind must be seed, coeffs, constant or file");
  for (const auto& r : d.coeffs)
    if (r.size() != 3) throw Error(ErrorCode::ConfigError, t + ".coeffs rows must be [l, m, value]");
  return d;
}

// every key the loader understands; anything else in a config is reported
bool known_key(const std::string& k) {
  static const char* prefixes[] = {"mode",        "workers",     "geometry.",   "grid.",  "profile.",
                                   "data.",       "perturbation.", "evolution.", "output.", "ensemble.",
                                   "gronwall.",   "validate.",   "sweep."};
  for (const char* p : prefixes) {
    const std::string ps(p);
    if (ps.back() == '.' ? k.rfind(ps, 0) == 0 : k == ps) return true;
  }
  return false;
}

}  // namespace

const char* to_string(Mode m) { return kModes[static_cast<int>(m)]; }

Mode parse_mode(const std::string& s) {
  for (int i = 0; i < 7; ++i)
    if (s == kModes[i]) return static_cast<Mode>(i);
  throw Error(ErrorCode::ConfigError, "unknown mode '" + s + "'");
}

RunConfig::RunConfig() {
  delta.seed = 8;
  delta.grad_budget = 0.001;
  ensemble.evolution = analysis::EnsembleSpec::default_evolution();
}

Config RunConfig::to_config() const {
  Config c;
  c.set("mode", str(to_string(mode)));
  c.set("workers", integer(workers));
  c.set("geometry.r0", num(geometry.r0));
  c.set("geometry.kappa", num(geometry.kappa));
  c.set("grid.nlat", integer(grid.nlat));
  c.set("grid.nlon", integer(grid.nlon));
  c.set("grid.lmax", integer(grid.lmax));

  c.set("profile.kind", str(profile.kind));
  if (profile.kind == "table") {
    io::put_profile(c, "profile", profile.table);
  } else {
    c.set("profile.epsilon", num(profile.epsilon));
    c.set("profile.seed", integer(static_cast<std::int64_t>(profile.seed)));
    c.set("profile.band", integer(profile.band));
    c.set("profile.powers", integer(profile.powers));
  }
  c.set("profile.amplitude", num(profile.amplitude));
  c.set("profile.adversarial_amplitude", num(profile.adversarial_amplitude));
  c.set("profile.path", str(profile.path));

  put_data(c, "data", data);
  put_data(c, "perturbation", delta);
  c.set("perturbation.variation", flag(variation));

  const auto& e = evolution;
  c.set("evolution.s_start", num(e.s_start));
  c.set("evolution.s_end", num(e.s_end));
  c.set("evolution.h0", num(e.h0));
  c.set("evolution.stretch", flag(e.stretch));
  c.set("evolution.h_max", num(e.h_max));
  c.set("evolution.n", integer(e.n));
  c.set("evolution.p", num(e.p));
  c.set("evolution.guard", num(e.guard));
  c.set("evolution.guard_armed", flag(e.guard_armed));
  c.set("evolution.tail_tol", num(e.tail_tol));
  c.set("evolution.null_monitor", flag(e.null_monitor));
  c.set("evolution.snapshots", list(e.snapshots));
  c.set("evolution.step_schedule", list(e.step_schedule));

  c.set("output.dir", str(output.dir));
  c.set("output.cadence", integer(output.cadence));
  c.set("output.fields", flag(output.fields));

  const auto& en = ensemble;
  c.set("ensemble.runs", integer(en.runs));
  c.set("ensemble.data_seed", integer(static_cast<std::int64_t>(en.data_seed)));
  c.set("ensemble.data_band", integer(en.data_band));
  c.set("ensemble.data_decay", num(en.data_decay));
  c.set("ensemble.delta_o", num(en.delta_o));
  c.set("ensemble.delta_m", num(en.delta_m));
  c.set("ensemble.dd_o", num(en.dd_o));
  c.set("ensemble.dd_m", num(en.dd_m));
  if (en.mean_fraction) c.set("ensemble.mean_fraction", num(*en.mean_fraction));
  c.set("ensemble.constants_only", flag(en.constants_only));
  c.set("ensemble.perturbation", flag(en.perturbation));
  c.set("ensemble.linearisation", flag(en.linearisation));
  c.set("ensemble.constant_partner_runs", integer(en.constant_partner_runs));
  c.set("ensemble.decomposition_runs", integer(en.decomposition_runs));
  c.set("ensemble.transport_runs", integer(en.transport_runs));
  c.set("ensemble.transport_k_max", num(en.transport_k_max));
  c.set("ensemble.rhs_fit_from", num(en.rhs_fit_from));
  c.set("ensemble.rhs_fit_to", num(en.rhs_fit_to));
  c.set("ensemble.s_end", num(en.evolution.s_end));
  c.set("ensemble.h0", num(en.evolution.h0));
  c.set("ensemble.h_max", num(en.evolution.h_max));
  c.set("ensemble.guard_armed", flag(en.evolution.guard_armed));
  const auto& ce = en.ceilings;
  c.set("ensemble.ceilings.grad_growth", num(ce.grad_growth));
  c.set("ensemble.ceilings.mean_mean", num(ce.mean_mean));
  c.set("ensemble.ceilings.mean_grad", num(ce.mean_grad));
  c.set("ensemble.ceilings.drift", num(ce.drift));
  c.set("ensemble.ceilings.rhs_exponent", num(ce.rhs_exponent));
  c.set("ensemble.ceilings.guard", num(ce.guard));
  c.set("ensemble.ceilings.pert_grad", num(ce.pert_grad));
  c.set("ensemble.ceilings.pert_mean", num(ce.pert_mean));
  c.set("ensemble.ceilings.pert_grad_mean", num(ce.pert_grad_mean));
  c.set("ensemble.ceilings.pert_mean_grad", num(ce.pert_mean_grad));
  c.set("ensemble.ceilings.pert_const", num(ce.pert_const));
  c.set("ensemble.ceilings.lin_error", num(ce.lin_error));
  c.set("ensemble.ceilings.lin_growth", num(ce.lin_growth));
  c.set("ensemble.ceilings.lin_mean_change", num(ce.lin_mean_change));
  c.set("ensemble.ceilings.transport", num(ce.transport));
  c.set("ensemble.ceilings.commutator", num(ce.commutator));

  const auto& t = gronwall.transport;
  c.set("gronwall.m", integer(t.m));
  c.set("gronwall.x_depth", integer(t.x_depth));
  c.set("gronwall.c_ceiling", num(t.c_ceiling));
  c.set("gronwall.k_max", num(t.k_max));
  c.set("gronwall.flow", flag(gronwall.flow));
  c.set("gronwall.lp", list(gronwall.lp));

  if (lattice) {
    c.set("validate.us", list(lattice->us));
    c.set("validate.s", list(lattice->s));
    c.set("validate.max_k", integer(lattice->max_k));
    c.set("validate.max_m", integer(lattice->max_m));
    c.set("validate.nlat", integer(lattice->grid.nlat));
    c.set("validate.nlon", integer(lattice->grid.nlon));
    c.set("validate.lmax", integer(lattice->grid.lmax));
  }
  TomlArray sp;
  for (const auto& s : sweep_params) sp.push_back(str(s));
  c.set("sweep.params", {sp});
  return c;
}

RunConfig RunConfig::from_config(const Config& c) {
  for (const auto& k : c.keys())
    if (!known_key(k)) throw Error(ErrorCode::ConfigError, "unknown key '" + k + "'");
  RunConfig rc;
  const RunConfig def;
  rc.mode = parse_mode(c.get_string("mode", to_string(def.mode)));
  rc.workers = get_int(c, "workers", def.workers);
  rc.geometry.r0 = c.get_double("geometry.r0", def.geometry.r0);
  rc.geometry.kappa = c.get_double("geometry.kappa", def.geometry.kappa);
  rc.grid.nlat = get_int(c, "grid.nlat", def.grid.nlat);
  rc.grid.nlon = get_int(c, "grid.nlon", def.grid.nlon);
  rc.grid.lmax = get_int(c, "grid.lmax", def.grid.lmax);

  auto& p = rc.profile;
  p.kind = c.get_string("profile.kind", def.profile.kind);
  if (p.kind != "zero" && p.kind != "random" && p.kind != "adversarial" && p.kind != "table" && p.kind != "file")
    throw Error(ErrorCode::ConfigError, "profile.kind must be zero, random, adversarial, table or file");
  p.epsilon = c.get_double("profile.epsilon", def.profile.epsilon);
  p.seed = get_seed(c, "profile.seed", def.profile.seed);
  p.band = get_int(c, "profile.band", def.profile.band);
  p.powers = get_int(c, "profile.powers", def.profile.powers);
  p.amplitude = c.get_double("profile.amplitude", def.profile.amplitude);
  p.adversarial_amplitude = c.get_double("profile.adversarial_amplitude", def.profile.adversarial_amplitude);
  p.path = c.get_string("profile.path", def.profile.path);
  if (p.kind == "table") p.table = io::get_profile(c, "profile");

  rc.data = get_data(c, "data", def.data);
  rc.delta = get_data(c, "perturbation", def.delta);
  rc.variation = c.get_bool("perturbation.variation", def.variation);

  auto& e = rc.evolution;
  const auto& de = def.evolution;
  e.s_start = c.get_double("evolution.s_start", de.s_start);
  e.s_end = c.get_double("evolution.s_end", de.s_end);
  e.h0 = c.get_double("evolution.h0", de.h0);
  e.stretch = c.get_bool("evolution.stretch", de.stretch);
  e.h_max = c.get_double("evolution.h_max", de.h_max);
  e.n = get_int(c, "evolution.n", de.n);
  e.p = c.get_double("evolution.p", de.p);
  e.guard = c.get_double("evolution.guard", de.guard);
  e.guard_armed = c.get_bool("evolution.guard_armed", de.guard_armed);
  e.tail_tol = c.get_double("evolution.tail_tol", de.tail_tol);
  e.null_monitor = c.get_bool("evolution.null_monitor", de.null_monitor);
  e.snapshots = c.get_doubles("evolution.snapshots");
  e.step_schedule = c.get_doubles("evolution.step_schedule");

  rc.output.dir = c.get_string("output.dir", def.output.dir);
  rc.output.cadence = get_int(c, "output.cadence", def.output.cadence);
  rc.output.fields = c.get_bool("output.fields", def.output.fields);

  auto& en = rc.ensemble;
  const auto& den = def.ensemble;
  en.runs = get_int(c, "ensemble.runs", den.runs);
  en.data_seed = get_seed(c, "ensemble.data_seed", den.data_seed);
  en.data_band = get_int(c, "ensemble.data_band", den.data_band);
  en.data_decay = c.get_double("ensemble.data_decay", den.data_decay);
  en.delta_o = c.get_double("ensemble.delta_o", den.delta_o);
  en.delta_m = c.get_double("ensemble.delta_m", den.delta_m);
  en.dd_o = c.get_double("ensemble.dd_o", den.dd_o);
  en.dd_m = c.get_double("ensemble.dd_m", den.dd_m);
  if (c.has("ensemble.mean_fraction")) en.mean_fraction = c.get_double("ensemble.mean_fraction", 0.0);
  en.constants_only = c.get_bool("ensemble.constants_only", den.constants_only);
  en.perturbation = c.get_bool("ensemble.perturbation", den.perturbation);
  en.linearisation = c.get_bool("ensemble.linearisation", den.linearisation);
  en.constant_partner_runs = get_int(c, "ensemble.constant_partner_runs", den.constant_partner_runs);
  en.decomposition_runs = get_int(c, "ensemble.decomposition_runs", den.decomposition_runs);
  en.transport_runs = get_int(c, "ensemble.transport_runs", den.transport_runs);
  en.transport_k_max = c.get_double("ensemble.transport_k_max", den.transport_k_max);
  en.rhs_fit_from = c.get_double("ensemble.rhs_fit_from", den.rhs_fit_from);
  en.rhs_fit_to = c.get_double("ensemble.rhs_fit_to", den.rhs_fit_to);
  en.evolution.s_end = c.get_double("ensemble.s_end", den.evolution.s_end);
  en.evolution.h0 = c.get_double("ensemble.h0", den.evolution.h0);
  en.evolution.h_max = c.get_double("ensemble.h_max", den.evolution.h_max);
  en.evolution.guard_armed = c.get_bool("ensemble.guard_armed", den.evolution.guard_armed);
  auto& ce = en.ceilings;
  const auto& dc = den.ceilings;
  ce.grad_growth = c.get_double("ensemble.ceilings.grad_growth", dc.grad_growth);
  ce.mean_mean = c.get_double("ensemble.ceilings.mean_mean", dc.mean_mean);
  ce.mean_grad = c.get_double("ensemble.ceilings.mean_grad", dc.mean_grad);
  ce.drift = c.get_double("ensemble.ceilings.drift", dc.drift);
  ce.rhs_exponent = c.get_double("ensemble.ceilings.rhs_exponent", dc.rhs_exponent);
  ce.guard = c.get_double("ensemble.ceilings.guard", dc.guard);
  ce.pert_grad = c.get_double("ensemble.ceilings.pert_grad", dc.pert_grad);
  ce.pert_mean = c.get_double("ensemble.ceilings.pert_mean", dc.pert_mean);
  ce.pert_grad_mean = c.get_double("ensemble.ceilings.pert_grad_mean", dc.pert_grad_mean);
  ce.pert_mean_grad = c.get_double("ensemble.ceilings.pert_mean_grad", dc.pert_mean_grad);
  ce.pert_const = c.get_double("ensemble.ceilings.pert_const", dc.pert_const);
  ce.lin_error = c.get_double("ensemble.ceilings.lin_error", dc.lin_error);
  ce.lin_growth = c.get_double("ensemble.ceilings.lin_growth", dc.lin_growth);
  ce.lin_mean_change = c.get_double("ensemble.ceilings.lin_mean_change", dc.lin_mean_change);
  ce.transport = c.get_double("ensemble.ceilings.transport", dc.transport);
  ce.commutator = c.get_double("ensemble.ceilings.commutator", dc.commutator);

  auto& t = rc.gronwall.transport;
  t.m = get_int(c, "gronwall.m", def.gronwall.transport.m);
  t.x_depth = get_int(c, "gronwall.x_depth", def.gronwall.transport.x_depth);
  t.c_ceiling = c.get_double("gronwall.c_ceiling", def.gronwall.transport.c_ceiling);
  t.k_max = c.get_double("gronwall.k_max", def.gronwall.transport.k_max);
  rc.gronwall.flow = c.get_bool("gronwall.flow", def.gronwall.flow);
  if (c.has("gronwall.lp")) rc.gronwall.lp = c.get_doubles("gronwall.lp");

  if (c.has("validate.us") || c.has("validate.s")) {
    auto l = geometry::SampleSpec::defaults(rc.geometry, rc.evolution.n);
    if (c.has("validate.us")) l.us = c.get_doubles("validate.us");
    if (c.has("validate.s")) l.s = c.get_doubles("validate.s");
    l.max_k = get_int(c, "validate.max_k", l.max_k);
    l.max_m = get_int(c, "validate.max_m", l.max_m);
    l.grid.nlat = get_int(c, "validate.nlat", l.grid.nlat);
    l.grid.nlon = get_int(c, "validate.nlon", l.grid.nlon);
    l.grid.lmax = get_int(c, "validate.lmax", l.grid.lmax);
    rc.lattice = l;
  }
  if (c.has("sweep.params")) {
    const auto it = c.values().find("sweep.params");
    const auto* arr = std::get_if<TomlArray>(&it->second.v);
    if (!arr) throw Error(ErrorCode::ConfigError, "sweep.params must be an array of strings");
    for (const auto& v : *arr) {
      const auto* s = std::get_if<std::string>(&v.v);
      if (!s) throw Error(ErrorCode::ConfigError, "sweep.params must be an array of strings");
      rc.sweep_params.push_back(*s);
    }
  }
  return rc;
}

void RunConfig::validate() const {
  geometry::validate(geometry);
  if (grid.nlat < 4 || grid.nlon < 2 * grid.nlat - 1 || grid.lmax < 1 || grid.lmax > grid.nlat - 1)
    throw Error(ErrorCode::ConfigError, "grid needs nlat >= 4, nlon >= 2 nlat - 1 and 1 <= lmax < nlat");
  if (output.cadence < 1) throw Error(ErrorCode::ConfigError, "output.cadence must be >= 1");
  if (workers < 0) throw Error(ErrorCode::ConfigError, "workers must be >= 0");
  if (profile.kind == "file" && profile.path.empty())
    throw Error(ErrorCode::ConfigError, "profile.kind = file needs profile.path");
  if (!(profile.epsilon >= 0.0)) throw Error(ErrorCode::ConfigError, "profile.epsilon must be >= 0");
  for (const auto* d : {&data, &delta}) {
    if (d->kind == "file" && d->path.empty()) throw Error(ErrorCode::ConfigError, "data kind = file needs a path");
    if (d->kind == "seed" && (d->band < 1 || d->band > grid.lmax))
      throw Error(ErrorCode::ConfigError, "data band must lie in [1, lmax]");
  }
  if (mode != Mode::Certify && mode != Mode::Sweep) evolution.validate(geometry.r0, geometry.kappa);
  if (mode == Mode::Certify || mode == Mode::Sweep) ensemble_spec().validate();
}

void RunConfig::apply_seed(std::uint64_t seed) {
  data.seed = seed;
  delta.seed = seed + 1;
  ensemble.data_seed = seed;
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
  static const std::pair<const char*, const char*> aliases[] = {
      {"epsilon", "profile.epsilon"},   {"delta_o", "ensemble.delta_o"}, {"delta_m", "ensemble.delta_m"},
      {"dd_o", "ensemble.dd_o"},        {"dd_m", "ensemble.dd_m"},       {"runs", "ensemble.runs"},
      {"seed", "ensemble.data_seed"}};
  std::string full = key;
  for (const auto& [a, k] : aliases)
    if (key == a) full = k;
  Config c = to_config();
  c.set_from_string(full, value);
  *this = from_config(c);
}

analysis::EnsembleSpec RunConfig::ensemble_spec() const {
  analysis::EnsembleSpec s = ensemble;
  s.params = geometry;
  s.grid = grid;
  s.epsilon = profile.epsilon;
  s.profile_seed = profile.seed;
  const auto keep = s.evolution;
  s.evolution = evolution;
  s.evolution.s_start = 0.0;
  s.evolution.s_end = keep.s_end;
  s.evolution.h0 = keep.h0;
  s.evolution.h_max = keep.h_max;
  s.evolution.guard_armed = keep.guard_armed;
  s.evolution.snapshots.clear();
  s.evolution.step_schedule.clear();
  s.workers = workers;
  return s;
}

geometry::PerturbationProfile build_profile(const RunConfig& rc) {
  const auto& p = rc.profile;
  if (p.kind == "zero") return geometry::PerturbationProfile::zero();
  if (p.kind == "table") return p.table;
  if (p.kind == "file") return io::load_profile(p.path);
  if (p.kind == "adversarial") return geometry::PerturbationProfile::adversarial(p.epsilon, p.adversarial_amplitude);
  if (p.epsilon == 0.0) return geometry::PerturbationProfile::zero();
  return geometry::PerturbationProfile::generate(p.epsilon, p.seed, p.band, p.powers, p.amplitude);
}

sphere::ScalarField build_data(const DataSpec& d, const sphere::GridPtr& g, double r0, int depth, double p) {
  if (d.kind == "constant") return sphere::ScalarField(g, d.value);
  if (d.kind == "file") return io::read_field_coeffs(d.path, g);
  if (d.kind == "coeffs") {
    std::vector<double> c(static_cast<std::size_t>(g->ncoeff()), 0.0);
    for (const auto& r : d.coeffs) {
      const int l = static_cast<int>(r[0]), m = static_cast<int>(r[1]);
      if (l != r[0] || m != r[1] || l < 0 || l > g->lmax() || std::abs(m) > l)
        throw Error(ErrorCode::ConfigError, "coefficient row with bad (l, m)");
      c[static_cast<std::size_t>(l * l + l + m)] = r[2];
    }
    return sphere::ScalarField::from_coeffs(g, c);
  }
  return evolution::make_initial_data(g, d.seed, d.band, d.grad_budget * r0, d.mean_budget * r0, depth, p, d.decay);
}

}  // namespace nullfol::app
