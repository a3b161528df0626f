#include "nullfol/nullfol.h"

#include <cstring>
#include <exception>
#include <iostream>
#include <new>
#include <string>

#include "app/modes.hpp"
#include "errors.hpp"
#include "evolution/integrator.hpp"

struct nf_config {
  nullfol::app::RunConfig rc;
};
struct nf_grid {
  nullfol::sphere::GridPtr g;
};
struct nf_metric {
  std::unique_ptr<nullfol::geometry::MetricFamily> m;
};
struct nf_field {
  nullfol::sphere::ScalarField f;
};
struct nf_trajectory {
  nullfol::evolution::Trajectory t;
};

namespace {

thread_local std::string last_error;

template <class F>
int guarded(F&& fn) {
  try {
    fn();
    last_error.clear();
    return NF_OK;
  } catch (const nullfol::Error& e) {
    last_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return NF_ERR_INTERNAL;
}

int invalid(const char* what) {
  last_error = what;
  return NF_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* nf_version(void) { return "0.1.0"; }
const char* nf_last_error(void) { return last_error.c_str(); }

int nf_config_default(nf_config** out) {
  if (!out) return invalid("null output pointer");
  return guarded([&] { *out = new nf_config{}; });
}

int nf_config_load(const char* path, nf_config** out) {
  if (!path || !out) return invalid("null argument");
  return guarded([&] {
    auto rc = nullfol::app::RunConfig::from_config(nullfol::io::Config::load(path));
    *out = new nf_config{std::move(rc)};
  });
}

int nf_config_parse(const char* text, nf_config** out) {
  if (!text || !out) return invalid("null argument");
  return guarded([&] {
    auto rc = nullfol::app::RunConfig::from_config(nullfol::io::Config::parse(text));
    *out = new nf_config{std::move(rc)};
  });
}

int nf_config_set_mode(nf_config* cfg, const char* mode) {
  if (!cfg || !mode) return invalid("null argument");
  return guarded([&] {
    auto rc = cfg->rc;
    rc.mode = nullfol::app::parse_mode(mode);
    cfg->rc = std::move(rc);
  });
}

int nf_config_set(nf_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("null argument");
  return guarded([&] { cfg->rc.apply_override(key, value); });
}

int nf_config_set_string(nf_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return invalid("null argument");
  return guarded([&] {
    auto c = cfg->rc.to_config();
    c.set(key, nullfol::io::TomlValue{std::string(value)});
    cfg->rc = nullfol::app::RunConfig::from_config(c);
  });
}

int nf_config_set_seed(nf_config* cfg, uint64_t seed) {
  if (!cfg) return invalid("null config");
  return guarded([&] { cfg->rc.apply_seed(seed); });
}

int nf_config_add_sweep_param(nf_config* cfg, const char* spec) {
  if (!cfg || !spec) return invalid("null argument");
  return guarded([&] {
    nullfol::app::parse_axis(spec);
    cfg->rc.sweep_params.push_back(spec);
  });
}

int nf_config_to_toml(const nf_config* cfg, char* buf, size_t cap, size_t* needed) {
  if (!cfg) return invalid("null config");
  return guarded([&] {
    const std::string s = cfg->rc.to_toml();
    if (needed) *needed = s.size() + 1;
    if (buf && cap > 0) {
      const size_t n = std::min(cap - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

void nf_config_free(nf_config* cfg) { delete cfg; }

int nf_run(const nf_config* cfg, int* exit_code) {
  if (!cfg || !exit_code) return invalid("null argument");
  return guarded([&] {
    *exit_code = nullfol::app::run_mode(cfg->rc, std::cout);
  });
}

int nf_grid_create(int nlat, int nlon, int lmax, nf_grid** out) {
  if (!out) return invalid("null output pointer");
  if (nlat < 2 || nlon < 2 * nlat - 1 || lmax < 0 || lmax > nlat - 1)
    return invalid("grid needs nlon >= 2 nlat - 1 and 0 <= lmax < nlat");
  return guarded([&] { *out = new nf_grid{nullfol::sphere::SphereGrid::create({nlat, nlon, lmax})}; });
}

int nf_grid_size(const nf_grid* g, int* nodes, int* ncoeff) {
  if (!g) return invalid("null grid");
  if (nodes) *nodes = g->g->size();
  if (ncoeff) *ncoeff = g->g->ncoeff();
  return NF_OK;
}

void nf_grid_free(nf_grid* g) { delete g; }

int nf_field_constant(const nf_grid* g, double value, nf_field** out) {
  if (!g || !out) return invalid("null argument");
  return guarded([&] { *out = new nf_field{nullfol::sphere::ScalarField(g->g, value)}; });
}

int nf_field_from_coeffs(const nf_grid* g, const double* coeffs, int count, nf_field** out) {
  if (!g || !out || (!coeffs && count > 0)) return invalid("null argument");
  if (count < 0 || count > g->g->ncoeff()) return invalid("coefficient count outside [0, ncoeff]");
  return guarded([&] {
    *out = new nf_field{nullfol::sphere::ScalarField::from_coeffs(g->g, {coeffs, static_cast<size_t>(count)})};
  });
}

int nf_field_values(const nf_field* f, double* out, int cap) {
  if (!f || !out) return invalid("null argument");
  if (cap < f->f.size()) return invalid("buffer smaller than the node count");
  std::copy(f->f.values().begin(), f->f.values().end(), out);
  return NF_OK;
}

int nf_field_coeffs(const nf_field* f, double* out, int cap) {
  if (!f || !out) return invalid("null argument");
  return guarded([&] {
    const auto& c = f->f.coeffs();
    if (cap < static_cast<int>(c.size())) throw nullfol::Error(nullfol::ErrorCode::IoError, "buffer too small");
    std::copy(c.begin(), c.end(), out);
  });
}

void nf_field_free(nf_field* f) { delete f; }

int nf_metric_create(const nf_grid* g, double r0, double kappa, double epsilon, uint64_t profile_seed,
                     nf_metric** out) {
  if (!g || !out) return invalid("null argument");
  return guarded([&] {
    nullfol::geometry::SchwarzschildParams p{r0, kappa};
    nullfol::geometry::validate(p);
    auto profile = epsilon == 0.0 ? nullfol::geometry::PerturbationProfile::zero()
                                  : nullfol::geometry::PerturbationProfile::generate(epsilon, profile_seed);
    *out = new nf_metric{std::make_unique<nullfol::geometry::MetricFamily>(p, std::move(profile), g->g)};
  });
}

void nf_metric_free(nf_metric* m) { delete m; }

int nf_evolve(const nf_metric* m, const nf_field* f0, double s_end, double h0, double h_max,
              nf_trajectory** out) {
  if (!m || !f0 || !out) return invalid("null argument");
  return guarded([&] {
    nullfol::evolution::EvolutionConfig cfg;
    cfg.s_end = s_end;
    cfg.h0 = h0;
    cfg.h_max = h_max;
    const auto& p = m->m->params();
    cfg.validate(p.r0, p.kappa);
    *out = new nf_trajectory{nullfol::evolution::evolve(*m->m, f0->f, cfg)};
  });
}

int nf_trajectory_status(const nf_trajectory* t, int* status) {
  if (!t || !status) return invalid("null argument");
  *status = static_cast<int>(t->t.status);
  return NF_OK;
}

int nf_trajectory_rows(const nf_trajectory* t, int* rows) {
  if (!t || !rows) return invalid("null argument");
  *rows = static_cast<int>(t->t.rows.size());
  return NF_OK;
}

int nf_trajectory_row(const nf_trajectory* t, int i, double out[8]) {
  if (!t || !out) return invalid("null argument");
  if (i < 0 || i >= static_cast<int>(t->t.rows.size())) return invalid("row index out of range");
  const auto v = nullfol::evolution::ledger_values(t->t.rows[static_cast<size_t>(i)]);
  std::copy(v.begin(), v.end(), out);
  return NF_OK;
}

int nf_trajectory_final(const nf_trajectory* t, nf_field** out) {
  if (!t || !out) return invalid("null argument");
  return guarded([&] { *out = new nf_field{t->t.final_state.f}; });
}

void nf_trajectory_free(nf_trajectory* t) { delete t; }

}  // extern "C"
