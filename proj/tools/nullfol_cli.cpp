#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nullfol/nullfol.h"

namespace {

// ConfigError / IoError / bad arguments are usage problems; a foliation leaving
// the domain is reported like a boundary hit; any other numerical failure means
// the requested check could not be established.
int exit_for(int status) {
  switch (status) {
    case NF_ERR_CONFIG:
    case NF_ERR_IO:
    case NF_ERR_INVALID_ARGUMENT: return 1;
    case NF_ERR_OUT_OF_DOMAIN: return 2;
    default: return 3;
  }
}

int fail(int status) {
  std::fprintf(stderr, "error: %s\n", nf_last_error());
  return exit_for(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolve, perturb and certify null hypersurfaces in perturbed Schwarzschild spacetimes"};
  app.set_version_flag("--version", nf_version());
  std::string mode, config, out, epsilon;
  std::vector<std::string> params, sets;
  int workers = 0;
  std::uint64_t seed = 0;
  int runs = 0;
  app.add_option("mode", mode, "evolve | perturb | linearize | gronwall | validate-metric | certify | sweep")
      ->required()
      ->check(CLI::IsMember({"evolve", "perturb", "linearize", "gronwall", "validate-metric", "certify", "sweep"}));
  app.add_option("--config", config, "TOML run configuration");
  app.add_option("--out", out, "run directory (output.dir)");
  auto* w = app.add_option("--workers", workers, "parallel ensemble members, 0 for all cores")
                ->envname("NULLFOL_WORKERS")
                ->check(CLI::NonNegativeNumber);
  auto* sd = app.add_option("--seed", seed, "initial-data seed of single runs and of the ensemble");
  auto* ep = app.add_option("--epsilon", epsilon, "size of the metric perturbation")->check(CLI::NonNegativeNumber);
  auto* rn = app.add_option("--runs", runs, "ensemble members per sweep point")->check(CLI::PositiveNumber);
  app.add_option("--param", params, "sweep axis key=a:step:b (repeatable)");
  app.add_option("--set", sets, "config override key=value (repeatable)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  nf_config* cfg = nullptr;
  int st = config.empty() ? nf_config_default(&cfg) : nf_config_load(config.c_str(), &cfg);
  if (st != NF_OK) return fail(st);
  auto apply = [&]() -> int {
    int s = nf_config_set_mode(cfg, mode.c_str());
    for (const auto& kv : sets) {
      if (s != NF_OK) return s;
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
        return NF_ERR_INVALID_ARGUMENT;
      }
      s = nf_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    }
    if (s == NF_OK && !out.empty()) s = nf_config_set_string(cfg, "output.dir", out.c_str());
    if (s == NF_OK && w->count() + (std::getenv("NULLFOL_WORKERS") ? 1 : 0) > 0)
      s = nf_config_set(cfg, "workers", std::to_string(workers).c_str());
    if (s == NF_OK && sd->count() > 0) s = nf_config_set_seed(cfg, seed);
    if (s == NF_OK && ep->count() > 0) s = nf_config_set(cfg, "epsilon", epsilon.c_str());
    if (s == NF_OK && rn->count() > 0) s = nf_config_set(cfg, "runs", std::to_string(runs).c_str());
    for (const auto& p : params)
      if (s == NF_OK) s = nf_config_add_sweep_param(cfg, p.c_str());
    return s;
  };
  st = apply();
  if (st != NF_OK) {
    const int code = nf_last_error()[0] ? fail(st) : exit_for(st);
    nf_config_free(cfg);
    return code;
  }
  int code = 0;
  st = nf_run(cfg, &code);
  nf_config_free(cfg);
  if (st != NF_OK) return fail(st);
  return code;
}
