#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "errors.hpp"
#include "app/artifacts.hpp"
#include "app/modes.hpp"
#include "app/run_config.hpp"

using namespace nullfol;
using namespace nullfol::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nullfol_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_config(Mode mode, const fs::path& out) {
  RunConfig rc;
  rc.mode = mode;
  rc.grid = {24, 48, 15};
  rc.profile.epsilon = 0.01;
  rc.evolution.s_end = 2.0;
  rc.evolution.h0 = 0.25;
  rc.ensemble.runs = 2;
  rc.ensemble.evolution.s_end = 2.0;
  rc.ensemble.evolution.h0 = 0.5;
  rc.ensemble.rhs_fit_to = 2.0;
  rc.ensemble.constant_partner_runs = 1;
  rc.ensemble.transport_runs = 1;
  rc.output.dir = out.string();
  return rc;
}

void same_certificates(const std::vector<analysis::Certificate>& a, const std::vector<analysis::Certificate>& b) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].status == b[i].status);
    CHECK(a[i].samples == b[i].samples);
    REQUIRE(a[i].constants.size() == b[i].constants.size());
    for (std::size_t k = 0; k < a[i].constants.size(); ++k) {
      const double x = a[i].constants[k].value, y = b[i].constants[k].value;
      CHECK((x == y || (std::isnan(x) && std::isnan(y))));
    }
  }
}

}  // namespace

TEST_CASE("run config round trip") {
  RunConfig rc;
  CHECK(RunConfig::from_config(rc.to_config()).to_toml() == rc.to_toml());

  rc.mode = Mode::Sweep;
  rc.profile.kind = "table";
  rc.profile.table = geometry::PerturbationProfile::generate(0.02, 9, 2, 2);
  rc.profile.epsilon = 0.02;
  rc.data.kind = "coeffs";
  rc.data.coeffs = {{1, 0, 0.01}, {2, -1, 1.0 / 3.0}};
  rc.delta.kind = "constant";
  rc.delta.value = 1e-3;
  rc.evolution.snapshots = {1.0, 2.5};
  rc.evolution.p = 3.0;
  rc.ensemble.mean_fraction = -0.75;
  rc.ensemble.ceilings.guard = 5.5;
  rc.lattice = geometry::SampleSpec::defaults(rc.geometry);
  rc.sweep_params = {"epsilon=0:0.005:0.02", "delta_o=0.01,0.02"};
  rc.workers = 4;
  const std::string text = rc.to_toml();
  const RunConfig back = RunConfig::from_config(io::Config::parse(text));
  CHECK(back.to_toml() == text);
  CHECK(back.mode == Mode::Sweep);
  CHECK(back.data.coeffs[1][2] == 1.0 / 3.0);
  CHECK(back.profile.table.channel(3) == rc.profile.table.channel(3));
  CHECK(back.ensemble.mean_fraction.value() == -0.75);
  CHECK(back.lattice->s == rc.lattice->s);
  CHECK(back.sweep_params == rc.sweep_params);

  CHECK_THROWS_AS(RunConfig::from_config(io::Config::parse("grid.nlat = 4.5\n")), Error);
  CHECK_THROWS_AS(RunConfig::from_config(io::Config::parse("[gird]\nnlat = 4\n")), Error);
  CHECK_THROWS_AS(RunConfig::from_config(io::Config::parse("mode = \"fly\"\n")), Error);

  RunConfig o;
  o.apply_override("epsilon", "0.125");
  o.apply_override("evolution.h0", "0.3");
  o.apply_override("output.dir", "some/where");
  CHECK(o.profile.epsilon == 0.125);
  CHECK(o.evolution.h0 == 0.3);
  CHECK(o.output.dir == "some/where");
  CHECK_THROWS_AS(o.apply_override("grid.nlat", "many"), Error);
}

TEST_CASE("sweep axes") {
  auto a = parse_axis("epsilon=0.0:0.005:0.02");
  CHECK(a.key == "epsilon");
  REQUIRE(a.values.size() == 5);
  CHECK(a.values.front() == 0.0);
  CHECK(a.values.back() == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(parse_axis("dd_o=0.3:0.1:0.1").values.empty());
  CHECK(parse_axis("runs=3").values == std::vector<double>{3});
  CHECK(parse_axis("delta_m=0.1,0.2").values == std::vector<double>{0.1, 0.2});
  CHECK_THROWS_AS(parse_axis("epsilon"), Error);
  CHECK_THROWS_AS(parse_axis("epsilon=0:0:1"), Error);
  CHECK_THROWS_AS(parse_axis("epsilon=0:1"), Error);
}

TEST_CASE("run records reload exactly and aggregate identically") {
  const auto dir = scratch("records");
  const RunConfig rc = small_config(Mode::Certify, dir);
  const auto spec = rc.ensemble_spec();
  const auto res = analysis::certify(spec);
  REQUIRE_FALSE(res.incomplete);
  std::vector<analysis::RunRecord> loaded;
  for (const auto& r : res.runs) {
    const auto d = dir / std::to_string(r.index);
    write_run_record(d, r);
    loaded.push_back(load_run_record(d));
  }
  const auto& a = res.runs[0];
  const auto& b = loaded[0];
  CHECK(b.foliations.size() == a.foliations.size());
  CHECK(b.foliations[1].back().grad_norm == a.foliations[1].back().grad_norm);
  CHECK(b.pert_free.back().delta_mean == a.pert_free.back().delta_mean);
  CHECK(b.partner.size() == a.partner.size());
  CHECK(b.transport_c == a.transport_c);
  CHECK(b.budgets.dd_o_n1 == a.budgets.dd_o_n1);
  CHECK(b.statuses == a.statuses);
  same_certificates(analysis::aggregate(spec, loaded), res.certificates);

  // certify mode writes runs/NNN and recomputes the certificates from them
  std::ostringstream log;
  CHECK(run_mode(rc, log) == (res.all_pass() ? kSuccess : kCheckFailed));
  CHECK(fs::exists(dir / "runs" / "001" / "perturbation_free.csv"));
  CHECK(fs::exists(dir / "certificates.txt"));
  const auto cj = read_json(dir / "certificates.json");
  REQUIRE(cj["certificates"].size() == res.certificates.size());
  for (std::size_t i = 0; i < res.certificates.size(); ++i)
    for (std::size_t k = 0; k < res.certificates[i].constants.size(); ++k)
      CHECK(from_jnum(cj["certificates"][i]["constants"][k]["value"]) == res.certificates[i].constants[k].value);
  fs::remove_all(dir);
}

TEST_CASE("sweep deduplicates, resumes and accepts an empty grid") {
  const auto dir = scratch("sweep");
  RunConfig rc = small_config(Mode::Sweep, dir);
  rc.ensemble.linearisation = false;
  rc.ensemble.constant_partner_runs = 0;
  rc.ensemble.decomposition_runs = 0;
  rc.ensemble.transport_runs = 0;
  std::ostringstream log;

  rc.sweep_params = {"epsilon=0.3:0.1:0.1"};
  auto sr = run_sweep(rc, log);
  CHECK(sr.points == 0);
  CHECK(sr.cells == 0);
  CHECK(sr.all_pass);
  CHECK(read_json(dir / "certificates.json")["points"].empty());

  // two identical points share their cells
  rc.sweep_params = {"epsilon=0.01,0.01"};
  sr = run_sweep(rc, log);
  CHECK(sr.points == 2);
  CHECK(sr.cells == 2);
  CHECK(sr.executed == 2);
  const auto first = read_json(dir / "certificates.json");
  CHECK(first["points"][0]["result"]["certificates"] == first["points"][1]["result"]["certificates"]);

  // a killed sweep leaves a partial directory and misses a cell
  const auto cells = dir / "cells";
  std::vector<fs::path> done;
  for (const auto& e : fs::directory_iterator(cells)) done.push_back(e.path());
  REQUIRE(done.size() == 2);
  fs::rename(done[0], fs::path(done[0].string() + ".partial"));
  fs::remove(done[0].string() + ".partial/cell.toml");
  sr = run_sweep(rc, log);
  CHECK(sr.executed == 1);
  CHECK(read_json(dir / "certificates.json") == first);
  sr = run_sweep(rc, log);
  CHECK(sr.executed == 0);
  fs::remove_all(dir);
}

TEST_CASE("single-run modes write byte-identical ledgers") {
  const auto d1 = scratch("det1"), d2 = scratch("det2");
  for (Mode m : {Mode::Evolve, Mode::Linearize}) {
    RunConfig a = small_config(m, d1), b = small_config(m, d2);
    std::ostringstream log;
    CHECK(run_mode(a, log) == kSuccess);
    CHECK(run_mode(b, log) == kSuccess);
    for (const char* f : {"ledger.csv", "ledger_f2.csv", "perturbation.csv"}) {
      if (!fs::exists(d1 / f)) continue;
      CHECK(read_text(d1 / f) == read_text(d2 / f));
    }
    CHECK(fs::exists(d1 / "fields" / "index.csv"));
    const auto resolved = io::Config::load(d1 / "config.resolved.toml");
    CHECK(RunConfig::from_config(resolved).to_toml() == a.to_toml());
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("constant data evolves with flat norms") {
  const auto dir = scratch("const");
  RunConfig rc = small_config(Mode::Evolve, dir);
  rc.data.kind = "constant";
  rc.data.value = 0.05;
  std::ostringstream log;
  CHECK(run_mode(rc, log) == kSuccess);
  const auto rows = read_ledger(dir / "ledger.csv");
  REQUIRE(rows.size() > 2);
  for (const auto& r : rows) {
    CHECK(r.mean_f == 0.05);
    CHECK(r.grad_norm == 0.0);
    CHECK(r.rhs_sup == 0.0);
  }
  fs::remove_all(dir);
}

TEST_CASE("adversarial profile fails validation") {
  const auto dir = scratch("validate");
  RunConfig rc = small_config(Mode::ValidateMetric, dir);
  rc.profile.kind = "adversarial";
  rc.profile.epsilon = 10.0;
  std::ostringstream log;
  CHECK(run_mode(rc, log) == kCheckFailed);
  const auto s = read_json(dir / "summary.json");
  CHECK(s["worst"] == "log_omega k=0 m=0");
  CHECK(log.str().find("violated log_omega") != std::string::npos);
  fs::remove_all(dir);
}
