#include <cmath>
#include <cstring>
#include <fstream>
#include <filesystem>
#include <limits>
#include <random>

#include "doctest.h"
#include "errors.hpp"
#include "helpers.hpp"
#include "io/csv.hpp"
#include "io/profile_io.hpp"
#include "io/toml.hpp"

using namespace nullfol;
using namespace nullfol::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("nullfol_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  for (int i = 0; i < 20000; ++i) {
    const std::uint64_t b = bits(rng);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    const double back = parse_double(format_double(v));
    REQUIRE(std::memcmp(&back, &v, sizeof v) == 0);
    ++checked;
  }
  CHECK(checked > 19000);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(100.0) == "100");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(std::isnan(parse_double("nan")));
  CHECK_THROWS_AS(parse_double("1.5x"), Error);
}

TEST_CASE("csv quoting and reload") {
  const auto dir = scratch("csv");
  CsvTable t{{"name", "note", "x"}, {{"a", "plain", "1"}, {"b,c", "say \"hi\"", "2.5"}, {"d", "two\nlines", "-inf"}}};
  write_csv(dir / "t.csv", t);
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  const auto x = back.numeric_column("x");
  CHECK(x[1] == 2.5);
  CHECK(std::isinf(x[2]));
  CHECK(back.column("missing") == -1);
  CHECK_THROWS_AS(back.numeric_column("missing"), Error);

  {
    std::ofstream os(dir / "bad.csv");
    os << "a,b\n1,2,3\n";
  }
  CHECK_THROWS_AS(read_csv(dir / "bad.csv"), Error);
  fs::remove_all(dir);
}

TEST_CASE("toml subset parsing") {
  const std::string text = R"(# leading comment
mode = "certify"   # trailing comment
workers = 3
[geometry]
r0 = 1.5
kappa = 5e-1
[ensemble.ceilings]
grad_growth = 2
flag = true
name = 'lit\eral'
esc = "a\"b\\c"
v = [1, 2.5,
     -3e2]   # spans lines
m = [[1, 2], [3]]
big = 1_000
neg = -inf
)";
  const auto c = Config::parse(text);
  CHECK(c.get_string("mode", "") == "certify");
  CHECK(c.get_int("workers", 0) == 3);
  CHECK(c.get_double("geometry.r0", 0) == 1.5);
  CHECK(c.get_double("geometry.kappa", 0) == 0.5);
  CHECK(c.get_double("ensemble.ceilings.grad_growth", 0) == 2.0);
  CHECK(c.get_bool("ensemble.ceilings.flag", false));
  CHECK(c.get_string("ensemble.ceilings.name", "") == "lit\\eral");
  CHECK(c.get_string("ensemble.ceilings.esc", "") == "a\"b\\c");
  CHECK(c.get_doubles("ensemble.ceilings.v") == std::vector<double>{1, 2.5, -300});
  CHECK(c.get_matrix("ensemble.ceilings.m") == std::vector<std::vector<double>>{{1, 2}, {3}});
  CHECK(c.get_int("ensemble.ceilings.big", 0) == 1000);
  CHECK(std::isinf(c.get_double("ensemble.ceilings.neg", 0)));
  CHECK(c.get_double("absent", 7.0) == 7.0);
  CHECK_THROWS_AS(c.get_int("geometry.r0", 0), Error);
  CHECK_THROWS_AS(c.get_bool("workers", false), Error);

  // serialised form parses back to the same values and the same text
  const auto again = Config::parse(c.to_toml());
  CHECK(again.to_toml() == c.to_toml());
  CHECK(again.get_doubles("ensemble.ceilings.v") == c.get_doubles("ensemble.ceilings.v"));

  auto line_of = [](const std::string& bad) {
    try {
      Config::parse(bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(line_of("a = 1\nb = \n").find("line 2") != std::string::npos);
  CHECK(line_of("a = 1\n\n[t\n").find("line 3") != std::string::npos);
  CHECK(line_of("a = 1\na = 2\n").find("duplicate") != std::string::npos);
  CHECK(line_of("a = \"open\n").find("line 1") != std::string::npos);
  CHECK(line_of("a = [1, 2\n").find("line") != std::string::npos);
}

TEST_CASE("doubles keep their type through toml") {
  Config c;
  c.set("a", {100.0});
  c.set("b", {std::int64_t{100}});
  c.set("c", {-0.0});
  c.set("d", {1e-300});
  const auto back = Config::parse(c.to_toml());
  CHECK(std::holds_alternative<double>(back.values().at("a").v));
  CHECK(std::holds_alternative<std::int64_t>(back.values().at("b").v));
  CHECK(std::signbit(back.get_double("c", 0)));
  CHECK(back.get_double("d", 0) == 1e-300);
}

TEST_CASE("profile serialisation is lossless") {
  const auto dir = scratch("profile");
  const auto p = geometry::PerturbationProfile::generate(0.01, 42);
  save_profile(dir / "p.toml", p);
  const auto q = load_profile(dir / "p.toml");
  CHECK(q.epsilon == p.epsilon);
  CHECK(q.seed == p.seed);
  CHECK(q.band == p.band);
  CHECK(q.powers == p.powers);
  for (int c = 0; c < p.channel_count(); ++c) CHECK(q.channel(c) == p.channel(c));

  // absent channels are zero, oversize rows are rejected
  const auto z = get_profile(Config::parse("[profile]\nepsilon = 0.5\nband = 1\npowers = 1\nomega = [[0.25]]\n"), "profile");
  CHECK(z.omega[0] == std::vector<double>{0.25, 0, 0, 0});
  CHECK(z.g_curl[0] == std::vector<double>(4, 0.0));
  CHECK_THROWS_AS(get_profile(Config::parse("[profile]\nband = 0\nomega = [[1, 2]]\n"), "profile"), Error);
  fs::remove_all(dir);
}

TEST_CASE("field coefficient tables") {
  const auto dir = scratch("fields");
  const auto g = sphere::SphereGrid::create({24, 48, 15});
  const auto f = testutil::random_field(g, 8, 5);
  write_field_coeffs(dir / "f.coeffs.csv", f, 15);
  write_field_values(dir / "f.values.csv", f);
  const auto back = read_field_coeffs(dir / "f.coeffs.csv", g);
  double err = 0;
  for (int i = 0; i < g->size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
  CHECK(err < 1e-13);
  const auto vals = read_csv(dir / "f.values.csv");
  CHECK(static_cast<int>(vals.rows.size()) == g->size());
  CHECK(parse_double(vals.rows[5][2]) == f[5]);
  fs::remove_all(dir);
}
