#include "io/profile_io.hpp"

#include <cmath>

#include "errors.hpp"
#include "io/csv.hpp"
#include "sphere/legendre.hpp"

namespace nullfol::io {

namespace {

std::string key(const std::string& prefix, const char* name) {
  return prefix.empty() ? std::string(name) : prefix + "." + name;
}

}  // namespace

void put_profile(Config& cfg, const std::string& prefix, const geometry::PerturbationProfile& p) {
  cfg.set(key(prefix, "epsilon"), {p.epsilon});
  cfg.set(key(prefix, "seed"), {static_cast<std::int64_t>(p.seed)});
  cfg.set(key(prefix, "band"), {static_cast<std::int64_t>(p.band)});
  cfg.set(key(prefix, "powers"), {static_cast<std::int64_t>(p.powers)});
  for (int c = 0; c < p.channel_count(); ++c) {
    TomlArray rows;
    for (const auto& row : p.channel(c)) {
      TomlArray vals;
      for (double v : row) vals.push_back({v});
      rows.push_back({vals});
    }
    cfg.set(key(prefix, geometry::PerturbationProfile::channel_name(c)), {rows});
  }
}

geometry::PerturbationProfile get_profile(const Config& cfg, const std::string& prefix) {
  geometry::PerturbationProfile p;
  p.epsilon = cfg.get_double(key(prefix, "epsilon"), 0.0);
  p.seed = static_cast<std::uint64_t>(cfg.get_int(key(prefix, "seed"), 0));
  p.band = static_cast<int>(cfg.get_int(key(prefix, "band"), 0));
  p.powers = static_cast<int>(cfg.get_int(key(prefix, "powers"), 1));
  if (p.band < 0 || p.powers < 1) throw Error(ErrorCode::ConfigError, "profile band/powers out of range");
  const std::size_t nc = static_cast<std::size_t>(sphere::coeff_count(p.band));
  for (int c = 0; c < p.channel_count(); ++c) {
    auto rows = cfg.get_matrix(key(prefix, geometry::PerturbationProfile::channel_name(c)));
    // absent channels and short rows are zero
    rows.resize(static_cast<std::size_t>(p.powers));
    for (auto& r : rows) {
      if (r.size() > nc)
        throw Error(ErrorCode::ConfigError, std::string("profile channel ") +
                                                geometry::PerturbationProfile::channel_name(c) +
                                                " has more coefficients than the band allows");
      r.resize(nc, 0.0);
    }
    p.channel(c) = std::move(rows);
  }
  try {
    p.check();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, e.what());
  }
  return p;
}

void save_profile(const std::filesystem::path& path, const geometry::PerturbationProfile& p) {
  Config cfg;
  put_profile(cfg, "profile", p);
  cfg.save(path);
}

geometry::PerturbationProfile load_profile(const std::filesystem::path& path) {
  return get_profile(Config::load(path), "profile");
}

void write_field_values(const std::filesystem::path& path, const sphere::ScalarField& f) {
  const auto& g = *f.grid();
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(g.size()));
  for (int j = 0; j < g.nlat(); ++j)
    for (int k = 0; k < g.nlon(); ++k) rows.push_back({g.theta(j), g.phi(k), f[j * g.nlon() + k]});
  write_csv(path, {"theta", "phi", "value"}, rows);
}

void write_field_coeffs(const std::filesystem::path& path, const sphere::ScalarField& f, int band) {
  const auto& c = f.coeffs();
  std::vector<std::vector<double>> rows;
  for (int l = 0; l <= band; ++l)
    for (int m = -l; m <= l; ++m) rows.push_back({double(l), double(m), c[l * l + l + m]});
  write_csv(path, {"l", "m", "coeff"}, rows);
}

sphere::ScalarField read_field_coeffs(const std::filesystem::path& path, const sphere::GridPtr& grid) {
  const auto t = read_csv(path);
  const auto l = t.numeric_column("l"), m = t.numeric_column("m"), v = t.numeric_column("coeff");
  std::vector<double> c(static_cast<std::size_t>(grid->ncoeff()), 0.0);
  for (std::size_t i = 0; i < l.size(); ++i) {
    const int li = static_cast<int>(l[i]), mi = static_cast<int>(m[i]);
    if (li < 0 || li > grid->lmax() || std::abs(mi) > li || li != l[i] || mi != m[i])
      throw Error(ErrorCode::ConfigError, path.string() + ": bad (l, m) in row " + std::to_string(i + 2));
    c[static_cast<std::size_t>(li * li + li + mi)] = v[i];
  }
  return sphere::ScalarField::from_coeffs(grid, c);
}

}  // namespace nullfol::io
