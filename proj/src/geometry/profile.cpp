#include "geometry/profile.hpp"

#include <cmath>
#include <random>

#include "errors.hpp"
#include "sphere/calculus.hpp"

namespace nullfol::geometry {

using sphere::CartField;
using sphere::GridPtr;
using sphere::ScalarField;

namespace {

PotentialTable empty_table(int band, int powers) {
  return PotentialTable(powers, std::vector<double>(sphere::coeff_count(band), 0.0));
}

ScalarField potential(const PotentialTable& t, int k, const GridPtr& g) {
  std::vector<double> c(g->ncoeff(), 0.0);
  if (k < static_cast<int>(t.size()))
    for (std::size_t i = 0; i < t[k].size() && i < c.size(); ++i) c[i] = t[k][i];
  return ScalarField::from_coeffs(g, c);
}

CartField cross_position(const CartField& v) {
  CartField out(v.grid, 1);
  double x[3];
  for (int i = 0; i < v.grid->size(); ++i) {
    v.grid->position(i, x);
    const double a = v.comp[0][i], b = v.comp[1][i], c = v.comp[2][i];
    out.comp[0][i] = x[1] * c - x[2] * b;
    out.comp[1][i] = x[2] * a - x[0] * c;
    out.comp[2][i] = x[0] * b - x[1] * a;
  }
  return out;
}

}  // namespace

PerturbationProfile PerturbationProfile::zero(int band, int powers) {
  PerturbationProfile p;
  p.band = band;
  p.powers = powers;
  for (int c = 0; c < 6; ++c) p.channel(c) = empty_table(band, powers);
  return p;
}

PerturbationProfile PerturbationProfile::generate(double epsilon, std::uint64_t seed, int band, int powers,
                                                  double amplitude) {
  PerturbationProfile p = zero(band, powers);
  p.epsilon = epsilon;
  p.seed = seed;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  // decay exponents per channel: potentials differentiated once or twice more
  // get correspondingly stronger damping
  const double decay[6] = {2.0, 2.5, 2.5, 2.0, 3.0, 3.0};
  const double scale[6] = {0.08, 0.08, 0.08, 0.05, 0.05, 0.05};
  for (int c = 0; c < 6; ++c)
    for (int k = 0; k < powers; ++k) {
      const double pk = k == 0 ? 1.0 : 0.5 / k;
      for (int l = 0; l <= band; ++l)
        for (int m = -l; m <= l; ++m)
          p.channel(c)[k][sphere::coeff_index(l, m)] =
              amplitude * scale[c] * pk * nd(rng) / std::pow(1.0 + l * (l + 1.0), decay[c]);
    }
  return p;
}

PerturbationProfile PerturbationProfile::adversarial(double epsilon, double amplitude) {
  PerturbationProfile p = zero(1, 1);
  p.epsilon = epsilon;
  p.omega[0][0] = amplitude * std::sqrt(4.0 * std::numbers::pi);
  return p;
}

void PerturbationProfile::check() const {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::ProfileError, "epsilon must be non-negative");
  if (band < 0 || powers < 1) throw Error(ErrorCode::ProfileError, "profile band/powers invalid");
  for (int c = 0; c < 6; ++c) {
    const auto& t = channel(c);
    if (static_cast<int>(t.size()) != powers)
      throw Error(ErrorCode::ProfileError, std::string("channel ") + channel_name(c) + " has wrong power count");
    for (const auto& v : t)
      if (static_cast<int>(v.size()) != sphere::coeff_count(band))
        throw Error(ErrorCode::ProfileError,
                    std::string("channel ") + channel_name(c) + " has wrong coefficient count");
  }
}

const PotentialTable& PerturbationProfile::channel(int c) const {
  return const_cast<PerturbationProfile*>(this)->channel(c);
}

PotentialTable& PerturbationProfile::channel(int c) {
  switch (c) {
    case 0: return omega;
    case 1: return b_grad;
    case 2: return b_curl;
    case 3: return g_trace;
    case 4: return g_grad;
    case 5: return g_curl;
  }
  throw Error(ErrorCode::ProfileError, "unknown channel");
}

const char* PerturbationProfile::channel_name(int c) {
  static const char* names[6] = {"omega", "b_grad", "b_curl", "g_trace", "g_grad", "g_curl"};
  return (c >= 0 && c < 6) ? names[c] : "?";
}

CartField shape_field(const PerturbationProfile& profile, const GridPtr& g, int channel, int k) {
  if (profile.band + 4 > g->ltrans())
    throw Error(ErrorCode::ProfileError, "profile band too large for grid transforms");
  if (channel == 0) {
    ScalarField f = potential(profile.omega, k, g);
    CartField t(g, 0);
    t.comp[0] = f.values();
    return t;
  }
  if (channel == 1) {
    CartField t = sphere::cart_grad(potential(profile.b_grad, k, g));
    CartField c = cross_position(sphere::cart_grad(potential(profile.b_curl, k, g)));
    for (int a = 0; a < 3; ++a)
      for (int i = 0; i < g->size(); ++i) t.comp[a][i] += c.comp[a][i];
    return t;
  }
  if (channel == 2) {
    ScalarField tr = potential(profile.g_trace, k, g);
    ScalarField se = potential(profile.g_grad, k, g);
    ScalarField lap = sphere::laplacian(se);
    CartField h = sphere::cov_deriv(sphere::cart_grad(se));
    CartField dr = sphere::cov_deriv(cross_position(sphere::cart_grad(potential(profile.g_curl, k, g))));
    CartField t(g, 2);
    double x[3];
    for (int i = 0; i < g->size(); ++i) {
      g->position(i, x);
      const double iso = tr[i] - 0.5 * lap[i];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const double proj = (a == b ? 1.0 : 0.0) - x[a] * x[b];
          t.comp[a + 3 * b][i] = iso * proj + h.comp[a + 3 * b][i] +
                                 0.5 * (dr.comp[a + 3 * b][i] + dr.comp[b + 3 * a][i]);
        }
    }
    return t;
  }
  throw Error(ErrorCode::ProfileError, "unknown shape channel");
}

ProfileCache::ProfileCache(const PerturbationProfile& profile, GridPtr grid)
    : grid_(std::move(grid)), powers_(profile.powers) {
  profile.check();
  const int n = grid_->size();
  data_.assign(static_cast<std::size_t>(n) * powers_ * kStride, 0.0);
  const int offsets[3][3] = {{kOmega, kOmegaD, kOmegaDD}, {kB, kBD, kBDD}, {kG, kGD, kGDD}};
  for (int k = 0; k < powers_; ++k)
    for (int ch = 0; ch < 3; ++ch) {
      CartField t = shape_field(profile, grid_, ch, k);
      for (int order = 0; order < 3; ++order) {
        if (order > 0) t = sphere::cov_deriv(t);
        const int off = offsets[ch][order];
        for (int c = 0; c < t.ncomp(); ++c)
          for (int i = 0; i < n; ++i)
            data_[(static_cast<std::size_t>(i) * powers_ + k) * kStride + off + c] = t.comp[c][i];
      }
    }
}

void ProfileCache::at_point(double theta, double phi, std::vector<double>& out) const {
  const int n = grid_->size();
  std::call_once(coeff_once_, [&] {
    coeffs_.assign(static_cast<std::size_t>(powers_) * kStride, {});
    std::vector<double> vals(n);
    for (int k = 0; k < powers_; ++k)
      for (int c = 0; c < kStride; ++c) {
        for (int i = 0; i < n; ++i) vals[i] = node(i, k)[c];
        auto& dst = coeffs_[static_cast<std::size_t>(k) * kStride + c];
        dst.resize(grid_->ncoeff());
        grid_->analysis(vals, dst);
      }
  });
  sphere::PointSynth ps(grid_->ltrans(), theta, phi);
  out.resize(static_cast<std::size_t>(powers_) * kStride);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ps.value(coeffs_[i]);
}

}  // namespace nullfol::geometry
