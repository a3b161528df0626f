#include "analysis/transport_check.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "evolution/engine.hpp"

namespace nullfol::analysis {

namespace {

TangentField negated(TangentField v) {
  for (double& x : v.th) x = -x;
  for (double& x : v.ph) x = -x;
  return v;
}

// d_s u = -Y.grad u + re
ScalarField transport_rhs(const TangentField& Y, const ScalarField& u, const ScalarField& re) {
  ScalarField r = re;
  r -= sphere::directional(Y, u);
  return r;
}

class Accumulator {
 public:
  explicit Accumulator(const TransportCheckConfig& c) : cfg_(c) {}

  void add(double s, const TangentField& Y, const ScalarField& u, const ScalarField& re) {
    TransportRow row;
    row.s = s;
    row.u_norm = sphere::sobolev_norm(u, cfg_.m, cfg_.p);
    row.re_norm = sphere::sobolev_norm(re, cfg_.m, cfg_.p);
    row.y_norm = sphere::sobolev_norm(Y, cfg_.x_depth, cfg_.p);
    if (rep_.rows.empty()) {
      u0_ = row.u_norm;
      integral_ = 0.0;
    } else {
      const auto& prev = rep_.rows.back();
      integral_ += 0.5 * (s - prev.s) * (prev.re_norm + row.re_norm);
    }
    row.base = u0_ + integral_;
    row.commutator = commutator_residual(Y, u, re);
    rep_.k = std::max(rep_.k, row.y_norm * (cfg_.r0 + s) * (cfg_.r0 + s) / cfg_.r0);
    rep_.rows.push_back(row);
  }

  TransportReport finish() {
    if (!std::isfinite(rep_.k) || rep_.k > cfg_.k_max) {
      std::ostringstream os;
      os << "transport field decay constant k = " << rep_.k << " exceeds the accepted " << cfg_.k_max;
      throw Error(ErrorCode::HypothesisViolated, os.str());
    }
    double worst = 1.0;
    for (const auto& r : rep_.rows) {
      if (r.base > 0.0) worst = std::max(worst, r.u_norm / r.base);
      const double scale = std::max(r.u_norm, std::numeric_limits<double>::min()) / cfg_.r0;
      rep_.commutator_residual = std::max(rep_.commutator_residual, r.commutator / scale);
    }
    const double lw = std::log(worst);
    if (lw <= 1e-13)
      rep_.measured_c = 0.0;
    else
      rep_.measured_c = rep_.k > 0.0 ? lw / rep_.k : std::numeric_limits<double>::infinity();
    rep_.pass = rep_.measured_c <= cfg_.c_ceiling;
    return rep_;
  }

 private:
  TransportCheckConfig cfg_;
  TransportReport rep_;
  double u0_ = 0.0, integral_ = 0.0;
};

void check_config(const TransportCheckConfig& c) {
  if (c.m < 0 || c.m > sphere::kMaxScalarDepth) throw Error(ErrorCode::UnsupportedOrder, "transport check order m");
  if (c.x_depth < 0 || c.x_depth > sphere::kMaxTangentDepth)
    throw Error(ErrorCode::UnsupportedOrder, "transport field norm order");
  if (!(c.r0 > 0.0) || !(c.p >= 1.0)) throw Error(ErrorCode::ConfigError, "transport check needs r0 > 0, p >= 1");
}

}  // namespace

double commutator_residual(const TangentField& Y, const ScalarField& u, const ScalarField& re) {
  // d_s(R u) + Y.grad(R u) = R re - [R, Y].grad u with d_s u taken from the equation
  const ScalarField du = transport_rhs(Y, u, re);
  double worst = 0.0;
  for (int axis = 1; axis <= 3; ++axis) {
    const TangentField R = sphere::rotation_field(u.grid(), axis);
    const ScalarField Ru = sphere::directional(R, u);
    ScalarField res = sphere::directional(R, du);
    res += sphere::directional(Y, Ru);
    res -= sphere::directional(R, re);
    res += sphere::directional(sphere::lie_derivative(R, Y), u);
    worst = std::max(worst, sphere::sup_norm(res));
  }
  return worst;
}

TransportReport transport_check(const GridPtr& grid, const XFunction& Y, const ScalarFunction& re,
                                const ScalarField& u0, const std::vector<double>& times,
                                const TransportCheckConfig& cfg) {
  check_config(cfg);
  sphere::check_same_grid(grid, u0.grid(), "transport_check");
  if (times.empty()) throw Error(ErrorCode::ConfigError, "transport_check needs at least one time");
  Accumulator acc(cfg);
  ScalarField u = sphere::truncate(u0);
  auto rhs = [&](double s, const ScalarField& v) { return transport_rhs(Y(s), v, re(s)); };
  acc.add(times[0], Y(times[0]), u, re(times[0]));
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double s = times[j - 1], h = times[j] - s;
    if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "transport_check times must increase");
    const ScalarField k1 = rhs(s, u);
    ScalarField t = u;
    t.add_scaled(k1, 0.5 * h);
    const ScalarField k2 = rhs(s + 0.5 * h, sphere::truncate(t));
    t = u;
    t.add_scaled(k2, 0.5 * h);
    const ScalarField k3 = rhs(s + 0.5 * h, sphere::truncate(t));
    t = u;
    t.add_scaled(k3, h);
    const ScalarField k4 = rhs(s + h, sphere::truncate(t));
    u.add_scaled(k1, h / 6.0);
    u.add_scaled(k2, h / 3.0);
    u.add_scaled(k3, h / 3.0);
    u.add_scaled(k4, h / 6.0);
    u = sphere::truncate(u);
    acc.add(times[j], Y(times[j]), u, re(times[j]));
  }
  return acc.finish();
}

TransportReport transport_norm_check(const evolution::MetricFamily& metric, const ScalarField& f0,
                                     const evolution::EvolutionConfig& cfg, const TransportCheckConfig& tc,
                                     const std::optional<ScalarField>& u0) {
  check_config(tc);
  using evolution::engine::State;
  Accumulator acc(tc);
  evolution::engine::Hooks hk;
  hk.primary = [](const State& y) { return y.fields[0]; };
  hk.rhs = [&](double s, const State& y) {
    const auto t = evolution::transport(metric, s, y.fields[0]);
    const ScalarField re = evolution::assemble_re(metric, s, y.fields[0]).re;
    return State{{t.F, transport_rhs(negated(t.X), y.fields[1], re)}, {}};
  };
  hk.on_step = [&](double s, const State& y) {
    const auto t = evolution::transport(metric, s, y.fields[0]);
    acc.add(s, negated(t.X), y.fields[1], evolution::assemble_re(metric, s, y.fields[0]).re);
  };
  evolution::EvolutionConfig c = cfg;
  c.record_norms = false;
  c.null_monitor = false;
  State init{{f0, u0 ? *u0 : sphere::laplacian(sphere::truncate(f0))}, {}};
  const auto tr = evolution::engine::run(metric, std::move(init), c, hk);
  if (tr.status != evolution::EvolutionStatus::Completed)
    throw Error(ErrorCode::OutOfDomain, "transport check trajectory stopped: " + tr.message);
  return acc.finish();
}

}  // namespace nullfol::analysis
