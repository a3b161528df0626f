#include "analysis/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace nullfol::analysis {

namespace {

struct Candidate {
  std::vector<double> c;
  double residual = 0;
};

double inflation_for(const std::vector<std::vector<double>>& X, const std::vector<double>& y,
                     const std::vector<double>& c) {
  double lam = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double pred = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) pred += c[k] * X[i][k];
    if (y[i] <= 0.0) continue;
    if (!(pred > 0.0)) return std::numeric_limits<double>::infinity();
    lam = std::max(lam, y[i] / pred);
  }
  return lam;
}

}  // namespace

BoundFit fit_bound(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  if (X.size() != y.size()) throw Error(ErrorCode::ConfigError, "fit_bound: feature and sample counts differ");
  BoundFit out;
  if (y.empty()) return out;
  const int nf = static_cast<int>(X[0].size());
  if (nf < 1 || nf > 6) throw Error(ErrorCode::ConfigError, "fit_bound: between 1 and 6 features");
  const int ns = static_cast<int>(y.size());
  std::vector<Candidate> cands;
  for (unsigned mask = 1; mask < (1u << nf); ++mask) {
    std::vector<int> cols;
    for (int k = 0; k < nf; ++k)
      if (mask & (1u << k)) cols.push_back(k);
    Eigen::MatrixXd A(ns, static_cast<int>(cols.size()));
    Eigen::VectorXd b(ns);
    for (int i = 0; i < ns; ++i) {
      b(i) = y[i];
      for (std::size_t j = 0; j < cols.size(); ++j) A(i, static_cast<int>(j)) = X[i][cols[j]];
    }
    // a column of zeros carries no information and would make the solve rank deficient
    bool degenerate = false;
    for (int j = 0; j < A.cols(); ++j) degenerate |= A.col(j).cwiseAbs().maxCoeff() == 0.0;
    if (degenerate) continue;
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    if ((sol.array() < 0.0).any() || !sol.allFinite()) continue;
    Candidate cd;
    cd.c.assign(nf, 0.0);
    for (std::size_t j = 0; j < cols.size(); ++j) cd.c[cols[j]] = sol(static_cast<int>(j));
    cd.residual = std::sqrt((A * sol - b).squaredNorm() / ns);
    cands.push_back(std::move(cd));
  }
  // all-zero fit, valid only when every sample vanishes
  cands.push_back({std::vector<double>(nf, 0.0), std::sqrt(Eigen::Map<const Eigen::VectorXd>(y.data(), ns)
                                                               .squaredNorm() / ns)});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.residual < b.residual; });
  for (const auto& cd : cands) {
    double lam = inflation_for(X, y, cd.c);
    if (!std::isfinite(lam)) continue;
    if (lam == 0.0) lam = 1.0;  // every sample is zero
    out.raw = cd.c;
    out.inflation = lam;
    out.residual = cd.residual;
    out.constants = cd.c;
    for (double& v : out.constants) v *= lam;
    // with one active feature the bound is max y/x; computing it directly keeps exact ratios exact
    if (std::count_if(cd.c.begin(), cd.c.end(), [](double v) { return v != 0.0; }) == 1) {
      const auto k = static_cast<std::size_t>(
          std::find_if(cd.c.begin(), cd.c.end(), [](double v) { return v != 0.0; }) - cd.c.begin());
      double m = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i)
        if (X[i][k] > 0.0) m = std::max(m, y[i] / X[i][k]);
      out.constants[k] = m;
      out.inflation = m / cd.c[k];
    }
    out.ok = true;
    return out;
  }
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::ConfigError, "fit_slope needs two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

}  // namespace nullfol::analysis
