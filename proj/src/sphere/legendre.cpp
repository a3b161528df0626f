#include "sphere/legendre.hpp"

#include <cmath>
#include <numbers>

namespace nullfol::sphere {

void legendre_column(int lmax, double x, double s, LegendreColumn& out) {
  const std::size_t n = tri_count(lmax);
  out.p.assign(n, 0.0);
  out.dp.assign(n, 0.0);
  out.mq.assign(n, 0.0);

  // q holds P_lm / sin(theta) for m >= 1, built with the same recurrence as P.
  std::vector<double> q(n, 0.0);
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  double qmm = 0.0;
  for (int m = 0; m <= lmax; ++m) {
    if (m > 0) {
      const double f = std::sqrt((2.0 * m + 1.0) / (2.0 * m));
      qmm = f * pmm;
      pmm = f * s * pmm;
    }
    out.p[tri_index(lmax, m, m)] = pmm;
    q[tri_index(lmax, m, m)] = qmm;
    if (m + 1 <= lmax) {
      const double f = std::sqrt(2.0 * m + 3.0);
      out.p[tri_index(lmax, m, m + 1)] = f * x * pmm;
      q[tri_index(lmax, m, m + 1)] = f * x * qmm;
    }
    for (int l = m + 2; l <= lmax; ++l) {
      const double l2 = double(l) * l, m2 = double(m) * m;
      const double a = std::sqrt((4.0 * l2 - 1.0) / (l2 - m2));
      const double lm1 = double(l - 1) * (l - 1);
      const double b = std::sqrt((lm1 - m2) / (4.0 * lm1 - 1.0));
      const std::size_t i = tri_index(lmax, m, l);
      out.p[i] = a * (x * out.p[i - 1] - b * out.p[i - 2]);
      q[i] = a * (x * q[i - 1] - b * q[i - 2]);
    }
  }

  for (int m = 0; m <= lmax; ++m) {
    for (int l = m; l <= lmax; ++l) {
      const std::size_t i = tri_index(lmax, m, l);
      if (m == 0) {
        out.dp[i] = l == 0 ? 0.0 : -std::sqrt(double(l) * (l + 1)) * out.p[tri_index(lmax, 1, l)];
      } else {
        const double c = l > m ? std::sqrt((2.0 * l + 1.0) * (double(l) * l - double(m) * m) / (2.0 * l - 1.0)) : 0.0;
        const double qlm1 = l > m ? q[i - 1] : 0.0;
        out.dp[i] = l * x * q[i] - c * qlm1;
        out.mq[i] = m * q[i];
      }
    }
  }
}

}  // namespace nullfol::sphere
