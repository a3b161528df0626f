#pragma once

#include "geometry/metric.hpp"

// Small dense helpers for Cartesian tangent tensors at one node.
namespace nullfol::evolution::ops {

using geometry::Mat3;
using geometry::Vec3;

inline Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[i + 3 * k] * b[k + 3 * j];
      c[i + 3 * j] = s;
    }
  return c;
}

inline Mat3 mul3(const Mat3& a, const Mat3& b, const Mat3& c) { return mul(mul(a, b), c); }

inline Vec3 apply(const Mat3& a, const Vec3& v) {
  Vec3 out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out[i] += a[i + 3 * j] * v[j];
  return out;
}

inline double quad(const Mat3& a, const Vec3& u, const Vec3& v) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += u[i] * a[i + 3 * j] * v[j];
  return s;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Mat3 axpy(Mat3 y, double a, const Mat3& x) {
  for (int i = 0; i < 9; ++i) y[i] += a * x[i];
  return y;
}

// inverse on the tangent plane of a tangent tensor (annihilates x)
inline Mat3 tangent_inverse(const Mat3& g, const Vec3& x) {
  Mat3 m = g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i + 3 * j] += x[i] * x[j];
  const double a = m[0], b = m[3], c = m[6], d = m[1], e = m[4], f = m[7], g2 = m[2], h = m[5], k = m[8];
  // m = [[a b c],[d e f],[g2 h k]] in row-major reading of [row + 3 col]
  const double A = e * k - f * h, B = -(d * k - f * g2), C = d * h - e * g2;
  const double det = a * A + b * B + c * C;
  Mat3 inv{};
  const double id = 1.0 / det;
  // inv[row + 3 col]
  inv[0] = A * id;
  inv[3] = -(b * k - c * h) * id;
  inv[6] = (b * f - c * e) * id;
  inv[1] = B * id;
  inv[4] = (a * k - c * g2) * id;
  inv[7] = -(a * f - c * d) * id;
  inv[2] = C * id;
  inv[5] = -(a * h - b * g2) * id;
  inv[8] = (a * e - b * d) * id;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv[i + 3 * j] -= x[i] * x[j];
  return inv;
}

// slice k of a derivative tensor t[k + 3 (i + 3 j)] as a matrix [i + 3 j]
inline Mat3 slice(const geometry::Ten3& t, int k) {
  Mat3 m{};
  for (int ij = 0; ij < 9; ++ij) m[ij] = t[k + 3 * ij];
  return m;
}

}  // namespace nullfol::evolution::ops
