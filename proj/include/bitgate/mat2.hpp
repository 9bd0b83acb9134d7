// Copyright 2026 The bitgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace bitgate {

using cx = std::complex<double>;

struct Vec2 {
  cx a{0.0};
  cx b{0.0};

  double norm2() const { return std::norm(a) + std::norm(b); }

  Vec2 normalized() const {
    const double n = std::sqrt(norm2());
    return {a / n, b / n};
  }
};

/// Dense complex 2x2 matrix. Only the handful of operations the measurement
/// model needs; not a general linear-algebra type.
struct Mat2 {
  cx m00{0.0}, m01{0.0}, m10{0.0}, m11{0.0};

  static Mat2 zero() { return {}; }
  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  /// |v><v|
  static Mat2 outer(const Vec2& v) {
    return {v.a * std::conj(v.a), v.a * std::conj(v.b),
            v.b * std::conj(v.a), v.b * std::conj(v.b)};
  }

  cx trace() const { return m00 + m11; }

  Mat2 adjoint() const {
    return {std::conj(m00), std::conj(m10), std::conj(m01), std::conj(m11)};
  }

  Mat2 hermitized() const {
    const Mat2 adj = adjoint();
    return {(m00 + adj.m00) * 0.5, (m01 + adj.m01) * 0.5,
            (m10 + adj.m10) * 0.5, (m11 + adj.m11) * 0.5};
  }

  bool is_hermitian(double tol) const {
    return std::abs(m00 - std::conj(m00)) <= tol &&
           std::abs(m11 - std::conj(m11)) <= tol &&
           std::abs(m01 - std::conj(m10)) <= tol;
  }

  Vec2 apply(const Vec2& v) const {
    return {m00 * v.a + m01 * v.b, m10 * v.a + m11 * v.b};
  }

  double max_abs_diff(const Mat2& o) const {
    return std::max({std::abs(m00 - o.m00), std::abs(m01 - o.m01),
                     std::abs(m10 - o.m10), std::abs(m11 - o.m11)});
  }

  friend Mat2 operator+(const Mat2& x, const Mat2& y) {
    return {x.m00 + y.m00, x.m01 + y.m01, x.m10 + y.m10, x.m11 + y.m11};
  }
  friend Mat2 operator-(const Mat2& x, const Mat2& y) {
    return {x.m00 - y.m00, x.m01 - y.m01, x.m10 - y.m10, x.m11 - y.m11};
  }
  friend Mat2 operator*(double s, const Mat2& x) {
    return {s * x.m00, s * x.m01, s * x.m10, s * x.m11};
  }
  friend Mat2 operator*(const Mat2& x, double s) { return s * x; }
};

/// Tr(a * b)
inline cx trace_product(const Mat2& a, const Mat2& b) {
  return a.m00 * b.m00 + a.m01 * b.m10 + a.m10 * b.m01 + a.m11 * b.m11;
}

/// <v| m |v>
inline cx expectation(const Mat2& m, const Vec2& v) {
  const Vec2 mv = m.apply(v);
  return std::conj(v.a) * mv.a + std::conj(v.b) * mv.b;
}

struct Eigen2 {
  double lambda_min{0.0};
  double lambda_max{0.0};
  Vec2 vec_min;
  Vec2 vec_max;
  bool degenerate{false};  // spectrum gap below tolerance; eigenvectors arbitrary
};

inline constexpr double kEigenDegenerateTol = 1e-12;

/// Closed-form spectral decomposition of a Hermitian 2x2 matrix. The input is
/// symmetrized to (m + m^dag)/2 first, so callers may pass matrices carrying
/// ~1e-12 numerical skew.
inline Eigen2 eigen_hermitian(const Mat2& m) {
  const Mat2 h = m.hermitized();
  const double a = h.m00.real();
  const double d = h.m11.real();
  const cx b = h.m01;
  const double babs = std::abs(b);

  const double mean = 0.5 * (a + d);
  const double half_gap = std::hypot(0.5 * (a - d), babs);

  Eigen2 out;
  out.lambda_min = mean - half_gap;
  out.lambda_max = mean + half_gap;
  out.degenerate = 2.0 * half_gap <= kEigenDegenerateTol;

  if (out.degenerate || babs == 0.0) {
    if (a <= d) {
      out.vec_min = {1.0, 0.0};
      out.vec_max = {0.0, 1.0};
    } else {
      out.vec_min = {0.0, 1.0};
      out.vec_max = {1.0, 0.0};
    }
    return out;
  }

  // For eigenvalue L both (b, L-a) and (L-d, conj(b)) are eigenvectors;
  // pick the better-conditioned one.
  const auto eigenvector = [&](double lambda) {
    const Vec2 c1{b, cx(lambda - a, 0.0)};
    const Vec2 c2{cx(lambda - d, 0.0), std::conj(b)};
    return (c1.norm2() >= c2.norm2() ? c1 : c2).normalized();
  };
  out.vec_min = eigenvector(out.lambda_min);
  out.vec_max = eigenvector(out.lambda_max);
  return out;
}

}  // namespace bitgate
