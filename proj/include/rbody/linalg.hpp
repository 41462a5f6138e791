#ifndef RBODY_LINALG_HPP
#define RBODY_LINALG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "rbody/errors.hpp"

namespace rbody {

/// 3-vector over an arbitrary arithmetic scalar (double in the public API,
/// truncated Taylor jets inside the Lie-series flow).
template <class T>
struct TVec3 {
  T x{}, y{}, z{};

  TVec3() = default;
  TVec3(T a, T b, T c) : x(std::move(a)), y(std::move(b)), z(std::move(c)) {}

  T& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  const T& operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  TVec3 operator+(const TVec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  TVec3 operator-(const TVec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  TVec3 operator-() const { return {-x, -y, -z}; }
  TVec3& operator+=(const TVec3& o) {
    x = x + o.x;
    y = y + o.y;
    z = z + o.z;
    return *this;
  }
};

template <class T, class S>
auto operator*(const TVec3<T>& v, const S& s) -> TVec3<decltype(v.x * s)> {
  return {v.x * s, v.y * s, v.z * s};
}
template <class T>
TVec3<T> operator*(double s, const TVec3<T>& v) {
  return {v.x * s, v.y * s, v.z * s};
}

template <class T>
T dot(const TVec3<T>& a, const TVec3<T>& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class T>
TVec3<T> cross(const TVec3<T>& a, const TVec3<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

/// Row-major 3x3 matrix.
template <class T>
struct TMat3 {
  std::array<T, 9> a{};

  T& operator()(int i, int j) { return a[3 * i + j]; }
  const T& operator()(int i, int j) const { return a[3 * i + j]; }

  static TMat3 identity() {
    TMat3 m;
    m(0, 0) = T(1);
    m(1, 1) = T(1);
    m(2, 2) = T(1);
    return m;
  }
  static TMat3 zero() { return TMat3{}; }

  TMat3 transpose() const {
    TMat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  TMat3 operator+(const TMat3& o) const {
    TMat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }
  TMat3 operator-(const TMat3& o) const {
    TMat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = a[i] - o.a[i];
    return r;
  }
  TMat3 operator*(const TMat3& o) const {
    TMat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        T s = (*this)(i, 0) * o(0, j);
        s = s + (*this)(i, 1) * o(1, j);
        s = s + (*this)(i, 2) * o(2, j);
        r(i, j) = s;
      }
    return r;
  }
  TVec3<T> operator*(const TVec3<T>& v) const {
    TVec3<T> r;
    for (int i = 0; i < 3; ++i)
      r[i] = (*this)(i, 0) * v.x + (*this)(i, 1) * v.y + (*this)(i, 2) * v.z;
    return r;
  }
};

template <class T, class S>
auto operator*(const TMat3<T>& m, const S& s) -> TMat3<decltype(m.a[0] * s)> {
  TMat3<decltype(m.a[0] * s)> r;
  for (int i = 0; i < 9; ++i) r.a[i] = m.a[i] * s;
  return r;
}
template <class T>
TMat3<T> operator*(double s, const TMat3<T>& m) {
  TMat3<T> r;
  for (int i = 0; i < 9; ++i) r.a[i] = m.a[i] * s;
  return r;
}

using Vec3 = TVec3<double>;
using Mat3 = TMat3<double>;

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

template <class T>
TMat3<T> outer(const TVec3<T>& a, const TVec3<T>& b) {
  TMat3<T> m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[i] * b[j];
  return m;
}

/// hat(v)_ij = eps_ijk v_k, so hat(v)*w = w x v.
template <class T>
TMat3<T> hat(const TVec3<T>& v) {
  TMat3<T> m;
  m(0, 1) = v.z;
  m(0, 2) = -v.y;
  m(1, 0) = -v.z;
  m(1, 2) = v.x;
  m(2, 0) = v.y;
  m(2, 1) = -v.x;
  return m;
}

/// Levi-Civita symbol eps_ijk.
constexpr double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  // even permutations of (0,1,2)
  if ((i == 0 && j == 1) || (i == 1 && j == 2) || (i == 2 && j == 0)) return 1.0;
  return -1.0;
}

inline double det(const Mat3& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline double trace(const Mat3& m) { return m(0, 0) + m(1, 1) + m(2, 2); }

inline double max_abs(const Mat3& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::abs(v));
  return s;
}

inline double frobenius_norm(const Mat3& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

inline Mat3 inverse(const Mat3& m) {
  const double d = det(m);
  if (std::abs(d) < 1e-300) throw numeric_error("matrix inverse: singular 3x3 matrix");
  Mat3 r;
  r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / d;
  r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / d;
  r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
  r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / d;
  r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / d;
  r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / d;
  r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / d;
  r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / d;
  r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / d;
  return r;
}

/// Eigenvalues of a symmetric 3x3 matrix, descending order (analytic form).
inline std::array<double, 3> symmetric_eigenvalues(const Mat3& m) {
  const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
  if (p1 == 0.0) {
    std::array<double, 3> e{m(0, 0), m(1, 1), m(2, 2)};
    if (e[0] < e[1]) std::swap(e[0], e[1]);
    if (e[1] < e[2]) std::swap(e[1], e[2]);
    if (e[0] < e[1]) std::swap(e[0], e[1]);
    return e;
  }
  const double q = trace(m) / 3.0;
  const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                    (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b = (m - Mat3::identity() * q) * (1.0 / p);
  double r = det(b) / 2.0;
  r = std::max(-1.0, std::min(1.0, r));
  const double phi = std::acos(r) / 3.0;
  const double e0 = q + 2.0 * p * std::cos(phi);
  const double e2 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  return {e0, 3.0 * q - e0 - e2, e2};
}

/// Orthogonality residual ||R^T R - 1||_F.
inline double orthogonality_residual(const Mat3& r) {
  return frobenius_norm(r.transpose() * r - Mat3::identity());
}

/// Polar projection of a near-orthogonal matrix via Newton iteration.
inline Mat3 project_orthogonal(const Mat3& r) {
  Mat3 x = r;
  for (int it = 0; it < 8; ++it) {
    Mat3 next = (x + inverse(x.transpose())) * 0.5;
    if (frobenius_norm(next - x) < 1e-15) return next;
    x = next;
  }
  return x;
}

// ---------------------------------------------------------------------------
// 6-dimensional phase-point helpers (double only).
// ---------------------------------------------------------------------------

using Vec6 = std::array<double, 6>;

struct Mat6 {
  std::array<double, 36> a{};

  double& operator()(int i, int j) { return a[6 * i + j]; }
  double operator()(int i, int j) const { return a[6 * i + j]; }

  static Mat6 identity() {
    Mat6 m;
    for (int i = 0; i < 6; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat6 transpose() const {
    Mat6 r;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  Mat6 operator*(const Mat6& o) const {
    Mat6 r;
    for (int i = 0; i < 6; ++i)
      for (int k = 0; k < 6; ++k) {
        const double v = (*this)(i, k);
        if (v == 0.0) continue;
        for (int j = 0; j < 6; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }
  Mat6 operator+(const Mat6& o) const {
    Mat6 r;
    for (int i = 0; i < 36; ++i) r.a[i] = a[i] + o.a[i];
    return r;
  }
  Mat6 operator-(const Mat6& o) const {
    Mat6 r;
    for (int i = 0; i < 36; ++i) r.a[i] = a[i] - o.a[i];
    return r;
  }
  Vec6 operator*(const Vec6& v) const {
    Vec6 r{};
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) r[i] += (*this)(i, j) * v[j];
    return r;
  }
};

inline double max_abs(const Mat6& m) {
  double s = 0.0;
  for (double v : m.a) s = std::max(s, std::abs(v));
  return s;
}

inline double frobenius_norm(const Mat6& m) {
  double s = 0.0;
  for (double v : m.a) s += v * v;
  return std::sqrt(s);
}

/// Determinant of a 6x6 matrix by LU decomposition with partial pivoting.
/// Rank-revealing: a pivot below 1e-14 of the matrix scale reports an exact
/// zero, so exactly-singular inputs are not masked by elimination roundoff.
inline double det(const Mat6& m) {
  std::array<double, 36> lu = m.a;
  double scale = 0.0;
  for (double v : lu) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double d = 1.0;
  for (int k = 0; k < 6; ++k) {
    int piv = k;
    for (int i = k + 1; i < 6; ++i)
      if (std::abs(lu[6 * i + k]) > std::abs(lu[6 * piv + k])) piv = i;
    if (piv != k) {
      for (int j = 0; j < 6; ++j) std::swap(lu[6 * k + j], lu[6 * piv + j]);
      d = -d;
    }
    const double pv = lu[6 * k + k];
    if (std::abs(pv) < 1e-14 * scale) return 0.0;
    d *= pv;
    for (int i = k + 1; i < 6; ++i) {
      const double f = lu[6 * i + k] / pv;
      for (int j = k; j < 6; ++j) lu[6 * i + j] -= f * lu[6 * k + j];
    }
  }
  return d;
}

/// Crude condition estimate: product of largest and inverse-smallest pivot scale.
inline double condition_estimate(const Mat6& m) {
  double mx = 0.0;
  for (double v : m.a) mx = std::max(mx, std::abs(v));
  const double d = std::abs(det(m));
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(mx, 6) / d;
}

/// Full-precision decimal formatting shared by the CLI emitters.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace rbody

#endif
