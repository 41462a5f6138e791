#ifndef RBODY_CHART_HPP
#define RBODY_CHART_HPP

#include <cmath>
#include <string>

#include "rbody/errors.hpp"
#include "rbody/inertia.hpp"
#include "rbody/linalg.hpp"

namespace rbody::chart {

/// Unconstrained rotation vector n = k tan(alpha/2); covers SO(3) minus the
/// alpha = pi locus, with n = 0 at the identity.
struct RotationVector {
  Vec3 n;
  RotationVector() = default;
  explicit RotationVector(const Vec3& v) : n(v) {}
  RotationVector(double x, double y, double z) : n{x, y, z} {}
};

struct AxisAngle {
  Vec3 k;       // unit axis
  double alpha; // radians in [0, pi)
};

inline bool finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

inline void require_finite(const Vec3& v, const char* what) {
  if (!finite(v)) throw invalid_input(std::string(what) + ": non-finite components");
}

inline void validate(const AxisAngle& aa) {
  if (std::abs(norm(aa.k) - 1.0) > 1e-9)
    throw invalid_input("axis-angle: axis must be a unit vector");
  if (!(aa.alpha >= 0.0))
    throw invalid_input("axis-angle: angle must be nonnegative");
  if (aa.alpha >= M_PI)
    throw chart_boundary_error("axis-angle: angle must be below pi",
                               {aa.k.x, aa.k.y, aa.k.z});
}

/// R_ij = cos(a) d_ij + (1 - cos(a)) k_i k_j - eps_ijk k_k sin(a).
inline Mat3 rotation_from_axis_angle(const AxisAngle& aa) {
  validate(aa);
  const double c = std::cos(aa.alpha);
  const double s = std::sin(aa.alpha);
  return Mat3::identity() * c + outer(aa.k, aa.k) * (1.0 - c) - hat(aa.k) * s;
}

/// n = k tan(alpha/2).
inline RotationVector rotation_vector_from_axis_angle(const AxisAngle& aa) {
  validate(aa);
  return RotationVector(aa.k * std::tan(aa.alpha / 2.0));
}

/// Rotation matrix in the rotation-vector chart:
/// R(n) = [(1 - n^2) 1 + 2 n n^T - 2 hat(n)] / (1 + n^2); R(0) = 1.
inline Mat3 rotation_matrix(const RotationVector& rv) {
  require_finite(rv.n, "rotation_matrix");
  const double n2 = dot(rv.n, rv.n);
  return (Mat3::identity() * (1.0 - n2) + outer(rv.n, rv.n) * 2.0 - hat(rv.n) * 2.0) *
         (1.0 / (1.0 + n2));
}

/// Inverse of the axis-angle construction. Uses the antisymmetric part of R
/// away from alpha = pi and the symmetric part close to it, where the
/// antisymmetric part cancels. The degenerate alpha = 0 axis is fixed to
/// (0,0,1); alpha within 1e-9 of pi is outside the chart and reported with
/// the (sign-ambiguous) axis.
inline AxisAngle axis_angle_from_rotation(const Mat3& r) {
  if (orthogonality_residual(r) > 1e-9)
    throw invalid_input("axis_angle_from_rotation: matrix is not orthogonal");
  if (det(r) <= 0.0)
    throw invalid_input("axis_angle_from_rotation: matrix must be proper (det > 0)");

  const double c = std::max(-1.0, std::min(1.0, (trace(r) - 1.0) / 2.0));
  double alpha = std::acos(c);
  // antisymmetric part: v = sin(alpha) k
  const Vec3 v{(r(2, 1) - r(1, 2)) / 2.0, (r(0, 2) - r(2, 0)) / 2.0,
               (r(1, 0) - r(0, 1)) / 2.0};
  const double s = norm(v);

  if (alpha < 1e-12) return {Vec3{0.0, 0.0, 1.0}, 0.0};

  Vec3 k;
  if (c >= 0.0 || s > 1e-4) {
    k = v * (1.0 / s);
  } else {
    // near alpha = pi: symmetric part k_i k_j = (R + R^T - 2c)/(2(1-c))
    const double omc = 1.0 - c;
    Vec3 ksq{(r(0, 0) - c) / omc, (r(1, 1) - c) / omc, (r(2, 2) - c) / omc};
    int imax = 0;
    if (ksq.y > ksq[imax]) imax = 1;
    if (ksq.z > ksq[imax]) imax = 2;
    k[imax] = std::sqrt(std::max(0.0, ksq[imax]));
    for (int j = 0; j < 3; ++j)
      if (j != imax) k[j] = (r(imax, j) + r(j, imax)) / (2.0 * omc * k[imax]);
    k = k * (1.0 / norm(k));
    if (dot(k, v) < 0.0) k = -k;  // match the counterclockwise convention
    if (M_PI - alpha < 1e-9)
      throw chart_boundary_error(
          "axis_angle_from_rotation: angle within 1e-9 of pi, axis sign ambiguous",
          {k.x, k.y, k.z});
  }
  return {k, alpha};
}

/// A = [1 - hat(n)] / (1 + n^2), the left inverse of a_tilde.
inline Mat3 a_matrix(const RotationVector& rv) {
  require_finite(rv.n, "a_matrix");
  return (Mat3::identity() - hat(rv.n)) * (1.0 / (1.0 + dot(rv.n, rv.n)));
}

/// A~ = 1 + n n^T + hat(n); polynomial in n, usable with jet scalars.
template <class T>
TMat3<T> a_tilde_t(const TVec3<T>& n) {
  return TMat3<T>::identity() + outer(n, n) + hat(n);
}

inline Mat3 a_tilde(const RotationVector& rv) {
  require_finite(rv.n, "a_tilde");
  return a_tilde_t(rv.n);
}

/// Angular velocity in the body along a chart curve: Omega = 2 A^T ndot.
inline Vec3 body_angular_velocity(const RotationVector& rv, const Vec3& ndot) {
  require_finite(rv.n, "body_angular_velocity");
  require_finite(ndot, "body_angular_velocity");
  return a_matrix(rv).transpose() * ndot * 2.0;
}

/// Induced metric G = 4 A I A^T of the geodesic formulation.
inline Mat3 metric(const RotationVector& rv, const InertiaTensor& inertia) {
  const Mat3 a = a_matrix(rv);
  return a * inertia.matrix() * a.transpose() * 4.0;
}

/// G^{-1} = (1/4) A~^T I^{-1} A~.
inline Mat3 inverse_metric(const RotationVector& rv, const InertiaTensor& inertia) {
  const Mat3 at = a_tilde(rv);
  return at.transpose() * inertia.inverse_matrix() * at * 0.25;
}

/// Row-major full-precision matrix formatting shared with the CLI.
inline std::string format_row_major(const Mat3& m, char sep = ',') {
  std::string out;
  for (int i = 0; i < 9; ++i) {
    if (i) out.push_back(sep);
    out += format_full(m.a[i]);
  }
  return out;
}

}  // namespace rbody::chart

#endif
