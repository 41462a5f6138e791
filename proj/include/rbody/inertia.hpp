#ifndef RBODY_INERTIA_HPP
#define RBODY_INERTIA_HPP

#include <cmath>

#include "rbody/errors.hpp"
#include "rbody/linalg.hpp"

namespace rbody {

/// Symmetric positive-definite inertia tensor with physically admissible
/// principal moments (each pair sums to at least the third).
class InertiaTensor {
 public:
  explicit InertiaTensor(const Mat3& m) : mat_(m) {
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (std::abs(m(i, j) - m(j, i)) > 1e-12)
          throw invalid_input("inertia tensor must be symmetric");
    const auto e = symmetric_eigenvalues(m);  // descending
    if (!(e[2] > 0.0)) throw invalid_input("inertia tensor must be positive-definite");
    // triangle inequalities on principal moments, largest one is binding
    if (e[1] + e[2] < e[0] - 1e-12)
      throw invalid_input("principal moments violate the triangle inequality");
    moments_ = {e[0], e[1], e[2]};
    inv_ = inverse(mat_);
  }

  static InertiaTensor from_principal(const Vec3& moments,
                                      const Mat3& orientation = Mat3::identity()) {
    if (orthogonality_residual(orientation) > 1e-9)
      throw invalid_input("principal-axis orientation must be orthogonal");
    Mat3 d = Mat3::zero();
    d(0, 0) = moments.x;
    d(1, 1) = moments.y;
    d(2, 2) = moments.z;
    return InertiaTensor(orientation * d * orientation.transpose());
  }

  static InertiaTensor spherical(double moment = 1.0) {
    return InertiaTensor(Mat3::identity() * moment);
  }

  const Mat3& matrix() const { return mat_; }
  const Mat3& inverse_matrix() const { return inv_; }
  /// Principal moments in descending order.
  const std::array<double, 3>& principal_moments() const { return moments_; }

  bool is_spherical(double tol = 1e-12) const {
    return moments_[0] - moments_[2] <= tol * moments_[0];
  }

 private:
  Mat3 mat_;
  Mat3 inv_;
  std::array<double, 3> moments_;
};

}  // namespace rbody

#endif
