#ifndef RBODY_VERIFY_HPP
#define RBODY_VERIFY_HPP

#include <random>
#include <string>
#include <vector>

#include "rbody/flows.hpp"
#include "rbody/io.hpp"
#include "rbody/poisson.hpp"

namespace rbody::verify {

using poisson::ResidualRecord;

// Sampling domain (documented for reproducibility): n uniform in the ball
// |n| <= 3, momenta/velocities uniform in [-2, 2]^3, inertia eigenvalues in
// [0.5, 3] with a random principal-axis orientation.
class Sampler {
 public:
  explicit Sampler(unsigned long seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

  Vec3 box(double half_width = 2.0) {
    return {uniform(-half_width, half_width), uniform(-half_width, half_width),
            uniform(-half_width, half_width)};
  }

  Vec3 unit() {
    while (true) {
      const Vec3 v = box(1.0);
      const double r = norm(v);
      if (r > 1e-3 && r <= 1.0) return v * (1.0 / r);
    }
  }

  Vec3 ball(double radius = 3.0) {
    while (true) {
      const Vec3 v = box(radius);
      if (dot(v, v) <= radius * radius) return v;
    }
  }

  Mat3 rotation() {
    return chart::rotation_from_axis_angle({unit(), uniform(0.0, M_PI * (1.0 - 1e-9))});
  }

  Vec3 principal_moments() {
    while (true) {
      const Vec3 m{uniform(0.5, 3.0), uniform(0.5, 3.0), uniform(0.5, 3.0)};
      if (m.x + m.y >= m.z && m.y + m.z >= m.x && m.z + m.x >= m.y) return m;
    }
  }

  InertiaTensor inertia() { return InertiaTensor::from_principal(principal_moments(), rotation()); }

  dynamics::CanonicalState canonical_state() {
    return {chart::RotationVector(ball()), box()};
  }

 private:
  std::mt19937_64 rng_;
};

inline Vec6 point_of(const Vec3& a, const Vec3& b) {
  return {a.x, a.y, a.z, b.x, b.y, b.z};
}

namespace detail {

inline void record(std::vector<ResidualRecord>& out, const std::string& check, const Vec6& point,
                   double residual, double tol) {
  out.push_back({check, point, residual, tol, residual <= tol});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Suites. Each returns one record per check with the worst residual observed.
// ---------------------------------------------------------------------------

inline std::vector<ResidualRecord> suite_chart(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double tol_orth = io::tolerance(rc, "chart-orthogonality", 1e-12);
  const double tol_det = io::tolerance(rc, "chart-determinant", 1e-12);
  const double tol_aat = io::tolerance(rc, "chart-a-atilde", 1e-13);
  const double tol_rot = io::tolerance(rc, "chart-r-factorization", 1e-13);
  const double tol_round = io::tolerance(rc, "chart-roundtrip", 1e-9);
  for (int it = 0; it < rc.verify_samples; ++it) {
    // log-uniform norms, covering |n| up to 1e3
    const double r = std::pow(10.0, smp.uniform(-6.0, 3.0));
    const chart::RotationVector n(smp.unit() * r);
    const Mat3 rot = chart::rotation_matrix(n);
    const Mat3 a = chart::a_matrix(n);
    const Mat3 at = chart::a_tilde(n);
    const Vec6 pt = point_of(n.n, {});
    detail::record(out, "chart-orthogonality", pt, orthogonality_residual(rot), tol_orth);
    detail::record(out, "chart-determinant", pt, std::abs(det(rot) - 1.0), tol_det);
    // The A-matrix products contain intermediate terms of magnitude |n|, each
    // rounding to ulp(|n|); scaling by 1 + |n| makes the residual a
    // norm-independent machine-precision statement of the identity.
    const double scale = 1.0 + r;
    detail::record(out, "chart-a-atilde", pt, max_abs(a * at - Mat3::identity()) / scale, tol_aat);
    detail::record(out, "chart-r-factorization", pt, max_abs(a * at.transpose() - rot) / scale,
                   tol_rot);
    const chart::AxisAngle aa = chart::axis_angle_from_rotation(rot);
    const Mat3 rebuilt = chart::rotation_from_axis_angle(aa);
    detail::record(out, "chart-roundtrip", pt, frobenius_norm(rebuilt - rot), tol_round);
  }
  return out;
}

inline std::vector<ResidualRecord> suite_pushforward(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double tol = io::tolerance(rc, "pushforward", 1e-10);
  const double tol_anti = io::tolerance(rc, "antisymmetry", 1e-12);
  const poisson::PoissonMatrix jc = poisson::canonical_poisson();
  for (int it = 0; it < rc.verify_samples; ++it) {
    const auto s = smp.canonical_state();
    const InertiaTensor inertia = smp.inertia();
    const Vec6 pt = point_of(s.n.n, s.pi);
    {
      const Vec3 m = dynamics::momentum_map(s);
      const auto direct = poisson::poisson_matrix_nm(s.n, m);
      const auto pushed = poisson::pushforward_poisson(poisson::jacobian_nm(s.n.n, s.pi), jc,
                                                       dynamics::System::NM);
      detail::record(out, "pushforward-nm", pt, max_abs(direct.J - pushed.J), tol);
      detail::record(out, "antisymmetry-nm", pt, poisson::antisymmetry_residual(direct), tol_anti);
    }
    {
      const Vec3 omega = dynamics::omega_from_canonical(s, inertia);
      const auto direct = poisson::poisson_matrix_nomega(s.n, omega, inertia);
      const auto pushed = poisson::pushforward_poisson(
          poisson::jacobian_nomega(s.n.n, s.pi, inertia), jc, dynamics::System::NOmega);
      detail::record(out, "pushforward-nomega", pt, max_abs(direct.J - pushed.J), tol);
      detail::record(out, "antisymmetry-nomega", pt, poisson::antisymmetry_residual(direct),
                     tol_anti);
    }
  }
  return out;
}

inline std::vector<ResidualRecord> suite_jacobi(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double tol = io::tolerance(rc, "jacobi", 1e-6);
  for (int it = 0; it < rc.verify_samples; ++it) {
    const auto s = smp.canonical_state();
    const InertiaTensor inertia = smp.inertia();
    const Vec3 m = dynamics::momentum_map(s);
    const Vec3 omega = dynamics::omega_from_canonical(s, inertia);
    const Vec6 pt_nm = point_of(s.n.n, m);
    const Vec6 pt_no = point_of(s.n.n, omega);
    const auto field_nm = [](const Vec6& z) {
      return poisson::poisson_matrix_nm(chart::RotationVector{z[0], z[1], z[2]},
                                        Vec3{z[3], z[4], z[5]});
    };
    const auto field_no = [&inertia](const Vec6& z) {
      return poisson::poisson_matrix_nomega(chart::RotationVector{z[0], z[1], z[2]},
                                            Vec3{z[3], z[4], z[5]}, inertia);
    };
    detail::record(out, "jacobi-nm", pt_nm, poisson::jacobi_residual(field_nm, pt_nm), tol);
    detail::record(out, "jacobi-nomega", pt_no, poisson::jacobi_residual(field_no, pt_no), tol);
  }
  detail::record(out, "jacobi-canonical", Vec6{},
                 poisson::jacobi_residual(
                     [](const Vec6&) { return poisson::canonical_poisson(); }, Vec6{}),
                 0.0);
  return out;
}

inline std::vector<ResidualRecord> suite_involution(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double tol = io::tolerance(rc, "involution", 1e-9);
  for (int it = 0; it < rc.verify_samples; ++it) {
    const auto s = smp.canonical_state();
    const InertiaTensor inertia = smp.inertia();
    const auto rep = poisson::involution_suite(s, inertia);
    const Vec6 pt = point_of(s.n.n, s.pi);
    for (int i = 0; i < 3; ++i) {
      detail::record(out, "involution-m" + std::to_string(i + 1) + "-H", pt, rep.m_h[i], tol);
      detail::record(out, "involution-m" + std::to_string(i + 1) + "-m2", pt, rep.m_m2[i], tol);
    }
    detail::record(out, "involution-H-m2", pt, rep.h_m2, tol);
    detail::record(out, "involution-H-m3", pt, rep.h_m3, tol);
    detail::record(out, "involution-m3-m2", pt, rep.m3_m2, tol);
  }
  return out;
}

inline std::vector<ResidualRecord> suite_nondegeneracy(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double floor = io::tolerance(rc, "nondegeneracy", 1e-12);
  for (int it = 0; it < rc.verify_samples; ++it) {
    const auto s = smp.canonical_state();
    const InertiaTensor inertia = smp.inertia();
    const Vec3 m = dynamics::momentum_map(s);
    const Vec3 omega = dynamics::omega_from_canonical(s, inertia);
    const double det_nm = poisson::nondegeneracy_check(poisson::poisson_matrix_nm(s.n, m));
    const double det_no =
        poisson::nondegeneracy_check(poisson::poisson_matrix_nomega(s.n, omega, inertia));
    // residual formulated so that pass means |det| above the floor
    detail::record(out, "nondegeneracy-nm", point_of(s.n.n, m),
                   det_nm > floor ? 0.0 : floor - det_nm, 0.0);
    detail::record(out, "nondegeneracy-nomega", point_of(s.n.n, omega),
                   det_no > floor ? 0.0 : floor - det_no, 0.0);
  }
  return out;
}

inline std::vector<ResidualRecord> suite_identity_22(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double tol = io::tolerance(rc, "identity-22", 1e-13);
  double worst = 0.0;
  Vec6 worst_pt{};
  for (int it = 0; it < rc.verify_samples; ++it) {
    const chart::RotationVector n(smp.ball());
    const Vec3 m = smp.box();
    const double r = poisson::identity_contraction_nm(n, m);
    if (r > worst) {
      worst = r;
      worst_pt = point_of(n.n, m);
    }
  }
  detail::record(out, "identity-22", worst_pt, worst, tol);
  return out;
}

inline std::vector<ResidualRecord> suite_identity_29(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double tol = io::tolerance(rc, "identity-29", 1e-13);
  double worst_diag = 0.0, worst_full = 0.0;
  Vec6 pt_diag{}, pt_full{};
  for (int it = 0; it < rc.verify_samples; ++it) {
    const chart::RotationVector n(smp.ball());
    const Vec3 omega = smp.box();
    const InertiaTensor diag = InertiaTensor::from_principal(smp.principal_moments());
    const InertiaTensor full = smp.inertia();
    const double rd = poisson::identity_contraction_nomega(n, omega, diag);
    const double rf = poisson::identity_contraction_nomega(n, omega, full);
    if (rd > worst_diag) worst_diag = rd, pt_diag = point_of(n.n, omega);
    if (rf > worst_full) worst_full = rf, pt_full = point_of(n.n, omega);
  }
  detail::record(out, "identity-29-diagonal", pt_diag, worst_diag, tol);
  detail::record(out, "identity-29-general", pt_full, worst_full, tol);
  return out;
}

inline std::vector<ResidualRecord> suite_e3_contrast(const io::RunConfig& rc) {
  Sampler smp(rc.seed);
  std::vector<ResidualRecord> out;
  const double tol = io::tolerance(rc, "e3-linear-term", 1e-9);

  // e(3) fixture is degenerate: det exactly 0
  const Vec3 x = smp.ball();
  const Vec3 m = smp.box();
  const double d = poisson::nondegeneracy_check(poisson::e3_poisson(x, m));
  detail::record(out, "e3-determinant", point_of(x, m), d, 0.0);

  // linear term of {n_i, m_j} about the origin is (1/2) eps_ijk, not eps_ijk
  const double h = 1e-6;
  double dev_half = 0.0, dev_e3 = 0.0;
  for (int k = 0; k < 3; ++k) {
    Vec3 np{}, nm{};
    np[k] = h;
    nm[k] = -h;
    const Mat3 bp = chart::a_tilde(chart::RotationVector(np)) * 0.5;
    const Mat3 bm = chart::a_tilde(chart::RotationVector(nm)) * 0.5;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double coeff = (bp(i, j) - bm(i, j)) / (2.0 * h);
        dev_half = std::max(dev_half, std::abs(coeff - 0.5 * levi_civita(i, j, k)));
        dev_e3 = std::max(dev_e3, std::abs(coeff - levi_civita(i, j, k)));
      }
  }
  detail::record(out, "e3-linear-term-half-eps", Vec6{}, dev_half, tol);
  // negative control: the e(3) coefficient does NOT fit; pass means far away
  detail::record(out, "e3-linear-term-not-eps", Vec6{}, dev_e3 >= 0.4 ? 0.0 : 0.4 - dev_e3, 0.0);
  return out;
}

inline std::vector<ResidualRecord> suite_oracle(const io::RunConfig& rc) {
  std::vector<ResidualRecord> out;
  const double tol = io::tolerance(rc, "oracle", 1e-7);
  flows::StepControl ctl = rc.step;

  // symmetric top against the closed-form precession solution at t = 10
  {
    const InertiaTensor inertia = InertiaTensor::from_principal({2.0, 2.0, 1.0});
    const Vec3 omega0{1.0, 0.0, 1.0};
    const auto traj = flows::integrate(dynamics::System::NOmega,
                                       dynamics::BodyRateState{{}, omega0}, inertia, 10.0, ctl, 50);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
      const Vec3 got{s.y[3], s.y[4], s.y[5]};
      worst = std::max(worst, norm(got - flows::symmetric_top_oracle(2.0, 1.0, omega0, s.t)));
    }
    detail::record(out, "oracle-symmetric-top", point_of({}, omega0), worst, tol);
  }

  // spherical body fixed-axis attitude across re-anchors, w t = 10 pi
  {
    const InertiaTensor inertia = InertiaTensor::spherical();
    const Vec3 omega0{0.0, 0.0, 2.0};
    const double t_end = 5.0 * M_PI;
    const auto traj = flows::integrate(dynamics::System::NOmega,
                                       dynamics::BodyRateState{{}, omega0}, inertia, t_end, ctl, 50);
    double worst = 0.0;
    for (const auto& s : traj.samples) {
      const Mat3 r = flows::sample_attitude(s, dynamics::System::NOmega);
      worst = std::max(worst, frobenius_norm(r - flows::fixed_axis_attitude(omega0, s.t)));
    }
    detail::record(out, "oracle-fixed-axis", point_of({}, omega0), worst, tol);
    const double anchors = static_cast<double>(traj.anchors.size()) - 1.0;
    detail::record(out, "oracle-fixed-axis-reanchors", point_of({}, omega0),
                   anchors >= 5.0 ? 0.0 : 5.0 - anchors, 0.0);
  }
  return out;
}

inline std::vector<std::string> suite_names() {
  return {"chart",       "pushforward", "jacobi",      "involution", "nondegeneracy",
          "identity-22", "identity-29", "e3-contrast", "oracle"};
}

inline std::vector<ResidualRecord> run_suite(const std::string& name, const io::RunConfig& rc) {
  if (name == "chart") return suite_chart(rc);
  if (name == "pushforward") return suite_pushforward(rc);
  if (name == "jacobi") return suite_jacobi(rc);
  if (name == "involution") return suite_involution(rc);
  if (name == "nondegeneracy") return suite_nondegeneracy(rc);
  if (name == "identity-22") return suite_identity_22(rc);
  if (name == "identity-29") return suite_identity_29(rc);
  if (name == "e3-contrast") return suite_e3_contrast(rc);
  if (name == "oracle") return suite_oracle(rc);
  if (name == "all") {
    std::vector<ResidualRecord> out;
    for (const auto& n : suite_names()) {
      auto part = run_suite(n, rc);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  throw invalid_input("unknown suite: " + name);
}

}  // namespace rbody::verify

#endif
