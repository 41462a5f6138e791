#include <doctest.h>

#include <cmath>
#include <random>

#include "rbody/poisson.hpp"

using namespace rbody;
using namespace rbody::poisson;
using chart::RotationVector;
using dynamics::CanonicalState;
using dynamics::System;

namespace {

std::mt19937_64 rng(777);

Vec3 random_box(double w = 2.0) {
  std::uniform_real_distribution<double> d(-w, w);
  return {d(rng), d(rng), d(rng)};
}

Vec3 random_unit() {
  while (true) {
    const Vec3 v = random_box(1.0);
    const double r = norm(v);
    if (r > 1e-3 && r <= 1.0) return v * (1.0 / r);
  }
}

InertiaTensor random_inertia() {
  std::uniform_real_distribution<double> mom(0.5, 3.0);
  std::uniform_real_distribution<double> ang(0.0, 3.0);
  const Mat3 orient = chart::rotation_from_axis_angle({random_unit(), ang(rng)});
  while (true) {
    const Vec3 m{mom(rng), mom(rng), mom(rng)};
    if (m.x + m.y >= m.z && m.y + m.z >= m.x && m.z + m.x >= m.y)
      return InertiaTensor::from_principal(m, orient);
  }
}

CanonicalState random_canonical() { return {RotationVector(random_box(3.0)), random_box()}; }

Vec6 point_of(const CanonicalState& s) {
  return {s.n.n.x, s.n.n.y, s.n.n.z, s.pi.x, s.pi.y, s.pi.z};
}

}  // namespace

TEST_CASE("canonical structure blocks and Jacobi") {
  const PoissonMatrix j = canonical_poisson();
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      CHECK(j.J(i, 3 + k) == (i == k ? 1.0 : 0.0));  // {n_i, pi_j} = delta
      CHECK(j.J(i, k) == 0.0);                       // {n_i, n_j} = 0
      CHECK(j.J(3 + i, 3 + k) == 0.0);               // {pi_i, pi_j} = 0
    }
  CHECK(antisymmetry_residual(j) == 0.0);
  CHECK(jacobi_residual([](const Vec6&) { return canonical_poisson(); }, Vec6{}) == 0.0);
}

TEST_CASE("bracket: antisymmetry, canonical pairs, conservation") {
  const PoissonMatrix jc = canonical_poisson();
  Observable n1{[](const Vec6& z) { return z[0]; }, {}};
  Observable pi1{[](const Vec6& z) { return z[3]; }, {}};
  const Vec6 pt = point_of(random_canonical());
  CHECK(bracket(n1, pi1, jc, pt) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(bracket(n1, n1, jc, pt) == 0.0);

  for (int it = 0; it < 50; ++it) {
    const CanonicalState s = random_canonical();
    const InertiaTensor inertia = random_inertia();
    const Observable h = observable_hamiltonian(inertia);
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(bracket(observable_momentum_component(i), h, jc, point_of(s))) < 1e-9);
  }
}

TEST_CASE("bracket is bilinear and Leibniz over products") {
  const PoissonMatrix jc = canonical_poisson();
  Observable f{[](const Vec6& z) { return z[0] * z[4] + z[2]; }, {}};
  Observable g{[](const Vec6& z) { return std::sin(z[1]) + z[3] * z[5]; }, {}};
  Observable k{[](const Vec6& z) { return z[2] * z[2] + z[4]; }, {}};
  Observable gk{[](const Vec6& z) {
                  return (std::sin(z[1]) + z[3] * z[5]) * (z[2] * z[2] + z[4]);
                },
                {}};
  const Vec6 pt = point_of(random_canonical());
  const double lhs = bracket(f, gk, jc, pt);
  const double rhs = bracket(f, g, jc, pt) * k.f(pt) + g.f(pt) * bracket(f, k, jc, pt);
  CHECK(std::abs(lhs - rhs) < 1e-6);
  CHECK(std::abs(bracket(f, g, jc, pt) + bracket(g, f, jc, pt)) < 1e-12);
}

TEST_CASE("registered analytic gradients agree with finite differences") {
  for (int it = 0; it < 20; ++it) {
    const CanonicalState s = random_canonical();
    const InertiaTensor inertia = random_inertia();
    CHECK(gradient_consistency(observable_hamiltonian(inertia), point_of(s)) < 1e-6);
    CHECK(gradient_consistency(observable_momentum_squared(), point_of(s)) < 1e-6);
    for (int i = 0; i < 3; ++i)
      CHECK(gradient_consistency(observable_momentum_component(i), point_of(s)) < 1e-6);
  }
}

TEST_CASE("nm structure at the origin") {
  const Vec3 m{0.4, -1.2, 0.9};
  const PoissonMatrix j = poisson_matrix_nm(RotationVector{}, m);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      CHECK(j.J(i, 3 + k) == doctest::Approx(i == k ? 0.5 : 0.0));
      double eps_m = 0.0;
      for (int l = 0; l < 3; ++l) eps_m += levi_civita(i, k, l) * m[l];
      CHECK(j.J(3 + i, 3 + k) == doctest::Approx(eps_m).epsilon(1e-14));
    }
}

TEST_CASE("nm structure equals the pushforward of the canonical structure") {
  const PoissonMatrix jc = canonical_poisson();
  for (int it = 0; it < 100; ++it) {
    const CanonicalState s = random_canonical();
    const Vec3 m = dynamics::momentum_map(s);
    const PoissonMatrix direct = poisson_matrix_nm(s.n, m);
    const PoissonMatrix pushed =
        pushforward_poisson(jacobian_nm(s.n.n, s.pi), jc, System::NM);
    CHECK(max_abs(direct.J - pushed.J) < 1e-10);
    CHECK(antisymmetry_residual(direct) < 1e-12);
  }
}

TEST_CASE("nomega structure at the origin with unit inertia") {
  const Vec3 omega{1.1, 0.2, -0.7};
  const PoissonMatrix j =
      poisson_matrix_nomega(RotationVector{}, omega, InertiaTensor::spherical());
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      CHECK(j.J(i, 3 + k) == doctest::Approx(i == k ? 0.5 : 0.0));
      double eps_w = 0.0;
      for (int l = 0; l < 3; ++l) eps_w += levi_civita(i, k, l) * omega[l];
      CHECK(j.J(3 + i, 3 + k) == doctest::Approx(-eps_w).epsilon(1e-14));
    }
}

TEST_CASE("nomega structure equals the pushforward of the canonical structure") {
  const PoissonMatrix jc = canonical_poisson();
  for (int it = 0; it < 100; ++it) {
    const CanonicalState s = random_canonical();
    const InertiaTensor inertia = random_inertia();
    const Vec3 omega = dynamics::omega_from_canonical(s, inertia);
    const PoissonMatrix direct = poisson_matrix_nomega(s.n, omega, inertia);
    const PoissonMatrix pushed =
        pushforward_poisson(jacobian_nomega(s.n.n, s.pi, inertia), jc, System::NOmega);
    CHECK(max_abs(direct.J - pushed.J) < 1e-10);
    CHECK(antisymmetry_residual(direct) < 1e-12);
  }
}

TEST_CASE("J grad H reproduces the body-rate equations of motion") {
  for (int it = 0; it < 100; ++it) {
    const CanonicalState s = random_canonical();
    const InertiaTensor inertia = random_inertia();
    const Vec3 omega = dynamics::omega_from_canonical(s, inertia);
    const PoissonMatrix j = poisson_matrix_nomega(s.n, omega, inertia);
    // grad H in (n, Omega): dH/dn = 0, dH/dOmega = I Omega
    const Vec3 big_m = inertia.matrix() * omega;
    const Vec6 grad{0.0, 0.0, 0.0, big_m.x, big_m.y, big_m.z};
    const Vec6 field = j.J * grad;
    const auto [ndot, wdot] = dynamics::body_field({s.n, omega}, inertia);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(field[i] - ndot[i]) < 1e-11);
      CHECK(std::abs(field[3 + i] - wdot[i]) < 1e-11);
    }
  }
}

TEST_CASE("pushforward: identity map, numeric jacobian, singular map") {
  const PoissonMatrix jc = canonical_poisson();
  const PoissonMatrix same = pushforward_poisson(Mat6::identity(), jc, System::NPi);
  CHECK(max_abs(same.J - jc.J) == 0.0);

  // numeric jacobian path matches the analytic one
  const CanonicalState s = random_canonical();
  const auto map = [](const Vec6& z) {
    const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
    const Vec3 m = chart::a_tilde_t(n).transpose() * pi * 0.5;
    return Vec6{n.x, n.y, n.z, m.x, m.y, m.z};
  };
  const Mat6 jnum = numeric_jacobian(map, point_of(s));
  const Mat6 jana = jacobian_nm(s.n.n, s.pi);
  CHECK(max_abs(Mat6{} + jnum - jana) < 1e-8);

  CHECK_THROWS_AS(pushforward_poisson(Mat6{}, jc, System::NPi), degenerate_map_error);
}

TEST_CASE("Jacobi residual: genuine structures pass, corrupted structure fails") {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (int it = 0; it < 20; ++it) {
    const CanonicalState s = random_canonical();
    const InertiaTensor inertia = random_inertia();
    const Vec3 m = dynamics::momentum_map(s);
    const Vec3 omega = dynamics::omega_from_canonical(s, inertia);
    const Vec6 pt_nm{s.n.n.x, s.n.n.y, s.n.n.z, m.x, m.y, m.z};
    const Vec6 pt_no{s.n.n.x, s.n.n.y, s.n.n.z, omega.x, omega.y, omega.z};
    const auto field_nm = [](const Vec6& z) {
      return poisson_matrix_nm(RotationVector{z[0], z[1], z[2]}, Vec3{z[3], z[4], z[5]});
    };
    const auto field_no = [&inertia](const Vec6& z) {
      return poisson_matrix_nomega(RotationVector{z[0], z[1], z[2]}, Vec3{z[3], z[4], z[5]},
                                   inertia);
    };
    CHECK(jacobi_residual(field_nm, pt_nm) < 1e-6);
    CHECK(jacobi_residual(field_no, pt_no) < 1e-6);

    // negative control: flip one sign in the nm structure
    const auto corrupted = [](const Vec6& z) {
      PoissonMatrix p =
          poisson_matrix_nm(RotationVector{z[0], z[1], z[2]}, Vec3{z[3], z[4], z[5]});
      p.J(3, 4) = -p.J(3, 4);
      p.J(4, 3) = -p.J(4, 3);
      return p;
    };
    CHECK(jacobi_residual(corrupted, pt_nm) > 1e-2);
  }
}

TEST_CASE("identity (22): exact vanishing") {
  CHECK(identity_contraction_nm(RotationVector{0.3, 0.4, 0.5}, Vec3{}) == 0.0);
  // n parallel to m
  const Vec3 n = random_unit() * 1.7;
  CHECK(identity_contraction_nm(RotationVector(n), n * 2.5) < 1e-13);
  for (int it = 0; it < 500; ++it)
    CHECK(identity_contraction_nm(RotationVector(random_box(3.0)), random_box()) < 1e-13);
}

TEST_CASE("identity (29): corrected contraction vanishes for any inertia") {
  CHECK(identity_contraction_nomega(RotationVector{0.3, -0.1, 2.0}, Vec3{},
                                    InertiaTensor::spherical()) == 0.0);
  std::uniform_real_distribution<double> mom(0.5, 3.0);
  for (int it = 0; it < 500; ++it) {
    const RotationVector n(random_box(3.0));
    const Vec3 omega = random_box();
    // diagonal inertia
    while (true) {
      const Vec3 m{mom(rng), mom(rng), mom(rng)};
      if (m.x + m.y < m.z || m.y + m.z < m.x || m.z + m.x < m.y) continue;
      CHECK(identity_contraction_nomega(n, omega, InertiaTensor::from_principal(m)) < 1e-13);
      break;
    }
    // general symmetric positive-definite inertia
    CHECK(identity_contraction_nomega(n, omega, random_inertia()) < 1e-13);
  }
}

TEST_CASE("involution suite residuals") {
  for (int it = 0; it < 100; ++it) {
    const CanonicalState s = random_canonical();
    const InertiaTensor inertia = random_inertia();
    CHECK(involution_suite(s, inertia).max() < 1e-9);
  }

  // spherical body: {Omega_i, H} = 0 via a brute-force bracket on observables
  const InertiaTensor sph = InertiaTensor::spherical();
  const PoissonMatrix jc = canonical_poisson();
  for (int it = 0; it < 20; ++it) {
    const CanonicalState s = random_canonical();
    const Observable h = observable_hamiltonian(sph);
    for (int i = 0; i < 3; ++i) {
      Observable omega_i{[i](const Vec6& z) {
                           const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
                           return 0.5 * (chart::a_tilde_t(n) * pi)[i];
                         },
                         {}};
      // omega_i has no registered gradient; the residual floor is the
      // finite-difference truncation error, not rounding.
      CHECK(std::abs(bracket(omega_i, h, jc, point_of(s))) < 1e-6);
    }
  }
}

TEST_CASE("nondegeneracy: rotation-vector structures vs e(3) fixture") {
  CHECK(nondegeneracy_check(canonical_poisson()) == doctest::Approx(1.0));

  for (int it = 0; it < 100; ++it) {
    const CanonicalState s = random_canonical();
    const InertiaTensor inertia = random_inertia();
    const Vec3 m = dynamics::momentum_map(s);
    const Vec3 omega = dynamics::omega_from_canonical(s, inertia);
    const double det_nm = nondegeneracy_check(poisson_matrix_nm(s.n, m));
    CHECK(det_nm > 1e-12);
    // det J' = det(Jac)^2 det J
    const double jac_det = det(jacobian_nm(s.n.n, s.pi));
    CHECK(det_nm == doctest::Approx(jac_det * jac_det).epsilon(1e-8));
    CHECK(nondegeneracy_check(poisson_matrix_nomega(s.n, omega, inertia)) > 1e-12);
  }

  const double e3_det = nondegeneracy_check(e3_poisson(random_box(), random_box()));
  CHECK(e3_det == 0.0);
}

TEST_CASE("linear term of {n_i, m_j} about the origin is half eps") {
  const double h = 1e-7;
  for (int k = 0; k < 3; ++k) {
    Vec3 np{}, nm{};
    np[k] = h;
    nm[k] = -h;
    const Vec3 m{0.6, -0.2, 1.0};
    const PoissonMatrix jp = poisson_matrix_nm(RotationVector(np), m);
    const PoissonMatrix jm = poisson_matrix_nm(RotationVector(nm), m);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double coeff = (jp.J(i, 3 + j) - jm.J(i, 3 + j)) / (2 * h);
        CHECK(std::abs(coeff - 0.5 * levi_civita(i, j, k)) < 1e-7);
      }
  }
}
