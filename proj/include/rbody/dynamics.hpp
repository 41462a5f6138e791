#ifndef RBODY_DYNAMICS_HPP
#define RBODY_DYNAMICS_HPP

#include <string>
#include <utility>
#include <variant>

#include "rbody/chart.hpp"
#include "rbody/errors.hpp"
#include "rbody/inertia.hpp"
#include "rbody/linalg.hpp"

namespace rbody::dynamics {

using chart::RotationVector;

enum class System { NPi, NM, NOmega, EulerPoisson };

inline const char* system_name(System s) {
  switch (s) {
    case System::NPi: return "n-pi";
    case System::NM: return "n-m";
    case System::NOmega: return "n-omega";
    case System::EulerPoisson: return "euler-poisson";
  }
  return "?";
}

inline System system_from_name(const std::string& name) {
  if (name == "n-pi") return System::NPi;
  if (name == "n-m") return System::NM;
  if (name == "n-omega") return System::NOmega;
  if (name == "euler-poisson") return System::EulerPoisson;
  throw invalid_input("unknown coordinate system: " + name);
}

/// (n, pi): rotation vector with its conjugate momentum.
struct CanonicalState {
  RotationVector n;
  Vec3 pi;
};

/// (n, m): rotation vector with the conserved angular momentum.
struct MomentumState {
  RotationVector n;
  Vec3 m;
};

/// (n, Omega): rotation vector with the angular velocity in the body.
struct BodyRateState {
  RotationVector n;
  Vec3 omega;
};

/// (R, Omega): the direct Euler-Poisson variables.
struct EulerPoissonState {
  Mat3 R;
  Vec3 omega;
};

/// Tagged value in one of the four coordinate systems. Conversions are always
/// explicit; see convert().
using PhaseState = std::variant<CanonicalState, MomentumState, BodyRateState, EulerPoissonState>;

inline System system_of(const PhaseState& s) {
  switch (s.index()) {
    case 0: return System::NPi;
    case 1: return System::NM;
    case 2: return System::NOmega;
    default: return System::EulerPoisson;
  }
}

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

/// H = (1/2) pi^T G^{-1} pi = (1/8) (A~ pi)^T I^{-1} (A~ pi).
inline double hamiltonian_canonical(const CanonicalState& s, const InertiaTensor& inertia) {
  const Vec3 w = chart::a_tilde(s.n) * s.pi;
  return 0.125 * dot(w, inertia.inverse_matrix() * w);
}

/// H = (1/2) m^T (R I^{-1} R^T) m.
inline double hamiltonian_momentum(const MomentumState& s, const InertiaTensor& inertia) {
  const Mat3 r = chart::rotation_matrix(s.n);
  const Vec3 w = r.transpose() * s.m;
  return 0.5 * dot(w, inertia.inverse_matrix() * w);
}

/// H = (1/2) Omega^T I Omega.
inline double hamiltonian_body(const BodyRateState& s, const InertiaTensor& inertia) {
  return 0.5 * dot(s.omega, inertia.matrix() * s.omega);
}

inline double hamiltonian_euler_poisson(const EulerPoissonState& s, const InertiaTensor& inertia) {
  return 0.5 * dot(s.omega, inertia.matrix() * s.omega);
}

inline double hamiltonian(const PhaseState& s, const InertiaTensor& inertia) {
  return std::visit(
      [&](const auto& st) -> double {
        using T = std::decay_t<decltype(st)>;
        if constexpr (std::is_same_v<T, CanonicalState>) return hamiltonian_canonical(st, inertia);
        else if constexpr (std::is_same_v<T, MomentumState>) return hamiltonian_momentum(st, inertia);
        else if constexpr (std::is_same_v<T, BodyRateState>) return hamiltonian_body(st, inertia);
        else return hamiltonian_euler_poisson(st, inertia);
      },
      s);
}

// ---------------------------------------------------------------------------
// Vector fields
// ---------------------------------------------------------------------------

/// Canonical equations of motion, polynomial in (n, pi). Obtained by
/// differentiating the Hamiltonian through the canonical brackets:
///   ndot = (1/4) A~^T u,   pidot = -(1/4)[(n.pi) u + (n.u) pi + u x pi],
/// with u = I^{-1} A~ pi.
template <class T>
std::pair<TVec3<T>, TVec3<T>> canonical_field_t(const TVec3<T>& n, const TVec3<T>& pi,
                                                const Mat3& inertia_inverse) {
  const TMat3<T> at = chart::a_tilde_t(n);
  const TVec3<T> w = at * pi;
  TVec3<T> u;
  for (int i = 0; i < 3; ++i)
    u[i] = w.x * inertia_inverse(i, 0) + w.y * inertia_inverse(i, 1) + w.z * inertia_inverse(i, 2);
  const TVec3<T> ndot = (at.transpose() * u) * 0.25;
  const T npi = dot(n, pi);
  const T nu = dot(n, u);
  const TVec3<T> pidot = (u * npi + pi * nu + cross(u, pi)) * (-0.25);
  return {ndot, pidot};
}

inline std::pair<Vec3, Vec3> canonical_field(const CanonicalState& s, const InertiaTensor& inertia) {
  return canonical_field_t(s.n.n, s.pi, inertia.inverse_matrix());
}

/// ndot = (1/2) A~^T I^{-1} R^T m; mdot = 0 exactly.
inline std::pair<Vec3, Vec3> momentum_field(const MomentumState& s, const InertiaTensor& inertia) {
  const Vec3 ndot = chart::a_tilde(s.n).transpose() *
                    (inertia.inverse_matrix() * (chart::rotation_matrix(s.n).transpose() * s.m)) *
                    0.5;
  return {ndot, Vec3{0.0, 0.0, 0.0}};
}

/// ndot = (1/2) A~^T Omega; I Omegadot = (I Omega) x Omega  (Euler equations).
inline std::pair<Vec3, Vec3> body_field(const BodyRateState& s, const InertiaTensor& inertia) {
  const Vec3 ndot = chart::a_tilde(s.n).transpose() * s.omega * 0.5;
  const Vec3 omegadot = inertia.inverse_matrix() * cross(inertia.matrix() * s.omega, s.omega);
  return {ndot, omegadot};
}

/// Rdot = -R hat(Omega)  (componentwise Rdot_ij = -eps_jkm Omega_k R_im);
/// I Omegadot = (I Omega) x Omega.
inline std::pair<Mat3, Vec3> euler_poisson_field(const EulerPoissonState& s,
                                                 const InertiaTensor& inertia) {
  const Mat3 rdot = s.R * hat(s.omega) * -1.0;
  const Vec3 omegadot = inertia.inverse_matrix() * cross(inertia.matrix() * s.omega, s.omega);
  return {rdot, omegadot};
}

// ---------------------------------------------------------------------------
// Momentum map and conversions
// ---------------------------------------------------------------------------

/// m = (1/2) A~^T pi = (1/2)[pi + (n.pi) n + n x pi]; never reads the inertia
/// tensor.
inline Vec3 momentum_map(const CanonicalState& s) {
  return chart::a_tilde(s.n).transpose() * s.pi * 0.5;
}

/// pi = 2 A^T m, the inverse of the momentum map at fixed n.
inline Vec3 momentum_inverse(const RotationVector& n, const Vec3& m) {
  return chart::a_matrix(n).transpose() * m * 2.0;
}

/// Angular velocity from canonical variables: Omega = (1/2) I^{-1} A~ pi.
inline Vec3 omega_from_canonical(const CanonicalState& s, const InertiaTensor& inertia) {
  return inertia.inverse_matrix() * (chart::a_tilde(s.n) * s.pi) * 0.5;
}

/// The four equivalent kinetic-energy quadratic forms evaluated from a body
/// rate state: in Omega, m, spatial omega, and body momentum M.
struct EnergyForms {
  double from_omega, from_m, from_spatial_omega, from_body_momentum;
};

inline EnergyForms energy_forms(const BodyRateState& s, const InertiaTensor& inertia) {
  const Mat3 r = chart::rotation_matrix(s.n);
  const Vec3 big_m = inertia.matrix() * s.omega;  // M = I Omega
  const Vec3 m = r * big_m;                       // m = R I Omega
  const Vec3 omega_sp = r * s.omega;              // spatial angular velocity
  EnergyForms e{};
  e.from_omega = 0.5 * dot(s.omega, inertia.matrix() * s.omega);
  e.from_m = 0.5 * dot(r.transpose() * m, inertia.inverse_matrix() * (r.transpose() * m));
  e.from_spatial_omega = 0.5 * dot(r.transpose() * omega_sp, inertia.matrix() * (r.transpose() * omega_sp));
  e.from_body_momentum = 0.5 * dot(big_m, inertia.inverse_matrix() * big_m);
  return e;
}

/// Explicit conversion between the four coordinate systems. Goes through the
/// body angular velocity as the hub variable; chart targets from an
/// Euler-Poisson state fail with chart_boundary_error near alpha = pi.
inline PhaseState convert(const PhaseState& s, System target, const InertiaTensor& inertia) {
  // Extract (attitude, Omega). Chart states keep their rotation vector.
  RotationVector n;
  Vec3 omega;
  bool have_chart = true;
  Mat3 attitude;

  if (const auto* c = std::get_if<CanonicalState>(&s)) {
    n = c->n;
    omega = omega_from_canonical(*c, inertia);
  } else if (const auto* m = std::get_if<MomentumState>(&s)) {
    n = m->n;
    omega = inertia.inverse_matrix() * (chart::rotation_matrix(m->n).transpose() * m->m);
  } else if (const auto* b = std::get_if<BodyRateState>(&s)) {
    n = b->n;
    omega = b->omega;
  } else {
    const auto& ep = std::get<EulerPoissonState>(s);
    have_chart = false;
    attitude = ep.R;
    omega = ep.omega;
    if (target != System::EulerPoisson)
      n = chart::rotation_vector_from_axis_angle(chart::axis_angle_from_rotation(ep.R));
  }

  switch (target) {
    case System::NPi:
      return CanonicalState{n, chart::a_matrix(n) * (inertia.matrix() * omega) * 2.0};
    case System::NM:
      return MomentumState{n, chart::rotation_matrix(n) * (inertia.matrix() * omega)};
    case System::NOmega:
      return BodyRateState{n, omega};
    case System::EulerPoisson:
      if (have_chart) attitude = chart::rotation_matrix(n);
      return EulerPoissonState{attitude, omega};
  }
  throw invalid_input("convert: unknown target system");
}

}  // namespace rbody::dynamics

#endif
