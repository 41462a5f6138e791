#ifndef RBODY_POISSON_HPP
#define RBODY_POISSON_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rbody/dynamics.hpp"
#include "rbody/errors.hpp"
#include "rbody/inertia.hpp"
#include "rbody/linalg.hpp"

namespace rbody::poisson {

using dynamics::System;

/// 6x6 antisymmetric structure matrix evaluated at a phase point, tagged with
/// the coordinate system its blocks refer to.
struct PoissonMatrix {
  Mat6 J;
  System coords = System::NPi;
};

inline double antisymmetry_residual(const PoissonMatrix& p) {
  return max_abs(p.J + p.J.transpose());
}

/// Constant canonical structure [[0, 1], [-1, 0]] in (n, pi).
inline PoissonMatrix canonical_poisson() {
  PoissonMatrix p;
  p.coords = System::NPi;
  for (int i = 0; i < 3; ++i) {
    p.J(i, 3 + i) = 1.0;
    p.J(3 + i, i) = -1.0;
  }
  return p;
}

/// T_ijk = nhat_ij n_k + nhat_jk n_i + nhat_ki n_j with nhat_ij = eps_ijp n_p.
inline double cyclic_tensor(const Vec3& n, int i, int j, int k) {
  const Mat3 nh = hat(n);
  return nh(i, j) * n[k] + nh(j, k) * n[i] + nh(k, i) * n[j];
}

/// Structure in (n, m):
///   {n_i, n_j} = 0,  {n_i, m_j} = (1/2) A~_ij,
///   {m_i, m_j} = [eps_ijk m_k + T_ijk m_k] / (1 + n^2).
inline PoissonMatrix poisson_matrix_nm(const chart::RotationVector& rv, const Vec3& m) {
  PoissonMatrix p;
  p.coords = System::NM;
  const Mat3 b = chart::a_tilde(rv) * 0.5;
  const double denom = 1.0 + dot(rv.n, rv.n);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      p.J(i, 3 + j) = b(i, j);
      p.J(3 + j, i) = -b(i, j);
      double c = 0.0;
      for (int k = 0; k < 3; ++k)
        c += (levi_civita(i, j, k) + cyclic_tensor(rv.n, i, j, k)) * m[k];
      p.J(3 + i, 3 + j) = c / denom;
    }
  return p;
}

/// Structure in (n, Omega):
///   {n_i, Omega_j} = (1/2)(A~^T I^{-1})_ij,
///   {Omega_i, Omega_j} = -(I^{-1})_ia (I^{-1})_jb [eps_abc + T_abc](I Omega)_c / (1+n^2).
inline PoissonMatrix poisson_matrix_nomega(const chart::RotationVector& rv, const Vec3& omega,
                                           const InertiaTensor& inertia) {
  PoissonMatrix p;
  p.coords = System::NOmega;
  const Mat3& iinv = inertia.inverse_matrix();
  const Mat3 b = chart::a_tilde(rv).transpose() * iinv * 0.5;
  const Vec3 big_m = inertia.matrix() * omega;
  const double denom = 1.0 + dot(rv.n, rv.n);
  Mat3 core;  // [eps_abc + T_abc] (I Omega)_c
  for (int a = 0; a < 3; ++a)
    for (int bb = 0; bb < 3; ++bb) {
      double c = 0.0;
      for (int k = 0; k < 3; ++k)
        c += (levi_civita(a, bb, k) + cyclic_tensor(rv.n, a, bb, k)) * big_m[k];
      core(a, bb) = c;
    }
  const Mat3 cmat = iinv * core * iinv.transpose() * (-1.0 / denom);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      p.J(i, 3 + j) = b(i, j);
      p.J(3 + j, i) = -b(i, j);
      p.J(3 + i, 3 + j) = cmat(i, j);
    }
  return p;
}

/// Standard e(3) fixture {x_i, x_j} = 0, {x_i, m_j} = eps_ijk x_k,
/// {m_i, m_j} = eps_ijk m_k. Degenerate; the contrast case for the
/// rotation-vector structures.
inline PoissonMatrix e3_poisson(const Vec3& x, const Vec3& m) {
  PoissonMatrix p;
  p.coords = System::NM;
  const Mat3 bx = hat(x);
  const Mat3 bm = hat(m);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      p.J(i, 3 + j) = bx(i, j);
      p.J(3 + j, i) = -bx(i, j);
      p.J(3 + i, 3 + j) = bm(i, j);
    }
  return p;
}

// ---------------------------------------------------------------------------
// Observables and numeric brackets
// ---------------------------------------------------------------------------

/// Scalar function of a 6-component phase point; gradient optional.
struct Observable {
  std::function<double(const Vec6&)> f;
  std::function<Vec6(const Vec6&)> grad;  // empty => central finite differences
};

inline Vec6 numeric_gradient(const std::function<double(const Vec6&)>& f, const Vec6& z,
                             double step = 1e-6) {
  Vec6 g{};
  for (int k = 0; k < 6; ++k) {
    Vec6 zp = z, zm = z;
    zp[k] += step;
    zm[k] -= step;
    const double fp = f(zp), fm = f(zm);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw numeric_error("bracket: finite-difference gradient overflowed");
    g[k] = (fp - fm) / (2.0 * step);
  }
  return g;
}

inline Vec6 gradient(const Observable& o, const Vec6& z) {
  return o.grad ? o.grad(z) : numeric_gradient(o.f, z);
}

/// Residual between a registered analytic gradient and central differences.
inline double gradient_consistency(const Observable& o, const Vec6& z) {
  if (!o.grad) return 0.0;
  const Vec6 a = o.grad(z);
  const Vec6 n = numeric_gradient(o.f, z);
  double r = 0.0;
  for (int k = 0; k < 6; ++k) r = std::max(r, std::abs(a[k] - n[k]));
  return r;
}

/// {f, g} = (grad f)^T J (grad g) at the given point.
inline double bracket(const Observable& f, const Observable& g, const PoissonMatrix& j,
                      const Vec6& point) {
  const Vec6 gf = gradient(f, point);
  const Vec6 gg = gradient(g, point);
  const Vec6 jg = j.J * gg;
  double s = 0.0;
  for (int k = 0; k < 6; ++k) s += gf[k] * jg[k];
  return s;
}

// ---------------------------------------------------------------------------
// Pushforward and validity checks
// ---------------------------------------------------------------------------

/// J' = (dz'/dz) J (dz'/dz)^T for an invertible coordinate change.
inline PoissonMatrix pushforward_poisson(const Mat6& jacobian, const PoissonMatrix& j,
                                         System out_coords, double* condition = nullptr) {
  const double d = det(jacobian);
  if (std::abs(d) < 1e-12) throw degenerate_map_error("pushforward_poisson: singular jacobian");
  if (condition) *condition = condition_estimate(jacobian);
  PoissonMatrix out;
  out.coords = out_coords;
  out.J = jacobian * j.J * jacobian.transpose();
  return out;
}

/// Jacobian of a phase-space map by central finite differences.
inline Mat6 numeric_jacobian(const std::function<Vec6(const Vec6&)>& map, const Vec6& z,
                             double step = 1e-6) {
  Mat6 jac;
  for (int k = 0; k < 6; ++k) {
    Vec6 zp = z, zm = z;
    zp[k] += step;
    zm[k] -= step;
    const Vec6 fp = map(zp), fm = map(zm);
    for (int i = 0; i < 6; ++i) jac(i, k) = (fp[i] - fm[i]) / (2.0 * step);
  }
  return jac;
}

/// Analytic jacobian of (n, pi) -> (n, m).
inline Mat6 jacobian_nm(const Vec3& n, const Vec3& pi) {
  Mat6 jac;
  for (int i = 0; i < 3; ++i) jac(i, i) = 1.0;
  const Mat3 dpim = chart::a_tilde_t(n).transpose() * 0.5;  // dm/dpi
  const double npi = dot(n, pi);
  for (int j = 0; j < 3; ++j) {
    Vec3 ej{};
    ej[j] = 1.0;
    const Vec3 col = (ej * npi + n * pi[j] + cross(ej, pi)) * 0.5;  // dm/dn_j
    for (int i = 0; i < 3; ++i) {
      jac(3 + i, j) = col[i];
      jac(3 + i, 3 + j) = dpim(i, j);
    }
  }
  return jac;
}

/// Analytic jacobian of (n, pi) -> (n, Omega), Omega = (1/2) I^{-1} A~ pi.
inline Mat6 jacobian_nomega(const Vec3& n, const Vec3& pi, const InertiaTensor& inertia) {
  Mat6 jac;
  for (int i = 0; i < 3; ++i) jac(i, i) = 1.0;
  const Mat3& iinv = inertia.inverse_matrix();
  const Mat3 dpio = iinv * chart::a_tilde_t(n) * 0.5;  // dOmega/dpi
  const double npi = dot(n, pi);
  for (int j = 0; j < 3; ++j) {
    Vec3 ej{};
    ej[j] = 1.0;
    // d(A~ pi)/dn_j = (n.pi) e_j + pi_j n + pi x e_j
    const Vec3 col = iinv * ((ej * npi + n * pi[j] + cross(pi, ej)) * 0.5);
    for (int i = 0; i < 3; ++i) {
      jac(3 + i, j) = col[i];
      jac(3 + i, 3 + j) = dpio(i, j);
    }
  }
  return jac;
}

/// Max cyclic Jacobi residual |J^{al} d_l J^{bc} + cycle(abc)| over index
/// triples, with entry derivatives by central finite differences.
inline double jacobi_residual(const std::function<PoissonMatrix(const Vec6&)>& field,
                              const Vec6& point, double step = 1e-5) {
  // dJ[l](b,c) = d J_bc / d z_l
  std::array<Mat6, 6> dj;
  for (int l = 0; l < 6; ++l) {
    Vec6 zp = point, zm = point;
    zp[l] += step;
    zm[l] -= step;
    const Mat6 jp = field(zp).J, jm = field(zm).J;
    for (int i = 0; i < 36; ++i) dj[l].a[i] = (jp.a[i] - jm.a[i]) / (2.0 * step);
  }
  const Mat6 j = field(point).J;
  double worst = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (int c = b + 1; c < 6; ++c) {
        double s = 0.0;
        for (int l = 0; l < 6; ++l)
          s += j(a, l) * dj[l](b, c) + j(b, l) * dj[l](c, a) + j(c, l) * dj[l](a, b);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

// ---------------------------------------------------------------------------
// Exact identities and involution
// ---------------------------------------------------------------------------

/// Max over the free index of |T_ijk m_k m_j|; vanishes identically.
inline double identity_contraction_nm(const chart::RotationVector& rv, const Vec3& m) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) s += cyclic_tensor(rv.n, i, j, k) * m[k] * m[j];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

/// Max over the free index of |T_abc (I Omega)_c Omega_b - n^2 eps_abc (I Omega)_c Omega_b|.
/// This is the contraction identity actually required to reduce Hamilton's
/// equations in (n, Omega) to the Euler equations; it vanishes for any
/// symmetric positive-definite inertia tensor.
inline double identity_contraction_nomega(const chart::RotationVector& rv, const Vec3& omega,
                                          const InertiaTensor& inertia) {
  const Vec3 big_m = inertia.matrix() * omega;
  const double n2 = dot(rv.n, rv.n);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a) {
    double s = 0.0;
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        s += (cyclic_tensor(rv.n, a, b, c) - n2 * levi_civita(a, b, c)) * big_m[c] * omega[b];
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

/// Standard observables on canonical phase points z = (n, pi), with analytic
/// gradients.
inline Observable observable_hamiltonian(const InertiaTensor& inertia) {
  const Mat3 iinv = inertia.inverse_matrix();
  Observable o;
  o.f = [iinv](const Vec6& z) {
    const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
    const Vec3 w = chart::a_tilde_t(n) * pi;
    return 0.125 * dot(w, iinv * w);
  };
  o.grad = [iinv](const Vec6& z) {
    const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
    auto [ndot, pidot] = dynamics::canonical_field_t(n, pi, iinv);
    // dH/dpi = ndot, dH/dn = -pidot for the canonical structure
    return Vec6{-pidot.x, -pidot.y, -pidot.z, ndot.x, ndot.y, ndot.z};
  };
  return o;
}

inline Observable observable_momentum_component(int i) {
  Observable o;
  o.f = [i](const Vec6& z) {
    const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
    return 0.5 * (chart::a_tilde_t(n).transpose() * pi)[i];
  };
  o.grad = [i](const Vec6& z) {
    const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
    const Mat6 jac = jacobian_nm(n, pi);
    Vec6 g{};
    for (int k = 0; k < 6; ++k) g[k] = jac(3 + i, k);
    return g;
  };
  return o;
}

inline Observable observable_momentum_squared() {
  Observable o;
  o.f = [](const Vec6& z) {
    const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
    const Vec3 m = chart::a_tilde_t(n).transpose() * pi * 0.5;
    return dot(m, m);
  };
  o.grad = [](const Vec6& z) {
    const Vec3 n{z[0], z[1], z[2]}, pi{z[3], z[4], z[5]};
    const Vec3 m = chart::a_tilde_t(n).transpose() * pi * 0.5;
    const Mat6 jac = jacobian_nm(n, pi);
    Vec6 g{};
    for (int k = 0; k < 6; ++k)
      for (int i = 0; i < 3; ++i) g[k] += 2.0 * m[i] * jac(3 + i, k);
    return g;
  };
  return o;
}

/// One residual per involution / conservation bracket at a canonical point.
struct InvolutionReport {
  double m_h[3];   // |{m_i, H}|
  double m_m2[3];  // |{m_i, m^2}|
  double h_m2;     // |{H, m^2}|
  double h_m3;     // |{H, m_3}|
  double m3_m2;    // |{m_3, m^2}|
  double max() const {
    double w = std::max(h_m2, std::max(h_m3, m3_m2));
    for (int i = 0; i < 3; ++i) w = std::max(w, std::max(m_h[i], m_m2[i]));
    return w;
  }
};

inline InvolutionReport involution_suite(const dynamics::CanonicalState& s,
                                         const InertiaTensor& inertia) {
  const Vec6 z{s.n.n.x, s.n.n.y, s.n.n.z, s.pi.x, s.pi.y, s.pi.z};
  const PoissonMatrix jc = canonical_poisson();
  const Observable h = observable_hamiltonian(inertia);
  const Observable m2 = observable_momentum_squared();
  const Observable m3 = observable_momentum_component(2);
  InvolutionReport rep{};
  for (int i = 0; i < 3; ++i) {
    const Observable mi = observable_momentum_component(i);
    rep.m_h[i] = std::abs(bracket(mi, h, jc, z));
    rep.m_m2[i] = std::abs(bracket(mi, m2, jc, z));
  }
  rep.h_m2 = std::abs(bracket(h, m2, jc, z));
  rep.h_m3 = std::abs(bracket(h, m3, jc, z));
  rep.m3_m2 = std::abs(bracket(m3, m2, jc, z));
  return rep;
}

/// |det J|; nonzero means no Casimir functions exist for the structure.
inline double nondegeneracy_check(const PoissonMatrix& p) { return std::abs(det(p.J)); }

/// Signed Pfaffian via sqrt(det) with the sign of the canonical orientation.
inline double pfaffian_magnitude(const PoissonMatrix& p) {
  const double d = det(p.J);
  return d <= 0.0 ? 0.0 : std::sqrt(d);
}

/// Flat record for the CLI's verify output.
struct ResidualRecord {
  std::string check;
  Vec6 point{};
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

}  // namespace rbody::poisson

#endif
