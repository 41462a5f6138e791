#ifndef RBODY_FLOWS_HPP
#define RBODY_FLOWS_HPP

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rbody/dynamics.hpp"
#include "rbody/errors.hpp"
#include "rbody/inertia.hpp"
#include "rbody/jet.hpp"
#include "rbody/linalg.hpp"

namespace rbody::flows {

using dynamics::CanonicalState;
using dynamics::PhaseState;
using dynamics::System;

// ---------------------------------------------------------------------------
// Anchored attitude
// ---------------------------------------------------------------------------

/// Attitude factored as R_anchor * R(n_rel); re-anchoring keeps n_rel away
/// from the alpha = pi chart boundary without changing the physical attitude.
struct AnchoredAttitude {
  Mat3 R_anchor = Mat3::identity();
  chart::RotationVector n_rel;
};

inline Mat3 attitude(const AnchoredAttitude& a) {
  return a.R_anchor * chart::rotation_matrix(a.n_rel);
}

/// Absorb the accumulated chart rotation into the anchor; physical attitude
/// unchanged, n_rel reset to the origin.
inline AnchoredAttitude reanchor(const AnchoredAttitude& a) {
  return {attitude(a), chart::RotationVector{}};
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct Sample {
  double t = 0.0;
  std::vector<double> y;   // chart systems: (n, v); euler-poisson: (R row-major, omega)
  std::vector<double> dy;  // field evaluated at y
  Mat3 anchor = Mat3::identity();
};

struct AnchorEvent {
  double t = 0.0;
  Mat3 R_anchor = Mat3::identity();
};

struct Trajectory {
  System system = System::NPi;
  std::vector<Sample> samples;       // on the requested output grid
  std::vector<AnchorEvent> anchors;  // anchor log, first entry at t = 0
  long accepted_steps = 0;
  long rejected_steps = 0;
  double max_ortho_residual = 0.0;   // euler-poisson lane drift observable
};

struct StepControl {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double h_init = 1e-3;
  double reanchor_threshold_sq = 9.0;
  bool reanchor_enabled = true;
  bool project_orthogonal = false;  // euler-poisson lane re-projection
};

inline std::vector<double> pack(const PhaseState& s) {
  if (const auto* c = std::get_if<dynamics::CanonicalState>(&s))
    return {c->n.n.x, c->n.n.y, c->n.n.z, c->pi.x, c->pi.y, c->pi.z};
  if (const auto* m = std::get_if<dynamics::MomentumState>(&s))
    return {m->n.n.x, m->n.n.y, m->n.n.z, m->m.x, m->m.y, m->m.z};
  if (const auto* b = std::get_if<dynamics::BodyRateState>(&s))
    return {b->n.n.x, b->n.n.y, b->n.n.z, b->omega.x, b->omega.y, b->omega.z};
  const auto& ep = std::get<dynamics::EulerPoissonState>(s);
  std::vector<double> y(ep.R.a.begin(), ep.R.a.end());
  y.insert(y.end(), {ep.omega.x, ep.omega.y, ep.omega.z});
  return y;
}

inline PhaseState unpack(System sys, const std::vector<double>& y) {
  if (sys == System::EulerPoisson) {
    dynamics::EulerPoissonState ep;
    std::copy(y.begin(), y.begin() + 9, ep.R.a.begin());
    ep.omega = {y[9], y[10], y[11]};
    return ep;
  }
  const chart::RotationVector n{y[0], y[1], y[2]};
  const Vec3 v{y[3], y[4], y[5]};
  switch (sys) {
    case System::NPi: return dynamics::CanonicalState{n, v};
    case System::NM: return dynamics::MomentumState{n, v};
    default: return dynamics::BodyRateState{n, v};
  }
}

/// Physical attitude of a trajectory sample.
inline Mat3 sample_attitude(const Sample& s, System sys) {
  if (sys == System::EulerPoisson) {
    Mat3 r;
    std::copy(s.y.begin(), s.y.begin() + 9, r.a.begin());
    return r;
  }
  return s.anchor * chart::rotation_matrix(chart::RotationVector{s.y[0], s.y[1], s.y[2]});
}

struct SampleInvariants {
  double energy = 0.0;
  Vec3 m_spatial;            // physical (inertial-frame) angular momentum
  double ortho_residual = 0.0;
};

inline SampleInvariants sample_invariants(const Sample& s, System sys,
                                          const InertiaTensor& inertia) {
  SampleInvariants out;
  const PhaseState st = unpack(sys, s.y);
  out.energy = dynamics::hamiltonian(st, inertia);
  if (sys == System::EulerPoisson) {
    const auto& ep = std::get<dynamics::EulerPoissonState>(st);
    out.m_spatial = ep.R * (inertia.matrix() * ep.omega);
    out.ortho_residual = orthogonality_residual(ep.R);
  } else {
    const auto b = std::get<dynamics::BodyRateState>(dynamics::convert(st, System::NOmega, inertia));
    const Vec3 m_chart = chart::rotation_matrix(b.n) * (inertia.matrix() * b.omega);
    out.m_spatial = s.anchor * m_chart;
    out.ortho_residual = orthogonality_residual(sample_attitude(s, sys));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrator: classic 4th-order with step-doubling control and local
// extrapolation; dense output by cubic Hermite interpolation.
// ---------------------------------------------------------------------------

namespace detail {

using RawField = std::function<void(const std::vector<double>&, std::vector<double>&)>;

inline void rk4(const RawField& f, const std::vector<double>& y, const std::vector<double>& k1,
                double h, std::vector<double>& out, std::vector<double>& scratch1,
                std::vector<double>& scratch2) {
  const std::size_t n = y.size();
  std::vector<double>& k = scratch1;
  std::vector<double>& tmp = scratch2;
  out.assign(y.begin(), y.end());
  for (std::size_t i = 0; i < n; ++i) out[i] += h / 6.0 * k1[i];
  // k2
  tmp.resize(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  f(tmp, k);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += h / 3.0 * k[i];
    tmp[i] = y[i] + 0.5 * h * k[i];
  }
  // k3
  f(tmp, k);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] += h / 3.0 * k[i];
    tmp[i] = y[i] + h * k[i];
  }
  // k4
  f(tmp, k);
  for (std::size_t i = 0; i < n; ++i) out[i] += h / 6.0 * k[i];
}

inline void hermite(const Sample& a, const Sample& b, double t, std::vector<double>& out) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  out.resize(a.y.size());
  for (std::size_t i = 0; i < a.y.size(); ++i)
    out[i] = h00 * a.y[i] + h * h10 * a.dy[i] + h01 * b.y[i] + h * h11 * b.dy[i];
}

}  // namespace detail

/// Propagate a state to t_end, sampling on a uniform grid of grid_count
/// intervals. Chart systems are re-anchored whenever |n|^2 exceeds the
/// configured threshold; with re-anchoring disabled the run aborts before the
/// chart boundary.
inline Trajectory integrate(System sys, const PhaseState& state0, const InertiaTensor& inertia,
                            double t_end, const StepControl& ctl = {}, int grid_count = 100) {
  if (!(t_end > 0.0)) throw invalid_input("integrate: t_end must be positive");
  if (dynamics::system_of(state0) != sys)
    throw invalid_input("integrate: initial state does not match the requested system");

  detail::RawField field = [sys, &inertia](const std::vector<double>& y,
                                           std::vector<double>& dy) {
    dy.resize(y.size());
    const PhaseState st = unpack(sys, y);
    if (sys == System::EulerPoisson) {
      const auto [rdot, wdot] =
          dynamics::euler_poisson_field(std::get<dynamics::EulerPoissonState>(st), inertia);
      std::copy(rdot.a.begin(), rdot.a.end(), dy.begin());
      dy[9] = wdot.x;
      dy[10] = wdot.y;
      dy[11] = wdot.z;
      return;
    }
    std::pair<Vec3, Vec3> f;
    if (sys == System::NPi)
      f = dynamics::canonical_field(std::get<dynamics::CanonicalState>(st), inertia);
    else if (sys == System::NM)
      f = dynamics::momentum_field(std::get<dynamics::MomentumState>(st), inertia);
    else
      f = dynamics::body_field(std::get<dynamics::BodyRateState>(st), inertia);
    dy[0] = f.first.x;
    dy[1] = f.first.y;
    dy[2] = f.first.z;
    dy[3] = f.second.x;
    dy[4] = f.second.y;
    dy[5] = f.second.z;
  };

  Trajectory traj;
  traj.system = sys;

  Sample cur;
  cur.t = 0.0;
  cur.y = pack(state0);
  field(cur.y, cur.dy);
  traj.anchors.push_back({0.0, cur.anchor});

  const bool is_chart = sys != System::EulerPoisson;

  auto maybe_reanchor = [&](Sample& s) {
    if (!is_chart) return;
    const double n2 = s.y[0] * s.y[0] + s.y[1] * s.y[1] + s.y[2] * s.y[2];
    if (ctl.reanchor_enabled && n2 > ctl.reanchor_threshold_sq) {
      const PhaseState st = unpack(sys, s.y);
      const auto b =
          std::get<dynamics::BodyRateState>(dynamics::convert(st, System::NOmega, inertia));
      s.anchor = s.anchor * chart::rotation_matrix(b.n);
      const PhaseState reset = dynamics::convert(dynamics::BodyRateState{{}, b.omega}, sys, inertia);
      s.y = pack(reset);
      field(s.y, s.dy);
      traj.anchors.push_back({s.t, s.anchor});
    } else if (!ctl.reanchor_enabled && n2 > 1e8) {
      throw chart_boundary_error(
          "integrate: chart boundary reached with re-anchoring disabled");
    }
  };

  // output grid
  std::vector<double> grid(grid_count + 1);
  for (int g = 0; g <= grid_count; ++g) grid[g] = t_end * g / grid_count;
  std::size_t next_out = 0;
  traj.samples.push_back(cur);
  ++next_out;

  double h = ctl.h_init;
  std::vector<double> y_big, y_half, y_two, s1, s2, dy_mid;
  Sample nxt;

  while (cur.t < t_end) {
    if (cur.t + h > t_end) h = t_end - cur.t;
    if (h < 1e-12) throw stiffness_error("integrate: step size underflow below 1e-12");

    detail::rk4(field, cur.y, cur.dy, h, y_big, s1, s2);
    detail::rk4(field, cur.y, cur.dy, h / 2.0, y_half, s1, s2);
    field(y_half, dy_mid);
    detail::rk4(field, y_half, dy_mid, h / 2.0, y_two, s1, s2);

    double err = 0.0;
    for (std::size_t i = 0; i < cur.y.size(); ++i) {
      const double scale = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(cur.y[i]), std::abs(y_two[i]));
      err = std::max(err, std::abs(y_two[i] - y_big[i]) / scale);
    }

    if (err <= 1.0) {
      nxt.t = cur.t + h;
      nxt.anchor = cur.anchor;
      nxt.y.resize(y_two.size());
      for (std::size_t i = 0; i < y_two.size(); ++i)
        nxt.y[i] = y_two[i] + (y_two[i] - y_big[i]) / 15.0;  // local extrapolation
      if (sys == System::EulerPoisson) {
        if (ctl.project_orthogonal) {
          Mat3 r;
          std::copy(nxt.y.begin(), nxt.y.begin() + 9, r.a.begin());
          r = project_orthogonal(r);
          std::copy(r.a.begin(), r.a.end(), nxt.y.begin());
        }
        Mat3 r;
        std::copy(nxt.y.begin(), nxt.y.begin() + 9, r.a.begin());
        traj.max_ortho_residual = std::max(traj.max_ortho_residual, orthogonality_residual(r));
      }
      field(nxt.y, nxt.dy);
      ++traj.accepted_steps;

      // dense output inside (cur.t, nxt.t]
      while (next_out < grid.size() && grid[next_out] <= nxt.t + 1e-14) {
        Sample out;
        out.t = grid[next_out];
        out.anchor = cur.anchor;
        detail::hermite(cur, nxt, out.t, out.y);
        field(out.y, out.dy);
        traj.samples.push_back(std::move(out));
        ++next_out;
      }

      maybe_reanchor(nxt);
      cur = nxt;
    } else {
      ++traj.rejected_steps;
    }
    const double factor = 0.9 * std::pow(std::max(err, 1e-16), -0.2);
    h *= std::min(5.0, std::max(0.2, factor));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Lie-series flow
// ---------------------------------------------------------------------------

struct LieSeriesConfig {
  int order = 8;        // truncation order K >= 1
  double t_cap = 1.0;   // series validity cap per evaluation
};

struct LieSeriesResult {
  CanonicalState state;
  double last_term = 0.0;  // magnitude of the last retained series term
  bool converged = true;   // false: last-term estimate exceeded the tolerance
};

/// z(t) = sum_{j=0..K} (t^j / j!) (L_H)^j z at z0, realized as the Taylor
/// recurrence of the polynomial canonical vector field: the series
/// coefficients are exact in exact arithmetic.
inline LieSeriesResult lie_series_flow(const CanonicalState& z0, const InertiaTensor& inertia,
                                       double t, const LieSeriesConfig& cfg = {},
                                       double tolerance = 1e-12) {
  if (cfg.order < 1) throw invalid_input("lie_series_flow: order must be >= 1");
  if (std::abs(t) > cfg.t_cap + 1e-15)
    throw invalid_input("lie_series_flow: |t| exceeds the configured cap");

  const std::size_t k = static_cast<std::size_t>(cfg.order);
  TVec3<Jet> n{Jet(k, z0.n.n.x), Jet(k, z0.n.n.y), Jet(k, z0.n.n.z)};
  TVec3<Jet> pi{Jet(k, z0.pi.x), Jet(k, z0.pi.y), Jet(k, z0.pi.z)};

  for (std::size_t j = 0; j < k; ++j) {
    const auto [ndot, pidot] = dynamics::canonical_field_t(n, pi, inertia.inverse_matrix());
    for (int i = 0; i < 3; ++i) {
      n[i][j + 1] = ndot[i][j] / double(j + 1);
      pi[i][j + 1] = pidot[i][j] / double(j + 1);
    }
  }

  LieSeriesResult res;
  res.state.n = chart::RotationVector{n.x.eval(t), n.y.eval(t), n.z.eval(t)};
  res.state.pi = {pi.x.eval(t), pi.y.eval(t), pi.z.eval(t)};
  const double tk = std::pow(std::abs(t), double(k));
  for (int i = 0; i < 3; ++i)
    res.last_term = std::max({res.last_term, std::abs(n[i][k]) * tk, std::abs(pi[i][k]) * tk});
  res.converged = res.last_term <= tolerance;
  return res;
}

// ---------------------------------------------------------------------------
// Closed-form oracles
// ---------------------------------------------------------------------------

/// Exact body angular velocity of the symmetric top I = diag(I1, I1, I3):
/// Omega_3 constant, (Omega_1, Omega_2) precessing at rate (I1 - I3) Omega_3 / I1.
inline Vec3 symmetric_top_oracle(double i1, double i3, const Vec3& omega0, double t) {
  if (!(i1 > 0.0) || !(i3 > 0.0))
    throw invalid_input("symmetric_top_oracle: moments must be positive");
  const double rate = (i1 - i3) * omega0.z / i1;
  const double c = std::cos(rate * t), s = std::sin(rate * t);
  return {c * omega0.x + s * omega0.y, -s * omega0.x + c * omega0.y, omega0.z};
}

/// Fixed-axis attitude of a spherical body: rotation about omega/|omega| by
/// angle |omega| t.
inline Mat3 fixed_axis_attitude(const Vec3& omega, double t) {
  const double w = norm(omega);
  if (w == 0.0) return Mat3::identity();
  const Vec3 k = omega * (1.0 / w);
  const double a = w * t;
  // Eq.-(7) form, valid for any angle
  return Mat3::identity() * std::cos(a) + outer(k, k) * (1.0 - std::cos(a)) -
         hat(k) * std::sin(a);
}

// ---------------------------------------------------------------------------
// Cross-formulation comparison
// ---------------------------------------------------------------------------

struct CompareReport {
  std::array<Trajectory, 4> lanes;  // n-pi, n-m, n-omega, euler-poisson
  std::array<bool, 4> lane_ok{false, false, false, false};
  std::array<std::string, 4> lane_error;
  std::array<double, 4> energy_drift{};    // relative
  std::array<double, 4> momentum_drift{};  // absolute, |m(t) - m(0)|
  double max_divergence = 0.0;             // max pairwise Frobenius attitude distance
  int reanchor_events = 0;
  bool complete = false;
};

static constexpr std::array<System, 4> kAllSystems{System::NPi, System::NM, System::NOmega,
                                                   System::EulerPoisson};

/// Propagate the same physical initial data (R(0) = 1, Omega(0) = omega0) in
/// all four systems and compare the reconstructed attitudes on the grid.
inline CompareReport compare_formulations(const Vec3& omega0, const InertiaTensor& inertia,
                                          double t_end, const StepControl& ctl = {},
                                          int grid_count = 100) {
  CompareReport rep;
  const dynamics::BodyRateState seed{{}, omega0};
  for (int l = 0; l < 4; ++l) {
    try {
      const PhaseState s0 = dynamics::convert(seed, kAllSystems[l], inertia);
      rep.lanes[l] = integrate(kAllSystems[l], s0, inertia, t_end, ctl, grid_count);
      rep.lane_ok[l] = true;
      rep.reanchor_events += static_cast<int>(rep.lanes[l].anchors.size()) - 1;
    } catch (const std::exception& e) {
      rep.lane_error[l] = e.what();
    }
  }

  for (int l = 0; l < 4; ++l) {
    if (!rep.lane_ok[l]) continue;
    const auto& tr = rep.lanes[l];
    const auto inv0 = sample_invariants(tr.samples.front(), tr.system, inertia);
    for (const auto& s : tr.samples) {
      const auto inv = sample_invariants(s, tr.system, inertia);
      rep.energy_drift[l] = std::max(rep.energy_drift[l],
                                     std::abs(inv.energy - inv0.energy) /
                                         std::max(std::abs(inv0.energy), 1e-300));
      rep.momentum_drift[l] = std::max(rep.momentum_drift[l], norm(inv.m_spatial - inv0.m_spatial));
    }
  }

  rep.complete = rep.lane_ok[0] && rep.lane_ok[1] && rep.lane_ok[2] && rep.lane_ok[3];
  if (rep.complete) {
    const std::size_t count = rep.lanes[0].samples.size();
    for (std::size_t g = 0; g < count; ++g) {
      std::array<Mat3, 4> r;
      for (int l = 0; l < 4; ++l)
        r[l] = sample_attitude(rep.lanes[l].samples[g], kAllSystems[l]);
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
          rep.max_divergence = std::max(rep.max_divergence, frobenius_norm(r[a] - r[b]));
    }
  }
  return rep;
}

}  // namespace rbody::flows

#endif
