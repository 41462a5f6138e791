#ifndef RBODY_IO_HPP
#define RBODY_IO_HPP

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rbody/dynamics.hpp"
#include "rbody/errors.hpp"
#include "rbody/flows.hpp"
#include "rbody/poisson.hpp"

namespace rbody::io {

// ---------------------------------------------------------------------------
// Flat dotted-key config format:  body.inertia.principal = [1, 2, 3]
// ---------------------------------------------------------------------------

using ConfigValue = std::variant<double, bool, std::string, std::vector<double>>;

class Config {
 public:
  static Config parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw invalid_input("config line " + std::to_string(lineno) + ": expected 'key = value'");
      const std::string key = trim(trimmed.substr(0, eq));
      const std::string val = trim(trimmed.substr(eq + 1));
      if (key.empty())
        throw invalid_input("config line " + std::to_string(lineno) + ": empty key");
      try {
        cfg.kv_[key] = parse_value(val);
      } catch (const std::exception& e) {
        throw invalid_input("config line " + std::to_string(lineno) + ", key '" + key +
                            "': " + e.what());
      }
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
  }

  std::string serialize() const {
    std::string out;
    for (const auto& [key, value] : kv_) {
      out += key;
      out += " = ";
      out += format_value(value);
      out.push_back('\n');
    }
    return out;
  }

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  double get_double(const std::string& key, double fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (const double* d = std::get_if<double>(&it->second)) return *d;
    throw invalid_input("config key '" + key + "': expected a number");
  }

  long get_int(const std::string& key, long fallback) const {
    return static_cast<long>(get_double(key, static_cast<double>(fallback)));
  }

  bool get_bool(const std::string& key, bool fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (const bool* b = std::get_if<bool>(&it->second)) return *b;
    throw invalid_input("config key '" + key + "': expected true/false");
  }

  std::string get_string(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
    throw invalid_input("config key '" + key + "': expected a string");
  }

  std::vector<double> get_vector(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw invalid_input("config key '" + key + "' is required");
    if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
    throw invalid_input("config key '" + key + "': expected a [list]");
  }

  void set(const std::string& key, ConfigValue value) { kv_[key] = std::move(value); }

  const std::map<std::string, ConfigValue>& entries() const { return kv_; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
  }

  static ConfigValue parse_value(const std::string& val) {
    if (val.empty()) throw invalid_input("empty value");
    if (val == "true") return true;
    if (val == "false") return false;
    if (val.front() == '[') {
      if (val.back() != ']') throw invalid_input("unterminated list");
      std::vector<double> out;
      std::string inner = val.substr(1, val.size() - 2);
      std::istringstream ss(inner);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) throw invalid_input("empty list element");
        out.push_back(parse_number(t));
      }
      return out;
    }
    char* end = nullptr;
    const double d = std::strtod(val.c_str(), &end);
    if (end && *end == '\0') return d;
    return val;  // bare string
  }

  static double parse_number(const std::string& t) {
    char* end = nullptr;
    const double d = std::strtod(t.c_str(), &end);
    if (!end || *end != '\0') throw invalid_input("not a number: '" + t + "'");
    return d;
  }

  static std::string format_value(const ConfigValue& v) {
    if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const double* d = std::get_if<double>(&v)) return format_full(*d);
    if (const std::string* s = std::get_if<std::string>(&v)) return *s;
    const auto& list = std::get<std::vector<double>>(v);
    std::string out = "[";
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i) out += ", ";
      out += format_full(list[i]);
    }
    out += "]";
    return out;
  }

  std::map<std::string, ConfigValue> kv_;
};

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct RunConfig {
  InertiaTensor inertia = InertiaTensor::spherical();
  dynamics::System system = dynamics::System::NOmega;
  dynamics::PhaseState state0 = dynamics::BodyRateState{};
  double t_end = 10.0;
  int samples = 100;
  flows::StepControl step;
  flows::LieSeriesConfig lie;
  unsigned long seed = 20260823;
  int verify_samples = 100;
  std::map<std::string, double> tolerances;  // verify.tol.* overrides
};

inline Vec3 vec3_from(const std::vector<double>& v, const std::string& key) {
  if (v.size() != 3) throw invalid_input("config key '" + key + "': expected 3 elements");
  return {v[0], v[1], v[2]};
}

inline RunConfig load_run_config(const Config& cfg) {
  RunConfig rc;

  if (cfg.has("body.inertia.matrix")) {
    const auto v = cfg.get_vector("body.inertia.matrix");
    if (v.size() != 9) throw invalid_input("body.inertia.matrix: expected 9 elements");
    Mat3 m;
    std::copy(v.begin(), v.end(), m.a.begin());
    rc.inertia = InertiaTensor(m);
  } else if (cfg.has("body.inertia.principal")) {
    const Vec3 p = vec3_from(cfg.get_vector("body.inertia.principal"), "body.inertia.principal");
    Mat3 orient = Mat3::identity();
    if (cfg.has("body.inertia.orientation")) {
      const auto v = cfg.get_vector("body.inertia.orientation");
      if (v.size() != 9) throw invalid_input("body.inertia.orientation: expected 9 elements");
      std::copy(v.begin(), v.end(), orient.a.begin());
    }
    rc.inertia = InertiaTensor::from_principal(p, orient);
  }

  rc.system = dynamics::system_from_name(cfg.get_string("state.system", "n-omega"));
  if (rc.system == dynamics::System::EulerPoisson) {
    Mat3 r = Mat3::identity();
    if (cfg.has("state.R")) {
      const auto v = cfg.get_vector("state.R");
      if (v.size() != 9) throw invalid_input("state.R: expected 9 elements");
      std::copy(v.begin(), v.end(), r.a.begin());
    }
    Vec3 omega{};
    if (cfg.has("state.omega")) omega = vec3_from(cfg.get_vector("state.omega"), "state.omega");
    rc.state0 = dynamics::EulerPoissonState{r, omega};
  } else {
    chart::RotationVector n;
    if (cfg.has("state.n")) n = chart::RotationVector(vec3_from(cfg.get_vector("state.n"), "state.n"));
    if (rc.system == dynamics::System::NPi) {
      Vec3 pi{};
      if (cfg.has("state.pi")) pi = vec3_from(cfg.get_vector("state.pi"), "state.pi");
      rc.state0 = dynamics::CanonicalState{n, pi};
    } else if (rc.system == dynamics::System::NM) {
      Vec3 m{};
      if (cfg.has("state.m")) m = vec3_from(cfg.get_vector("state.m"), "state.m");
      rc.state0 = dynamics::MomentumState{n, m};
    } else {
      Vec3 omega{};
      if (cfg.has("state.omega")) omega = vec3_from(cfg.get_vector("state.omega"), "state.omega");
      rc.state0 = dynamics::BodyRateState{n, omega};
    }
  }

  rc.t_end = cfg.get_double("run.t_end", rc.t_end);
  rc.samples = static_cast<int>(cfg.get_int("run.samples", rc.samples));
  rc.step.abs_tol = cfg.get_double("integrator.abs_tol", rc.step.abs_tol);
  rc.step.rel_tol = cfg.get_double("integrator.rel_tol", rc.step.rel_tol);
  rc.step.h_init = cfg.get_double("integrator.h_init", rc.step.h_init);
  rc.step.project_orthogonal = cfg.get_bool("integrator.project", rc.step.project_orthogonal);
  rc.step.reanchor_enabled = cfg.get_bool("flow.reanchor", rc.step.reanchor_enabled);
  rc.step.reanchor_threshold_sq =
      cfg.get_double("flow.reanchor_threshold_sq", rc.step.reanchor_threshold_sq);
  rc.lie.order = static_cast<int>(cfg.get_int("lie.order", rc.lie.order));
  rc.lie.t_cap = cfg.get_double("lie.t_cap", rc.lie.t_cap);
  rc.seed = static_cast<unsigned long>(cfg.get_int("verify.seed", static_cast<long>(rc.seed)));
  rc.verify_samples = static_cast<int>(cfg.get_int("verify.samples", rc.verify_samples));

  if (!(rc.step.abs_tol > 0.0) || !(rc.step.rel_tol > 0.0))
    throw invalid_input("integrator tolerances must be positive");
  if (rc.lie.order < 1) throw invalid_input("lie.order must be >= 1");

  for (const auto& [key, value] : cfg.entries())
    if (key.rfind("verify.tol.", 0) == 0) {
      if (const double* d = std::get_if<double>(&value))
        rc.tolerances[key.substr(11)] = *d;
      else
        throw invalid_input("config key '" + key + "': expected a number");
    }
  return rc;
}

inline double tolerance(const RunConfig& rc, const std::string& name, double fallback) {
  const auto it = rc.tolerances.find(name);
  return it == rc.tolerances.end() ? fallback : it->second;
}

// ---------------------------------------------------------------------------
// Delimited emitters (comma separator, full double precision)
// ---------------------------------------------------------------------------

inline void write_trajectory(std::ostream& out, const flows::Trajectory& traj,
                             const InertiaTensor& inertia) {
  using dynamics::System;
  out << "t,system";
  if (traj.system == System::EulerPoisson) {
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; j <= 3; ++j) out << ",r" << i << j;
    out << ",omega1,omega2,omega3";
  } else {
    const char* v = traj.system == System::NPi ? "pi" : (traj.system == System::NM ? "m" : "omega");
    out << ",n1,n2,n3," << v << "1," << v << "2," << v << "3";
  }
  out << ",H,m1,m2,m3,ortho_residual\n";
  for (const auto& s : traj.samples) {
    const auto inv = flows::sample_invariants(s, traj.system, inertia);
    out << format_full(s.t) << ',' << dynamics::system_name(traj.system);
    for (double y : s.y) out << ',' << format_full(y);
    out << ',' << format_full(inv.energy);
    out << ',' << format_full(inv.m_spatial.x) << ',' << format_full(inv.m_spatial.y) << ','
        << format_full(inv.m_spatial.z);
    out << ',' << format_full(inv.ortho_residual) << '\n';
  }
}

inline void write_residuals(std::ostream& out, const std::vector<poisson::ResidualRecord>& recs) {
  out << "check,point,residual,tolerance,pass\n";
  for (const auto& r : recs) {
    out << r.check << ',';
    for (int i = 0; i < 6; ++i) {
      if (i) out << ' ';
      out << format_full(r.point[i]);
    }
    out << ',' << format_full(r.residual) << ',' << format_full(r.tolerance) << ','
        << (r.pass ? "1" : "0") << '\n';
  }
}

}  // namespace rbody::io

#endif
