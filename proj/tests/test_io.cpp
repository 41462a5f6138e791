#include <doctest.h>

#include <sstream>
#include <string>

#include "rbody/io.hpp"
#include "rbody/verify.hpp"

using namespace rbody;
using io::Config;
using io::RunConfig;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("config parses scalars, booleans, lists, strings and comments") {
  const Config cfg = Config::parse(
      "# header comment\n"
      "run.t_end = 12.5\n"
      "state.system = n-pi   # trailing comment\n"
      "flow.reanchor = false\n"
      "state.n = [0.1, -0.2, 0.3]\n"
      "\n"
      "run.samples = 40\n");
  CHECK(cfg.get_double("run.t_end", 0.0) == 12.5);
  CHECK(cfg.get_string("state.system", "") == "n-pi");
  CHECK(cfg.get_bool("flow.reanchor", true) == false);
  CHECK(cfg.get_int("run.samples", 0) == 40);
  const auto v = cfg.get_vector("state.n");
  REQUIRE(v.size() == 3);
  CHECK(v[1] == -0.2);
  CHECK(cfg.get_double("missing.key", 7.0) == 7.0);
  CHECK_FALSE(cfg.has("missing.key"));
}

TEST_CASE("config parse errors carry line numbers and key names") {
  try {
    Config::parse("a.b = 1\nno equals sign here\n");
    FAIL("expected invalid_input");
  } catch (const invalid_input& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    Config::parse("x = [1, 2,\n");
    FAIL("expected invalid_input");
  } catch (const invalid_input& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 1") != std::string::npos);
    CHECK(msg.find("'x'") != std::string::npos);
  }
  CHECK_THROWS_AS(Config::parse("x = [1, , 2]"), invalid_input);
  CHECK_THROWS_AS(Config::parse(" = 3"), invalid_input);
  CHECK_THROWS_AS(Config::parse("x ="), invalid_input);
}

TEST_CASE("config type mismatches are reported") {
  const Config cfg = Config::parse("a = hello\nb = [1, 2]\nc = 3\n");
  CHECK_THROWS_AS(cfg.get_double("a", 0.0), invalid_input);
  CHECK_THROWS_AS(cfg.get_bool("c", false), invalid_input);
  CHECK_THROWS_AS(cfg.get_vector("c"), invalid_input);
  CHECK_THROWS_AS(cfg.get_string("b", ""), invalid_input);
  CHECK_THROWS_AS(cfg.get_vector("missing"), invalid_input);
}

TEST_CASE("serialize then parse is the identity on entries") {
  const Config cfg = Config::parse(
      "run.t_end = 0.30000000000000004\n"
      "state.system = n-m\n"
      "flow.reanchor = true\n"
      "state.n = [1e-3, 2.5, -7]\n");
  const Config back = Config::parse(cfg.serialize());
  CHECK(back.entries() == cfg.entries());
  // and full precision survives
  CHECK(back.get_double("run.t_end", 0.0) == cfg.get_double("run.t_end", 0.0));
}

TEST_CASE("load_run_config defaults") {
  const RunConfig rc = io::load_run_config(Config::parse(""));
  CHECK(rc.system == dynamics::System::NOmega);
  CHECK(rc.t_end == 10.0);
  CHECK(rc.samples == 100);
  CHECK(rc.inertia.is_spherical());
  CHECK(rc.step.abs_tol == 1e-10);
  CHECK(rc.lie.order == 8);
  CHECK(rc.seed == 20260823UL);
}

TEST_CASE("load_run_config reads each state flavor") {
  {
    const RunConfig rc = io::load_run_config(Config::parse(
        "state.system = n-pi\nstate.n = [0.1, 0.2, 0.3]\nstate.pi = [1, 2, 3]\n"));
    const auto& s = std::get<dynamics::CanonicalState>(rc.state0);
    CHECK(s.n.n.y == 0.2);
    CHECK(s.pi.z == 3.0);
  }
  {
    const RunConfig rc =
        io::load_run_config(Config::parse("state.system = n-m\nstate.m = [4, 5, 6]\n"));
    CHECK(std::get<dynamics::MomentumState>(rc.state0).m.x == 4.0);
  }
  {
    const RunConfig rc = io::load_run_config(
        Config::parse("state.system = euler-poisson\nstate.omega = [1, 0, 0]\n"));
    const auto& s = std::get<dynamics::EulerPoissonState>(rc.state0);
    CHECK(frobenius_norm(s.R - Mat3::identity()) == 0.0);
    CHECK(s.omega.x == 1.0);
  }
  CHECK_THROWS_AS(io::load_run_config(Config::parse("state.system = quaternion\n")),
                  invalid_input);
}

TEST_CASE("load_run_config inertia forms") {
  {
    const RunConfig rc = io::load_run_config(
        Config::parse("body.inertia.matrix = [2, 0, 0, 0, 3, 0, 0, 0, 4]\n"));
    CHECK(rc.inertia.matrix()(2, 2) == 4.0);
  }
  {
    const RunConfig rc =
        io::load_run_config(Config::parse("body.inertia.principal = [1, 2, 2.5]\n"));
    CHECK(rc.inertia.principal_moments()[0] == doctest::Approx(2.5));
  }
  CHECK_THROWS_AS(
      io::load_run_config(Config::parse("body.inertia.principal = [5, 1, 1]\n")),
      invalid_input);
  CHECK_THROWS_AS(io::load_run_config(Config::parse("body.inertia.matrix = [1, 2]\n")),
                  invalid_input);
  CHECK_THROWS_AS(io::load_run_config(Config::parse("integrator.abs_tol = 0\n")),
                  invalid_input);
  CHECK_THROWS_AS(io::load_run_config(Config::parse("lie.order = 0\n")), invalid_input);
}

TEST_CASE("tolerance overrides flow through verify.tol keys") {
  const RunConfig rc = io::load_run_config(
      Config::parse("verify.tol.jacobi = 1e-4\nverify.tol.oracle = 1e-5\n"));
  CHECK(io::tolerance(rc, "jacobi", 1e-6) == 1e-4);
  CHECK(io::tolerance(rc, "oracle", 1e-7) == 1e-5);
  CHECK(io::tolerance(rc, "involution", 1e-9) == 1e-9);
  CHECK_THROWS_AS(io::load_run_config(Config::parse("verify.tol.jacobi = loose\n")),
                  invalid_input);
}

TEST_CASE("trajectory export: header shape and full-precision content") {
  const InertiaTensor inertia = InertiaTensor::spherical();
  const auto traj = flows::integrate(dynamics::System::NOmega,
                                     dynamics::BodyRateState{{}, {0.0, 0.0, 1.0}}, inertia, 1.0,
                                     {}, 10);
  std::ostringstream ss;
  io::write_trajectory(ss, traj, inertia);
  const std::string text = ss.str();
  CHECK(text.rfind("t,system,n1,n2,n3,omega1,omega2,omega3,H,m1,m2,m3,ortho_residual\n", 0) == 0);
  CHECK(count_lines(text) == 12);  // header + 11 grid samples
  CHECK(text.find("n-omega") != std::string::npos);

  // euler-poisson header variant
  const auto ep = flows::integrate(
      dynamics::System::EulerPoisson,
      dynamics::EulerPoissonState{Mat3::identity(), {0.0, 0.0, 1.0}}, inertia, 1.0, {}, 5);
  std::ostringstream ss2;
  io::write_trajectory(ss2, ep, inertia);
  CHECK(ss2.str().rfind("t,system,r11,r12,r13,r21,r22,r23,r31,r32,r33,"
                        "omega1,omega2,omega3,H,m1,m2,m3,ortho_residual\n",
                        0) == 0);
}

TEST_CASE("residual export shape") {
  std::vector<poisson::ResidualRecord> recs;
  recs.push_back({"demo-check", {1, 2, 3, 4, 5, 6}, 1e-11, 1e-10, true});
  recs.push_back({"demo-fail", {}, 2e-3, 1e-6, false});
  std::ostringstream ss;
  io::write_residuals(ss, recs);
  const std::string text = ss.str();
  CHECK(text.rfind("check,point,residual,tolerance,pass\n", 0) == 0);
  CHECK(count_lines(text) == 3);
  CHECK(text.find("demo-check,1 2 3 4 5 6,") != std::string::npos);
  CHECK(text.find(",1\n") != std::string::npos);
  CHECK(text.find(",0\n") != std::string::npos);
}

TEST_CASE("verify suites all pass at the default configuration") {
  const RunConfig rc = io::load_run_config(Config::parse(""));
  for (const auto& name : verify::suite_names()) {
    const auto recs = verify::run_suite(name, rc);
    CHECK(!recs.empty());
    for (const auto& r : recs) {
      INFO(name << " / " << r.check << ": " << r.residual << " tol " << r.tolerance);
      CHECK(r.pass);
    }
  }
  CHECK_THROWS_AS(verify::run_suite("bogus", rc), invalid_input);
}

TEST_CASE("verify sweep is deterministic for a fixed seed") {
  const RunConfig rc = io::load_run_config(Config::parse("verify.samples = 20\n"));
  const auto a = verify::run_suite("pushforward", rc);
  const auto b = verify::run_suite("pushforward", rc);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].residual == b[i].residual);
    CHECK(a[i].point == b[i].point);
  }

  const RunConfig other =
      io::load_run_config(Config::parse("verify.samples = 20\nverify.seed = 7\n"));
  const auto c = verify::run_suite("pushforward", other);
  CHECK(c.front().residual != a.front().residual);
}
