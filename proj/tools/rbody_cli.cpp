// Command-line front end: simulate trajectories, run the verification
// suites, and compare the four phase-space formulations.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "rbody/io.hpp"
#include "rbody/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw rbody::invalid_input("cannot open output file: " + path);
  return file;
}

rbody::io::RunConfig load(const std::string& config_path, const std::string& system_override,
                          long seed_override) {
  rbody::io::Config cfg =
      config_path.empty() ? rbody::io::Config{} : rbody::io::Config::parse_file(config_path);
  if (!system_override.empty()) cfg.set("state.system", system_override);
  if (seed_override >= 0) cfg.set("verify.seed", static_cast<double>(seed_override));
  return rbody::io::load_run_config(cfg);
}

int cmd_simulate(const rbody::io::RunConfig& rc, const std::string& out_path) {
  const auto traj = rbody::flows::integrate(rc.system, rc.state0, rc.inertia, rc.t_end, rc.step,
                                            rc.samples);
  std::ofstream file;
  std::ostream& out = open_output(out_path, file);
  rbody::io::write_trajectory(out, traj, rc.inertia);
  return kExitOk;
}

int cmd_verify(const rbody::io::RunConfig& rc, const std::string& suite,
               const std::string& out_path) {
  const auto records = rbody::verify::run_suite(suite, rc);
  std::ofstream file;
  std::ostream& out = open_output(out_path, file);
  rbody::io::write_residuals(out, records);
  bool all_pass = true;
  for (const auto& r : records) all_pass = all_pass && r.pass;
  if (!all_pass) {
    std::cerr << "verify: FAILED checks:\n";
    for (const auto& r : records)
      if (!r.pass)
        std::cerr << "  " << r.check << " residual " << rbody::format_full(r.residual)
                  << " tolerance " << rbody::format_full(r.tolerance) << "\n";
  }
  return all_pass ? kExitOk : kExitVerifyFail;
}

int cmd_compare(const rbody::io::RunConfig& rc, const std::string& out_path) {
  const auto* body = std::get_if<rbody::dynamics::BodyRateState>(&rc.state0);
  rbody::Vec3 omega0{};
  if (body != nullptr) {
    if (rbody::norm(body->n.n) > 0.0)
      throw rbody::invalid_input("compare: initial state must sit at the identity (n = 0)");
    omega0 = body->omega;
  } else if (const auto* ep = std::get_if<rbody::dynamics::EulerPoissonState>(&rc.state0)) {
    if (rbody::frobenius_norm(ep->R - rbody::Mat3::identity()) > 0.0)
      throw rbody::invalid_input("compare: initial attitude must be the identity");
    omega0 = ep->omega;
  } else {
    throw rbody::invalid_input("compare: give the initial state as n-omega or euler-poisson");
  }

  const auto rep =
      rbody::flows::compare_formulations(omega0, rc.inertia, rc.t_end, rc.step, rc.samples);
  std::ofstream file;
  std::ostream& out = open_output(out_path, file);
  out << "lane,ok,energy_drift,momentum_drift,error\n";
  for (int l = 0; l < 4; ++l) {
    out << rbody::dynamics::system_name(rbody::flows::kAllSystems[l]) << ','
        << (rep.lane_ok[l] ? "1" : "0") << ',' << rbody::format_full(rep.energy_drift[l]) << ','
        << rbody::format_full(rep.momentum_drift[l]) << ',' << rep.lane_error[l] << '\n';
  }
  out << "max_pairwise_attitude_divergence," << rbody::format_full(rep.max_divergence) << '\n';
  out << "reanchor_events," << rep.reanchor_events << '\n';
  return rep.complete ? kExitOk : kExitVerifyFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"free rigid-body dynamics in the rotation-vector chart"};
  app.require_subcommand(1);

  std::string config_path, out_path, system_override, suite = "all";
  long seed_override = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat dotted-key config file");
    sub->add_option("--out", out_path, "output file (default stdout)");
    sub->add_option("--system", system_override,
                    "coordinate system: n-pi | n-m | n-omega | euler-poisson");
    sub->add_option("--seed", seed_override, "random seed for property sweeps");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "integrate and emit a trajectory file");
  add_common(simulate);
  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  add_common(verify);
  verify->add_option("--suite", suite, "suite name or 'all'");
  CLI::App* compare = app.add_subcommand("compare", "propagate all four formulations and compare");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const rbody::io::RunConfig rc = load(config_path, system_override, seed_override);
    if (simulate->parsed()) return cmd_simulate(rc, out_path);
    if (verify->parsed()) return cmd_verify(rc, suite, out_path);
    return cmd_compare(rc, out_path);
  } catch (const rbody::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
