#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "sweep_config.hpp"

namespace {

using qsteer::cli::SweepConfig;

struct FlagValues {
  std::string config_path;
  double z_min = 0.0, z_max = 0.0;
  int z_steps = 1;
  double r_min = 0.0, r_max = 0.0;
  int r_steps = 1;
  double theta = 0.0, k = 0.0, p = 0.0, dt = 0.0;
  int n = 1;
  std::uint64_t seed = 0;
  std::string out;
};

void add_sweep_flags(CLI::App* sub, FlagValues& v, bool free_particle) {
  sub->add_option("--config", v.config_path, "JSON config file; flags override it");
  if (free_particle) {
    sub->add_option("--z-min", v.z_min, "lower end of the squeezing grid");
    sub->add_option("--z-max", v.z_max, "upper end of the squeezing grid");
    sub->add_option("--z-steps", v.z_steps, "number of squeezing grid points");
    sub->add_option("--r-min", v.r_min, "lower end of the momentum-ratio grid");
    sub->add_option("--r-max", v.r_max, "upper end of the momentum-ratio grid");
    sub->add_option("--r-steps", v.r_steps, "number of momentum-ratio grid points");
    sub->add_option("--theta", v.theta, "mixing angle in radians");
    sub->add_option("--k", v.k, "thermal occupation");
  } else {
    sub->add_option("--n", v.n, "number of qubits on Bob's side");
    sub->add_option("--p", v.p, "visibility of the noisy state");
    sub->add_option("--dt", v.dt, "evolution time checked by the witness");
  }
  sub->add_option("--seed", v.seed, "seed for every randomized evaluation");
  sub->add_option("--out", v.out, "output file path");
}

// Config file first, then explicit flags on top.
SweepConfig resolve(CLI::App* sub, const FlagValues& v, const std::string& scenario) {
  SweepConfig cfg;
  if (sub->count("--config") > 0) cfg = qsteer::cli::load_config(v.config_path);
  if (cfg.scenario.empty() && !scenario.empty()) cfg.scenario = scenario;

  const auto touched = [sub](const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (touched("--z-min")) cfg.z.min = v.z_min;
  if (touched("--z-max")) cfg.z.max = v.z_max;
  if (touched("--z-steps")) cfg.z.steps = v.z_steps;
  if (touched("--r-min")) cfg.r.min = v.r_min;
  if (touched("--r-max")) cfg.r.max = v.r_max;
  if (touched("--r-steps")) cfg.r.steps = v.r_steps;
  if (touched("--theta")) cfg.theta = {v.theta, v.theta, 1};
  if (touched("--k")) cfg.k = {v.k, v.k, 1};
  if (touched("--n")) cfg.n = {double(v.n), double(v.n), 1};
  if (touched("--p")) cfg.p = {v.p, v.p, 1};
  if (touched("--dt")) cfg.dt = {v.dt, v.dt, 1};
  if (touched("--seed")) cfg.seed = v.seed;
  if (touched("--out")) cfg.out = v.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steering witnesses from quantum speed limits"};
  app.require_subcommand(1);

  FlagValues v;
  bool closed_form_only = false;
  bool audit = false;

  CLI::App* fp = app.add_subcommand(
      "free-particle", "sweep the free-particle criterion over (z, R, theta, k)");
  add_sweep_flags(fp, v, true);

  CLI::App* gz =
      app.add_subcommand("ghz", "tabulate thresholds and witnesses for noisy GHZ states");
  add_sweep_flags(gz, v, false);
  gz->add_flag("--closed-form-only", closed_form_only,
               "skip the dense columns (reported as nan) and use the small-dt "
               "violation criterion; lifts the size guard");

  CLI::App* vf = app.add_subcommand("verify", "run every invariant and oracle check");
  vf->add_option("--config", v.config_path, "JSON config file; flags override it");
  vf->add_option("--seed", v.seed, "seed for every randomized evaluation");
  vf->add_option("--out", v.out, "report JSON path (default verify_report.json)");
  vf->add_flag("--audit-momentum-scaled-xx", audit,
               "feed the pipeline the wrong position-coupling variant; the "
               "closed-form agreement check must fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fp->parsed()) return qsteer::cli::cmd_free_particle(resolve(fp, v, "free-particle"));
    if (gz->parsed()) return qsteer::cli::cmd_ghz(resolve(gz, v, "ghz"), closed_form_only);
    return qsteer::cli::cmd_verify(resolve(vf, v, ""), audit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
