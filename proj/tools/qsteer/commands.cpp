#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "qsteer/gaussian.hpp"
#include "qsteer/ghz.hpp"
#include "verify_suite.hpp"

namespace qsteer::cli {

namespace {

void require_scenario(const SweepConfig& cfg, const std::string& expected) {
  if (cfg.scenario.empty()) return;
  if (cfg.scenario != "free-particle" && cfg.scenario != "displacement" &&
      cfg.scenario != "ghz")
    throw std::invalid_argument("unknown scenario '" + cfg.scenario + "'");
  if (expected.empty()) return;  // scenario-agnostic command
  if (cfg.scenario == "displacement")
    throw std::invalid_argument(
        "scenario 'displacement' is evaluated through the library API; no "
        "subcommand drives it");
  if (cfg.scenario != expected)
    throw std::invalid_argument("config scenario '" + cfg.scenario +
                                "' does not match subcommand '" + expected + "'");
}

void write_lines(const std::string& path, const std::string& header,
                 const std::vector<std::string>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << header << '\n';
  for (const auto& row : rows) out << row << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

int cmd_free_particle(const SweepConfig& cfg) {
  require_scenario(cfg, "free-particle");
  validate_ranges(cfg);
  const std::string path = cfg.out.empty() ? "free_particle.csv" : cfg.out;

  const auto zs = grid(cfg.z);
  const auto rs = grid(cfg.r);
  const auto thetas = grid(cfg.theta);
  const auto ks = grid(cfg.k);

  std::vector<std::string> rows;
  rows.reserve(zs.size() * rs.size() * thetas.size() * ks.size());
  for (const double z : zs)
    for (const double r : rs)
      for (const double theta : thetas)
        for (const double k : ks) {
          const double gamma = gaussian::gamma_free_particle(z, theta, k, r);
          rows.push_back(fmt12(z) + ',' + fmt12(r) + ',' + fmt12(theta) + ',' +
                         fmt12(k) + ',' + fmt12(gamma) +
                         (gamma < 1.0 - 1e-12 ? ",1" : ",0"));
        }
  write_lines(path, "z,R,theta,k,gamma,violation", rows);
  return 0;
}

int cmd_ghz(const SweepConfig& cfg, bool closed_form_only) {
  require_scenario(cfg, "ghz");
  validate_ranges(cfg);
  if (cfg.dt.steps != 1)
    throw std::invalid_argument("the ghz table takes a single dt; set steps to 1");
  const double dt = cfg.dt.min;
  const std::string path = cfg.out.empty() ? "ghz.csv" : cfg.out;

  const auto ns = grid(cfg.n);
  const auto ps = grid(cfg.p);
  if (!closed_form_only)
    for (const double nv : ns)
      if (static_cast<int>(std::lround(nv)) + 1 > 12)
        throw std::invalid_argument(
            "N = " + std::to_string(static_cast<int>(std::lround(nv))) +
            " exceeds the dense-state guard (N+1 <= 12); rerun with "
            "--closed-form-only");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> rows;
  rows.reserve(ns.size() * ps.size());
  for (const double nv : ns)
    for (const double p : ps) {
      const int n = static_cast<int>(std::lround(nv));
      const ghz::GhzScenario s{n, p, cfg.units.mu, cfg.units.hbar};
      const double time_bound = ghz::ghz_time_bound(s);
      double qfi_dense = nan;
      double var_dense = nan;
      bool violated;
      if (closed_form_only) {
        // Small-dt limit of the distance witness; exact columns carry the
        // dt dependence when the dense path is available.
        violated = ghz::ghz_conditional_qfi_closed(s) >
                   4.0 * ghz::ghz_energy_variance_exact(s);
      } else {
        qfi_dense = ghz::ghz_conditional_qfi_dense(s);
        const auto a = ghz::alice_pauli_assemblage(ghz::noisy_ghz(s), ghz::PauliSetting::z);
        const Observable jz{ghz::collective_jz(n, s.mu), "energy"};
        var_dense = conditional_variance(a, jz).value;
        violated = ghz::ghz_geometric_witness(s, dt).violated;
      }
      rows.push_back(std::to_string(n) + ',' + fmt12(p) + ',' + fmt12(s.mu) + ',' +
                     fmt12(ghz::critical_visibility(n)) + ',' + fmt12(time_bound) +
                     ',' + fmt12(ghz::ghz_conditional_qfi_closed(s)) + ',' +
                     fmt12(qfi_dense) + ',' + fmt12(ghz::ghz_energy_variance_bound(s)) +
                     ',' + fmt12(var_dense) + (violated ? ",1" : ",0"));
    }
  write_lines(path, "N,p,mu,p_c,time_bound,qfi_closed,qfi_dense,var_bound,var_dense,violation_at_dt",
              rows);
  return 0;
}

int cmd_verify(const SweepConfig& cfg, bool audit_momentum_scaled_xx) {
  require_scenario(cfg, "");
  const std::string path = cfg.out.empty() ? "verify_report.json" : cfg.out;

  const auto results = run_verification_checks(cfg.seed, audit_momentum_scaled_xx);
  int failed = 0;
  for (const auto& r : results) {
    if (!r.passed) ++failed;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.check_id
              << " measured=" << fmt_sci(r.measured)
              << " tolerance=" << fmt_sci(r.tolerance) << '\n';
  }
  std::cout << "verification: " << (results.size() - failed) << '/' << results.size()
            << " checks passed\n";

  nlohmann::json report = nlohmann::json::array();
  for (const auto& r : results)
    report.push_back({{"check_id", r.check_id},
                      {"passed", r.passed},
                      {"measured", r.measured},
                      {"tolerance", r.tolerance}});
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << report.dump(2) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
  return failed == 0 ? 0 : 1;
}

}  // namespace qsteer::cli
