// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here on purpose; loosening them is a contract change.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "qsteer/assemblage.hpp"
#include "qsteer/gaussian.hpp"
#include "qsteer/ghz.hpp"
#include "qsteer/oracle.hpp"
#include "qsteer/sampling.hpp"

namespace fs = std::filesystem;
using namespace qsteer;
using Clock = std::chrono::steady_clock;

namespace {

const Constants kNatural{};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CliRun {
  int exit_code = -1;
  std::string output;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + QSTEER_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  CliRun r;
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// quoted closed-form reductions, kept separate from the library formula
double gamma_theta0(double z, double k, double R) {
  return (k + 1.0) * std::sqrt(2.0 * (R * R * z + 2.0));
}

double gamma_theta_pi4(double z, double k, double R) {
  const double z2 = z * z;
  const double cube = (1.0 + z2) * (1.0 + z2) * (1.0 + z2);
  return (k + 1.0) *
         std::sqrt(8.0 * z * (R * R * (z2 * z2 + 1.0) + 2.0 * (z2 * z + z)) / cube);
}

// ---------------------------------------------------------------------------

bool criterion_closed_vs_pipeline(std::string& detail) {
  const auto t0 = Clock::now();
  const auto zs = linspace(0.01, 1.0, 100);
  const auto rs = linspace(0.01, 3.0, 100);
  const auto thetas = linspace(0.0, M_PI / 2.0, 5);
  const std::vector<double> ks{0.0, 0.5, 2.0};

  double max_rel = 0.0;
  for (double z : zs)
    for (double R : rs)
      for (double theta : thetas)
        for (double k : ks) {
          const auto p = gaussian::TmssParams::standard(z, theta, k, R, kNatural);
          const double closed = gaussian::gamma_free_particle(z, theta, k, R);
          const double piped = gaussian::gamma_free_particle_pipeline(p, kNatural);
          max_rel = std::max(max_rel, rel_diff(closed, piped));
        }

  const double secs = elapsed_s(t0);
  detail = "max rel " + sci(max_rel) + " over 150000 points in " + sci(secs) + " s";
  return max_rel <= 1e-10 && secs < 60.0;
}

bool criterion_reductions(std::string& detail) {
  double worst0 = 0.0, worst4 = 0.0;
  for (double z : linspace(0.01, 1.0, 100))
    for (double R : {0.5, 1.0, 2.0})
      for (double k : {0.0, 1.0}) {
        worst0 = std::max(
            worst0, rel_diff(gaussian::gamma_free_particle(z, 0.0, k, R), gamma_theta0(z, k, R)));
        worst4 = std::max(worst4, rel_diff(gaussian::gamma_free_particle(z, M_PI / 4.0, k, R),
                                           gamma_theta_pi4(z, k, R)));
      }
  detail = "theta=0 max rel " + sci(worst0) + ", theta=pi/4 max rel " + sci(worst4);
  return worst0 <= 1e-12 && worst4 <= 1e-12;
}

bool criterion_violation_region(std::string& detail) {
  const auto zs = linspace(0.005, 0.995, 199);
  const std::vector<double> rs{1e-3, 0.01, 0.1, 0.3, 1.0};

  std::size_t previous_count = zs.size() + 1;
  bool shape_ok = true;
  bool nonempty = true;
  for (double R : rs) {
    std::size_t count = 0;
    bool left_region = false;
    for (double z : zs) {
      const bool violated = gaussian::gamma_free_particle(z, M_PI / 4.0, 0.0, R) < 1.0;
      if (violated) {
        ++count;
        if (left_region) shape_ok = false;  // must be a prefix in z
      } else {
        left_region = true;
      }
    }
    nonempty = nonempty && count > 0;
    if (count > previous_count) shape_ok = false;  // region may only shrink with R
    previous_count = count;
  }

  // boundary of the region as R -> 0, by bisection on gamma(z) = 1
  double lo = 0.05, hi = 0.9;
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gaussian::gamma_free_particle(mid, M_PI / 4.0, 0.0, 0.0) < 1.0 ? lo : hi) = mid;
  }
  const double boundary = 0.5 * (lo + hi);
  const double gap = std::abs(boundary - (2.0 - std::sqrt(3.0)));

  detail = "region prefix-shaped and shrinking, boundary gap " + sci(gap);
  return nonempty && shape_ok && gap <= 1e-6;
}

bool criterion_cv_oracles(std::string& detail) {
  const auto t0 = Clock::now();
  auto rng = oracle::CounterRng::from_seed(20240818, 0);

  struct Case {
    oracle::MomentFunctional f;
    gaussian::Quadrature setting;
  };
  const std::vector<Case> cases{
      {oracle::MomentFunctional::var_x, gaussian::Quadrature::position},
      {oracle::MomentFunctional::var_p, gaussian::Quadrature::momentum},
      {oracle::MomentFunctional::abs_mean_p, gaussian::Quadrature::position},
      {oracle::MomentFunctional::fourth_p, gaussian::Quadrature::momentum},
  };

  double worst_quad = 0.0;
  double worst_mc = 0.0;  // in units of the allowed band
  for (int draw = 0; draw < 50; ++draw) {
    const auto params = sampling::random_tmss(rng, kNatural);
    const auto state = gaussian::tmss_covariance(params, kNatural);
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
      double closed = 0.0;
      switch (cases[ci].f) {
        case oracle::MomentFunctional::var_x:
          closed = gaussian::conditional_quadrature_variance(params, gaussian::Quadrature::position,
                                                             kNatural);
          break;
        case oracle::MomentFunctional::var_p:
          closed = gaussian::conditional_quadrature_variance(params, gaussian::Quadrature::momentum,
                                                             kNatural);
          break;
        case oracle::MomentFunctional::abs_mean_p:
          closed = std::abs(params.p0);
          break;
        case oracle::MomentFunctional::fourth_p:
          closed = 4.0 * params.m * params.m *
                   gaussian::conditional_h_variance_free(params, kNatural);
          break;
      }

      const gaussian::HomodyneSetting setting{cases[ci].setting, 0.0};
      const auto quad = oracle::quad_conditional_moment(state, setting, cases[ci].f, kNatural);
      worst_quad = std::max(worst_quad, rel_diff(quad.value, closed));

      oracle::McConfig cfg;
      cfg.seed = 20240818;
      cfg.stream = 8 * static_cast<std::uint64_t>(draw) + ci + 1;
      cfg.samples = 1000000;
      const auto mc = oracle::mc_conditional_moment(state, setting, cases[ci].f, kNatural, cfg);
      const double band = std::max(4.0 * mc.std_error, 1e-10 * std::abs(closed));
      worst_mc = std::max(worst_mc, std::abs(mc.estimate - closed) / band);
    }
  }

  const double secs = elapsed_s(t0);
  detail = "quad max rel " + sci(worst_quad) + ", mc worst " + sci(worst_mc) +
           " of the 4-sigma band, " + sci(secs) + " s";
  return worst_quad <= 1e-8 && worst_mc <= 1.0 && secs < 300.0;
}

bool criterion_displacement(std::string& detail) {
  double worst_eq = 0.0;
  for (double z : linspace(0.1, 0.9, 9)) {
    const auto p = gaussian::TmssParams::standard(z, 0.0, 0.0, 1.0, kNatural);
    const auto d = gaussian::displacement_protocol_bound(p, 0.8, kNatural);
    worst_eq = std::max(worst_eq, rel_diff(d.actual, d.bound));
    if (d.violated) {
      detail = "saturated case flagged as a violation at z=" + sci(z);
      return false;
    }
  }

  double worst_ratio = 0.0;
  for (double z : linspace(0.1, 0.9, 9)) {
    const auto p = gaussian::TmssParams::standard(z, M_PI / 4.0, 0.0, 1.0, kNatural);
    const auto d = gaussian::displacement_protocol_bound(p, 0.8, kNatural);
    if (!d.violated) {
      detail = "no violation at theta=pi/4, z=" + sci(z);
      return false;
    }
    const double want = (z * z + 1.0) / (2.0 * z);
    worst_ratio = std::max(worst_ratio, rel_diff(d.bound / d.actual, want));
  }

  detail = "equality gap " + sci(worst_eq) + ", ratio gap " + sci(worst_ratio);
  return worst_eq <= 1e-12 && worst_ratio <= 1e-12;
}

bool criterion_lhs_soundness(std::string& detail) {
  auto rng = oracle::CounterRng::from_seed(606060, 0);
  int informative = 0;
  double min_gamma = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const int dim = 2 + static_cast<int>(rng.next_u64() % 3);
    const int hidden = 2 + static_cast<int>(rng.next_u64() % 3);
    const int n_settings = 2 + static_cast<int>(rng.next_u64() % 2);
    const int n_outcomes = 2 + static_cast<int>(rng.next_u64() % 2);
    const auto model = sampling::random_lhs_model(rng, dim, hidden, n_settings, n_outcomes);

    std::vector<std::string> cfg_settings, cfg_outcomes;
    for (int s = 0; s < n_settings; ++s) cfg_settings.push_back("X" + std::to_string(s));
    for (int a = 0; a < n_outcomes; ++a) cfg_outcomes.push_back("a" + std::to_string(a));
    const auto assemblage = assemblage_from_lhs(model, cfg_settings, cfg_outcomes);
    assemblage.validate();

    const Observable m{sampling::gue_observable(rng, dim), ""};
    const Observable h{sampling::gue_observable(rng, dim), "energy"};

    const auto mt = mt_witness(assemblage, m, h, kNatural);
    if (mt.violated) {
      detail = "mt witness tripped on model " + std::to_string(i);
      return false;
    }
    if (!mt.degenerate) {
      ++informative;
      min_gamma = std::min(min_gamma, mt.gamma);
      if (mt.gamma < 1.0 - 1e-9) {
        detail = "mt gamma " + sci(mt.gamma) + " below one on model " + std::to_string(i);
        return false;
      }
    }

    const double dt = 0.3;
    const auto evolved = evolve_assemblage(assemblage, h, dt, kNatural);
    const auto geo = geometric_time_bound(assemblage, evolved, h, dt, kNatural);
    if (geo.violated) {
      detail = "geometric witness tripped on model " + std::to_string(i);
      return false;
    }
  }
  detail = "200 models, " + std::to_string(informative) + " informative, min gamma " +
           sci(min_gamma);
  return informative >= 150;
}

bool criterion_ghz_closed_forms(std::string& detail) {
  // quoted sigma_z variance against the dense assemblage value
  double worst_quoted = 0.0;
  for (int n = 1; n <= 8; ++n)
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const ghz::GhzScenario s{n, p, 1.0, 1.0};
      const auto rho = ghz::noisy_ghz(s);
      const auto z_part = ghz::alice_pauli_assemblage(rho, ghz::PauliSetting::z);
      const Observable jz{ghz::collective_jz(n, s.mu), "energy"};
      const double dense = conditional_variance(z_part, jz).value;
      worst_quoted = std::max(worst_quoted, rel_diff(dense, ghz::ghz_energy_variance_bound(s)));
    }
  const bool quoted_ok = worst_quoted <= 1e-10;

  bool visibility_ok =
      std::abs(ghz::critical_visibility(1) - (std::sqrt(17.0) - 1.0) / 8.0) <= 1e-12;
  double worst_residual = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double pc = ghz::critical_visibility(n);
    const double scale = std::pow(2.0, 1 - n);
    worst_residual = std::max(
        worst_residual,
        std::abs(pc * pc * (4.0 * n + 1.0 - scale) + pc * (2.0 * scale - 1.0) - scale));
  }
  visibility_ok = visibility_ok && worst_residual <= 1e-10;

  const double tb = ghz::ghz_time_bound({1, 0.5, 1.0, 1.0});
  const bool time_ok = std::abs(tb - 1.0 / std::sqrt(3.0)) <= 1e-12;

  detail = std::string("quoted-variance gap ") + sci(worst_quoted) +
           (quoted_ok ? "" : " (dense value carries the extra (1+pn) factor)") +
           "; visibility " + (visibility_ok ? "ok" : "bad") + ", residual " +
           sci(worst_residual) + "; time bound " + (time_ok ? "ok" : "bad");
  return quoted_ok && visibility_ok && time_ok;
}

bool criterion_qfi_oracle(std::string& detail) {
  auto rng = oracle::CounterRng::from_seed(777777, 0);
  double worst_fd = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto rho = sampling::full_rank_state(rng, 4);
    const auto obs = sampling::gue_observable(rng, 4);
    const double spectral = ghz::spectral_qfi(rho, obs, kNatural);
    const double fd = oracle::qfi_finite_difference(rho, obs, kNatural, 3e-4);
    worst_fd = std::max(worst_fd, rel_diff(spectral, fd));
  }

  double worst_pure = 0.0;
  for (int dim : {2, 4, 8})
    for (int i = 0; i < 10; ++i) {
      const auto psi = sampling::ginibre_state(rng, dim, 1);
      const auto obs = sampling::gue_observable(rng, dim);
      worst_pure = std::max(
          worst_pure, rel_diff(ghz::spectral_qfi(psi, obs, kNatural), 4.0 * variance(psi, obs)));
    }

  detail = "fd max rel " + sci(worst_fd) + " at eps 3e-4, pure-state gap " + sci(worst_pure);
  return worst_fd <= 1e-6 && worst_pure <= 1e-10;
}

bool criterion_free_evolution(std::string& detail) {
  auto rng = oracle::CounterRng::from_seed(909090, 0);

  double worst_det = 0.0;
  for (int i = 0; i < 50; ++i) {
    gaussian::SingleModeGaussian s;
    const double a = 0.1 + rng.next_double();
    const double b = 0.1 + rng.next_double();
    const double cross = (2.0 * rng.next_double() - 1.0) * 0.9 * std::sqrt(a * b);
    s.cov << a, cross, cross, b;
    s.mean << rng.next_normal(), rng.next_normal();
    const double dt = 5.0 * rng.next_double();
    const auto evolved = gaussian::evolve_free(s, dt, kNatural);
    worst_det = std::max(worst_det,
                         std::abs(evolved.cov.determinant() / s.cov.determinant() - 1.0));
  }
  if (worst_det > 1e-12) {
    detail = "determinant drift " + sci(worst_det);
    return false;
  }

  int accepted = 0;
  double worst_cross = 0.0;
  for (int attempt = 0; attempt < 2000 && accepted < 100; ++attempt) {
    const double z = 0.02 + 0.23 * rng.next_double();
    const double R = 1e-4 + 0.25 * rng.next_double();
    const double k = (rng.next_u64() % 2 == 0) ? 0.0 : 0.2;
    const double gamma0 = gaussian::gamma_free_particle(z, M_PI / 4.0, k, R);
    if (gamma0 >= 0.999) continue;
    ++accepted;

    const auto params = gaussian::TmssParams::standard(z, M_PI / 4.0, k, R, kNatural);
    const auto state = gaussian::tmss_covariance(params, kNatural);
    const auto cond = gaussian::condition_on_homodyne(
        state, {gaussian::Quadrature::position, 0.0}, state.mean(0), kNatural);
    const double var0 = cond.cond.cov(0, 0);
    auto gamma_at = [&](double dt) {
      return gamma0 *
             std::sqrt(gaussian::evolve_free(cond.cond, dt, kNatural).cov(0, 0) / var0);
    };

    const auto threshold = gaussian::time_threshold_free(params, kNatural);
    if (!(threshold.dt_numeric > 0.0)) {
      detail = "no numeric crossing despite gamma0 < 1";
      return false;
    }

    double previous = gamma_at(0.0);
    for (double dt : linspace(0.0, 2.0 * threshold.dt_numeric, 40)) {
      const double g = gamma_at(dt);
      if (g < previous - 1e-12) {
        detail = "gamma(dt) decreased along free evolution";
        return false;
      }
      previous = g;
    }

    worst_cross = std::max(worst_cross, std::abs(gamma_at(threshold.dt_numeric) - 1.0));
  }

  detail = "det drift " + sci(worst_det) + ", " + std::to_string(accepted) +
           " crossings, worst |gamma - 1| " + sci(worst_cross);
  return accepted >= 100 && worst_cross <= 1e-7;
}

bool criterion_cli_determinism(std::string& detail) {
  const fs::path dir = fs::temp_directory_path() / "qsteer_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto path = [&](const char* name) { return (dir / name).string(); };

  const std::string sweep_args =
      "free-particle --z-min 0.05 --z-max 1 --z-steps 20 --r-min 0.001 --r-max 2 "
      "--r-steps 5 --theta 0.7853981633974483 --k 0 --seed 3 --out ";
  const auto s1 = run_cli(sweep_args + path("a.csv"));
  const auto s2 = run_cli(sweep_args + path("b.csv"));
  if (s1.exit_code != 0 || s2.exit_code != 0) {
    detail = "sweep exited with " + std::to_string(s1.exit_code) + "/" +
             std::to_string(s2.exit_code);
    return false;
  }
  const bool sweep_same =
      !read_file(path("a.csv")).empty() && read_file(path("a.csv")) == read_file(path("b.csv"));

  const auto v1 = run_cli("verify --seed 11 --out " + path("va.json"));
  const auto v2 = run_cli("verify --seed 11 --out " + path("vb.json"));
  if (v1.exit_code != 0 || v2.exit_code != 0) {
    detail = "verify exited with " + std::to_string(v1.exit_code) + "/" +
             std::to_string(v2.exit_code);
    return false;
  }
  const bool verify_same = v1.output == v2.output && !read_file(path("va.json")).empty() &&
                           read_file(path("va.json")) == read_file(path("vb.json"));

  detail = std::string("sweep bytes ") + (sweep_same ? "identical" : "differ") +
           ", verify bytes " + (verify_same ? "identical" : "differ");
  return sweep_same && verify_same;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria{
      {"closed-form gamma vs measurement pipeline", criterion_closed_vs_pipeline},
      {"theta = 0 and theta = pi/4 reductions", criterion_reductions},
      {"violation region shape and its R -> 0 boundary", criterion_violation_region},
      {"conditional moments vs quadrature and monte carlo", criterion_cv_oracles},
      {"displacement protocol equality and violation", criterion_displacement},
      {"lhs models never violate the witnesses", criterion_lhs_soundness},
      {"ghz closed forms (quoted variance, p_c, time bound)", criterion_ghz_closed_forms},
      {"spectral qfi vs finite differences and pure states", criterion_qfi_oracle},
      {"free evolution: symplectic, monotone, crossing", criterion_free_evolution},
      {"cli byte-level determinism", criterion_cli_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!ok) ++failed;
    std::printf("[%s] criterion %2zu: %s  (%s)\n", ok ? "PASS" : "FAIL", i + 1,
                criteria[i].name, detail.c_str());
    std::fflush(stdout);
  }

  std::printf("acceptance: %zu/%zu criteria passed\n", criteria.size() - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
