#include "verify_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsteer/assemblage.hpp"
#include "qsteer/gaussian.hpp"
#include "qsteer/ghz.hpp"
#include "qsteer/oracle.hpp"
#include "qsteer/sampling.hpp"

namespace qsteer::cli {

namespace {

using oracle::CounterRng;
using oracle::McConfig;
using oracle::MomentFunctional;

constexpr double kHuge = 1e12;  // stands in for "disagrees wildly" in reports

double rel(double got, double want) {
  return std::abs(got - want) / std::max(1e-300, std::abs(want));
}

double finite_or_huge(double v) { return std::isfinite(v) ? std::min(v, kHuge) : kHuge; }

int pick(CounterRng& rng, int lo, int hi) {
  const int span = hi - lo + 1;
  const int v = lo + static_cast<int>(rng.next_double() * span);
  return std::min(v, hi);
}

struct LhsDraw {
  DiscreteAssemblage assemblage;
  Observable m;
  Observable h;
};

LhsDraw draw_lhs(CounterRng& rng) {
  const int dim = pick(rng, 2, 4);
  const int hidden = pick(rng, 2, 4);
  const int n_settings = pick(rng, 2, 3);
  const int n_outcomes = pick(rng, 2, 3);
  const LhsModel model = sampling::random_lhs_model(rng, dim, hidden, n_settings, n_outcomes);
  std::vector<std::string> settings, outcomes;
  for (int x = 0; x < n_settings; ++x) settings.push_back("X" + std::to_string(x));
  for (int a = 0; a < n_outcomes; ++a) outcomes.push_back("a" + std::to_string(a));
  LhsDraw d;
  d.assemblage = assemblage_from_lhs(model, settings, outcomes);
  d.assemblage.validate();
  d.m = {sampling::gue_observable(rng, dim), "dimensionless"};
  d.h = {sampling::gue_observable(rng, dim), "energy"};
  return d;
}

const std::vector<double>& z_grid_100() {
  static const std::vector<double> zs = [] {
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(0.01 + 0.99 * i / 99.0);
    return v;
  }();
  return zs;
}

double gamma_scaling_at(const gaussian::TmssParams& p, const Constants& c, double dt,
                        double gamma0) {
  const gaussian::GaussianBipartiteState s = gaussian::tmss_covariance(p, c);
  const auto cond =
      gaussian::condition_on_homodyne(s, {gaussian::Quadrature::position, 0.0}, 0.0, c);
  const auto later = gaussian::evolve_free(cond.cond, dt, c);
  return gamma0 * std::sqrt(later.cov(0, 0) / cond.cond.cov(0, 0));
}

}  // namespace

std::vector<CheckResult> run_verification_checks(std::uint64_t seed,
                                                 bool audit_momentum_scaled_xx) {
  const Constants c{};
  std::vector<CheckResult> out;
  const auto add = [&out](std::string id, double measured, double tolerance) {
    out.push_back({std::move(id), measured <= tolerance, measured, tolerance});
  };
  const std::vector<double> k_grid{0.0, 0.5, 2.0};
  const std::vector<double> r_grid{0.1, 1.0, 3.0};

  {  // gamma reduction at theta = 0: gamma^2 = 2 (k+1)^2 (R^2 z + 2)
    double worst = 0.0;
    for (double z : z_grid_100())
      for (double k : k_grid)
        for (double r : r_grid) {
          const double g = gaussian::gamma_free_particle(z, 0.0, k, r);
          const double want = 2.0 * (k + 1.0) * (k + 1.0) * (r * r * z + 2.0);
          worst = std::max(worst, rel(g * g, want));
        }
    add("gamma_theta0_reduction", worst, 1e-12);
  }

  {  // gamma reduction at theta = pi/4
    double worst = 0.0;
    for (double z : z_grid_100())
      for (double k : k_grid)
        for (double r : r_grid) {
          const double g = gaussian::gamma_free_particle(z, M_PI / 4.0, k, r);
          const double z2 = z * z;
          const double want = 8.0 * (k + 1.0) * (k + 1.0) * z *
                              (r * r * (z2 * z2 + 1.0) + 2.0 * (z2 * z + z)) /
                              ((z2 + 1.0) * (z2 + 1.0) * (z2 + 1.0));
          worst = std::max(worst, rel(g * g, want));
        }
    add("gamma_theta_pi4_reduction", worst, 1e-12);
  }

  {  // closed form against the covariance pipeline (the audit target)
    CounterRng rng = CounterRng::from_seed(seed, 3);
    const auto coupling = audit_momentum_scaled_xx ? gaussian::XxCoupling::momentum_scaled
                                                   : gaussian::XxCoupling::symmetric;
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const auto p = sampling::random_tmss(rng, c);
      const double closed = gaussian::gamma_free_particle(p.z, p.theta, p.k, p.ratio());
      double diff;
      try {
        diff = rel(gaussian::gamma_free_particle_pipeline(p, c, coupling), closed);
      } catch (const std::exception&) {
        diff = kHuge;
      }
      worst = std::max(worst, finite_or_huge(diff));
    }
    add("gamma_closed_form_vs_pipeline", worst, 1e-10);
  }

  {  // physicality of the squeezed covariance over random draws
    CounterRng rng = CounterRng::from_seed(seed, 4);
    double failures = 0.0;
    for (int i = 0; i < 50; ++i) {
      try {
        gaussian::validate_physical(gaussian::tmss_covariance(sampling::random_tmss(rng, c), c), c);
      } catch (const std::exception&) {
        failures += 1.0;
      }
    }
    add("tmss_physicality", failures, 0.0);
  }

  {  // closed conditional variances against the Schur-complement conditioning
    CounterRng rng = CounterRng::from_seed(seed, 5);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto p = sampling::random_tmss(rng, c);
      const auto s = gaussian::tmss_covariance(p, c);
      const auto cx =
          gaussian::condition_on_homodyne(s, {gaussian::Quadrature::position, 0.0}, 0.3, c);
      const auto cp =
          gaussian::condition_on_homodyne(s, {gaussian::Quadrature::momentum, 0.0}, p.p0, c);
      worst = std::max(
          worst, rel(cx.cond.cov(0, 0),
                     gaussian::conditional_quadrature_variance(p, gaussian::Quadrature::position, c)));
      worst = std::max(
          worst, rel(cp.cond.cov(1, 1),
                     gaussian::conditional_quadrature_variance(p, gaussian::Quadrature::momentum, c)));
    }
    add("conditional_variance_schur", worst, 1e-12);
  }

  {  // free-Hamiltonian variance special case z=1, theta=0, p0=0
    gaussian::TmssParams p;
    p.z = 1.0;
    p.theta = 0.0;
    p.k = 0.0;
    p.dx0 = std::sqrt(c.hbar / 2.0);
    p.dp0 = p.dx0;
    p.p0 = 0.0;
    p.m = c.m;
    const double want = std::pow(p.dp0, 4) / (2.0 * c.m * c.m);
    add("fourth_moment_special_case", rel(gaussian::conditional_h_variance_free(p, c), want),
        1e-12);
  }

  const auto quad_check = [&](std::string id, std::uint64_t stream, MomentFunctional f,
                              gaussian::Quadrature q) {
    CounterRng rng = CounterRng::from_seed(seed, stream);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const auto p = sampling::random_tmss(rng, c);
      const auto s = gaussian::tmss_covariance(p, c);
      const double got = oracle::quad_conditional_moment(s, {q, 0.0}, f, c).value;
      double want = 0.0;
      switch (f) {
        case MomentFunctional::var_x:
          want = gaussian::conditional_quadrature_variance(p, gaussian::Quadrature::position, c);
          break;
        case MomentFunctional::var_p:
          want = gaussian::conditional_quadrature_variance(p, gaussian::Quadrature::momentum, c);
          break;
        case MomentFunctional::abs_mean_p:
          want = std::abs(p.p0);
          break;
        case MomentFunctional::fourth_p:
          want = 4.0 * c.m * c.m * gaussian::conditional_h_variance_free(p, c);
          break;
      }
      worst = std::max(worst, rel(got, want));
    }
    add(std::move(id), worst, 1e-8);
  };
  quad_check("quad_var_x", 7, MomentFunctional::var_x, gaussian::Quadrature::position);
  quad_check("quad_var_p", 8, MomentFunctional::var_p, gaussian::Quadrature::momentum);
  quad_check("quad_abs_mean_p", 9, MomentFunctional::abs_mean_p,
             gaussian::Quadrature::position);
  quad_check("quad_fourth_p", 10, MomentFunctional::fourth_p,
             gaussian::Quadrature::momentum);

  const auto mc_check = [&](std::string id, std::uint64_t stream, int draws,
                            MomentFunctional f, gaussian::Quadrature q) {
    CounterRng rng = CounterRng::from_seed(seed, stream);
    double worst = 0.0;
    for (int i = 0; i < draws; ++i) {
      const auto p = sampling::random_tmss(rng, c);
      const auto s = gaussian::tmss_covariance(p, c);
      const double want =
          f == MomentFunctional::var_x
              ? gaussian::conditional_quadrature_variance(p, gaussian::Quadrature::position, c)
              : 4.0 * c.m * c.m * gaussian::conditional_h_variance_free(p, c);
      const auto mc = oracle::mc_conditional_moment(
          s, {q, 0.0}, f, c, McConfig{seed, stream * 1000 + std::uint64_t(i), 1000000});
      const double allowed = std::max(4.0 * mc.std_error, 1e-10 * std::abs(want));
      worst = std::max(worst, std::abs(mc.estimate - want) / allowed);
    }
    add(std::move(id), worst, 1.0);
  };
  mc_check("mc_var_x", 11, 6, MomentFunctional::var_x, gaussian::Quadrature::position);
  mc_check("mc_fourth_p", 12, 4, MomentFunctional::fourth_p, gaussian::Quadrature::momentum);

  {  // identical seed and stream must reproduce the estimate bit for bit
    CounterRng rng = CounterRng::from_seed(seed, 13);
    const auto p = sampling::random_tmss(rng, c);
    const auto s = gaussian::tmss_covariance(p, c);
    const McConfig cfg{seed, 300, 200000};
    const double a = oracle::mc_conditional_moment(s, {gaussian::Quadrature::position, 0.0},
                                                   MomentFunctional::var_x, c, cfg)
                         .estimate;
    const double b = oracle::mc_conditional_moment(s, {gaussian::Quadrature::position, 0.0},
                                                   MomentFunctional::var_x, c, cfg)
                         .estimate;
    add("mc_determinism", std::abs(a - b), 0.0);
  }

  {  // displacement protocol: theta = 0 saturates, theta = pi/4 violates
    double worst_eq = 0.0;
    double worst_ratio = 0.0;
    for (int i = 1; i <= 9; ++i) {
      const double z = 0.1 * i;
      const auto p0 = gaussian::TmssParams::standard(z, 0.0, 0.0, 1.0, c);
      const auto b0 = gaussian::displacement_protocol_bound(p0, 0.7, c);
      worst_eq = std::max(worst_eq, rel(b0.bound, b0.actual));

      const auto p4 = gaussian::TmssParams::standard(z, M_PI / 4.0, 0.0, 1.0, c);
      const auto b4 = gaussian::displacement_protocol_bound(p4, 0.7, c);
      worst_ratio =
          std::max(worst_ratio, rel(b4.bound / b4.actual, (z * z + 1.0) / (2.0 * z)));
    }
    add("displacement_equality_theta0", worst_eq, 1e-12);
    add("displacement_ratio_theta_pi4", worst_ratio, 1e-12);
  }

  {  // bisection threshold really crosses gamma(dt) = 1
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      const double z = 0.05 + 0.02 * i;
      const auto p = gaussian::TmssParams::standard(z, M_PI / 4.0, 0.0, 0.001, c);
      const double gamma0 = gaussian::gamma_free_particle(z, M_PI / 4.0, 0.0, 0.001);
      const auto tt = gaussian::time_threshold_free(p, c);
      worst = std::max(worst, std::abs(gamma_scaling_at(p, c, tt.dt_numeric, gamma0) - 1.0));
    }
    add("time_threshold_crossing", worst, 1e-8);
  }

  {  // free evolution is symplectic: covariance determinant preserved
    CounterRng rng = CounterRng::from_seed(seed, 17);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const auto p = sampling::random_tmss(rng, c);
      const auto s = gaussian::tmss_covariance(p, c);
      const auto cond =
          gaussian::condition_on_homodyne(s, {gaussian::Quadrature::position, 0.0}, 0.1, c);
      const double dt = 5.0 * rng.next_double();
      const auto later = gaussian::evolve_free(cond.cond, dt, c);
      worst = std::max(worst,
                       rel(later.cov.determinant(), cond.cond.cov.determinant()));
    }
    add("evolve_free_determinant", worst, 1e-12);
  }

  {  // critical visibility closed form and defining quadratic
    add("ghz_critical_visibility_closed_form",
        std::abs(ghz::critical_visibility(1) - (std::sqrt(17.0) - 1.0) / 8.0), 1e-12);
    double worst = 0.0;
    for (int n = 1; n <= 10; ++n) {
      const double pc = ghz::critical_visibility(n);
      const double two = std::pow(2.0, 1.0 - n);
      const double residual =
          pc * pc * (4.0 * n + 1.0 - two) + pc * (2.0 * two - 1.0) - two;
      worst = std::max(worst, std::abs(residual));
    }
    add("ghz_critical_visibility_quadratic", worst, 1e-10);
  }

  add("ghz_time_bound_value",
      std::abs(ghz::ghz_time_bound({1, 0.5, 1.0, 1.0}) - 0.5773502691896257), 1e-12);

  {  // closed-form sensitivity against the dense spectral computation
    double worst = 0.0;
    for (int n = 1; n <= 4; ++n)
      for (double p : {0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        const ghz::GhzScenario s{n, p, 1.0, 1.0};
        worst = std::max(worst, rel(ghz::ghz_conditional_qfi_dense(s),
                                    ghz::ghz_conditional_qfi_closed(s)));
      }
    add("ghz_qfi_closed_vs_dense", worst, 1e-10);
  }

  {  // dense sigma_z conditional energy variance against the exact form
    double worst = 0.0;
    for (int n = 1; n <= 6; ++n)
      for (double p : {0.0, 0.3, 0.5, 0.8, 1.0}) {
        const ghz::GhzScenario s{n, p, 1.0, 1.0};
        const auto a = ghz::alice_pauli_assemblage(ghz::noisy_ghz(s), ghz::PauliSetting::z);
        const Observable jz{ghz::collective_jz(n, s.mu), "energy"};
        const double dense = conditional_variance(a, jz).value;
        const double exact = ghz::ghz_energy_variance_exact(s);
        worst = std::max(worst, std::abs(dense - exact) / std::max(1.0, exact));
      }
    add("ghz_energy_variance_dense_vs_exact", worst, 1e-10);
  }

  {  // pure states: spectral sensitivity reduces to 4 Var(H) / hbar^2
    CounterRng rng = CounterRng::from_seed(seed, 23);
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      const int dim = 1 << (1 + i % 3);
      const Eigen::MatrixXcd rho = sampling::ginibre_state(rng, dim, 1);
      const Eigen::MatrixXcd h = sampling::gue_observable(rng, dim);
      worst = std::max(worst, rel(ghz::spectral_qfi(rho, h, c),
                                  4.0 * variance(rho, h) / (c.hbar * c.hbar)));
    }
    add("qfi_pure_state_identity", worst, 1e-10);
  }

  {  // spectral sensitivity against the finite-difference distance oracle
    CounterRng rng = CounterRng::from_seed(seed, 24);
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      const Eigen::MatrixXcd rho = sampling::full_rank_state(rng, 4);
      const Eigen::MatrixXcd h = sampling::gue_observable(rng, 4);
      worst = std::max(worst, rel(oracle::qfi_finite_difference(rho, h, c, 3e-4),
                                  ghz::spectral_qfi(rho, h, c)));
    }
    add("qfi_finite_difference_agreement", worst, 1e-6);
  }

  {  // hidden-state models can never beat the passage-time bound
    CounterRng rng = CounterRng::from_seed(seed, 25);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
      const LhsDraw d = draw_lhs(rng);
      const WitnessReport w = mt_witness(d.assemblage, d.m, d.h, c);
      if (!w.degenerate) worst = std::max(worst, std::max(0.0, 1.0 - w.gamma));
    }
    add("lhs_mt_soundness", worst, 1e-9);
  }

  {  // hidden-state models keep sensitivity below 4 Var(H) / hbar^2
    CounterRng rng = CounterRng::from_seed(seed, 26);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i) {
      const LhsDraw d = draw_lhs(rng);
      const double f = conditional_qfi(d.assemblage, d.h, c).value;
      const double v = conditional_variance(d.assemblage, d.h).value;
      worst = std::max(
          worst, (f - 4.0 * v / (c.hbar * c.hbar)) / std::max(1.0, f));
    }
    add("lhs_qfi_soundness", std::max(0.0, worst), 1e-9);
  }

  {  // hidden-state models never trip the distance witness
    CounterRng rng = CounterRng::from_seed(seed, 27);
    double violations = 0.0;
    for (int i = 0; i < 40; ++i) {
      const LhsDraw d = draw_lhs(rng);
      const auto later = evolve_assemblage(d.assemblage, d.h, 0.3, c);
      if (geometric_time_bound(d.assemblage, later, d.h, 0.3, c).violated)
        violations += 1.0;
    }
    add("lhs_geometric_soundness", violations, 0.0);
  }

  {  // construction satisfies no-signaling across settings
    CounterRng rng = CounterRng::from_seed(seed, 28);
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
      const LhsDraw d = draw_lhs(rng);
      Eigen::MatrixXcd ref;
      for (const auto& st : d.assemblage.settings) {
        Eigen::MatrixXcd red = Eigen::MatrixXcd::Zero(d.assemblage.dim, d.assemblage.dim);
        for (const auto& oc : st.outcomes) red += oc.probability * oc.state;
        if (ref.size() == 0)
          ref = red;
        else
          worst = std::max(worst, (red - ref).cwiseAbs().maxCoeff());
      }
    }
    add("lhs_no_signaling", worst, 1e-9);
  }

  {  // variance is concave under mixing
    CounterRng rng = CounterRng::from_seed(seed, 29);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const Eigen::MatrixXcd r1 = sampling::ginibre_state(rng, 3);
      const Eigen::MatrixXcd r2 = sampling::ginibre_state(rng, 3);
      const Eigen::MatrixXcd h = sampling::gue_observable(rng, 3);
      const double lam = rng.next_double();
      const double mixed = variance(lam * r1 + (1.0 - lam) * r2, h);
      const double parts = lam * variance(r1, h) + (1.0 - lam) * variance(r2, h);
      worst = std::max(worst, parts - mixed);
    }
    add("variance_concavity", std::max(0.0, worst), 1e-10);
  }

  {  // Bures angle obeys the triangle inequality
    CounterRng rng = CounterRng::from_seed(seed, 30);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Eigen::MatrixXcd a = sampling::ginibre_state(rng, 3);
      const Eigen::MatrixXcd b = sampling::ginibre_state(rng, 3);
      const Eigen::MatrixXcd t = sampling::ginibre_state(rng, 3);
      worst = std::max(worst, ghz::bures_distance(a, t) - ghz::bures_distance(a, b) -
                                  ghz::bures_distance(b, t));
    }
    add("bures_triangle_inequality", std::max(0.0, worst), 1e-10);
  }

  {  // aggregates match the entry-wise exhaustive oracle
    CounterRng rng = CounterRng::from_seed(seed, 31);
    double worst = 0.0;
    for (int i = 0; i < 30; ++i) {
      const LhsDraw d = draw_lhs(rng);
      const auto v = conditional_variance(d.assemblage, d.m);
      const auto ve = oracle::exhaustive_conditional_variance(d.assemblage, d.m);
      const auto r = conditional_mean_rate(d.assemblage, d.m, d.h, c);
      const auto re = oracle::exhaustive_conditional_rate(d.assemblage, d.m, d.h, c);
      worst = std::max(worst, std::abs(v.value - ve.value) / std::max(1.0, std::abs(ve.value)));
      worst = std::max(worst, std::abs(r.value - re.value) / std::max(1.0, std::abs(re.value)));
    }
    add("aggregate_oracle_agreement", worst, 1e-12);
  }

  return out;
}

}  // namespace qsteer::cli
