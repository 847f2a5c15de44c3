#pragma once

#include <cstdint>
#include <Eigen/Dense>

#include "qsteer/assemblage.hpp"
#include "qsteer/gaussian.hpp"

namespace qsteer::oracle {

// Gauss-Hermite rule for weight e^{-t^2}, nodes/weights via Golub-Welsch.
// Rules are cached; get() is safe for concurrent readers.
struct QuadratureRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  static const QuadratureRule& get(int order);
};

// Deterministic counter-based generator (splitmix-style avalanche of
// key + counter), independent of any library RNG so Monte Carlo results
// are reproducible across platforms. Streams never overlap.
struct CounterRng {
  std::uint64_t key = 0;
  std::uint64_t counter = 0;
  bool have_spare = false;
  double spare = 0.0;

  static CounterRng from_seed(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double next_double();  // uniform in (0, 1)
  double next_normal();  // standard normal via Box-Muller
};

enum class MomentFunctional { var_x, var_p, fourth_p, abs_mean_p };

struct QuadResult {
  double value = 0.0;
  int order = 0;  // order at which the adaptive doubling converged
};

// Integral over Alice's homodyne outcomes of the conditional-state moment,
// by Gauss-Hermite quadrature with the order doubled until two consecutive
// estimates agree to rel_tol (relative, floored at 1).
QuadResult quad_conditional_moment(const gaussian::GaussianBipartiteState& s,
                                   const gaussian::HomodyneSetting& setting,
                                   MomentFunctional f, const Constants& c,
                                   int initial_order = 40, double rel_tol = 1e-10);

struct McConfig {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t samples = 1000000;  // >= 10000 enforced
};

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Same integral by sampling outcomes from the marginal and evaluating the
// conditional moments exactly per sample; std_error is the CLT estimate.
McResult mc_conditional_moment(const gaussian::GaussianBipartiteState& s,
                               const gaussian::HomodyneSetting& setting,
                               MomentFunctional f, const Constants& c,
                               const McConfig& cfg);

// 4 (D_B(U rho U^dag, rho) / eps)^2 with U = exp(-i H eps / hbar).
// eps clamped to [1e-5, 1e-3]; rank-deficient inputs are floored at 1e-10
// per eigenvalue and renormalized (quadratic accuracy holds for full-rank
// inputs only).
double qfi_finite_difference(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& H,
                             const Constants& c, double eps);

// Definitional re-computations of the assemblage aggregates using plain
// entry-wise loops; deliberately shares no code with the module under test.
ValueSetting exhaustive_conditional_variance(const DiscreteAssemblage& a,
                                             const Observable& M);
ValueSetting exhaustive_conditional_rate(const DiscreteAssemblage& a,
                                         const Observable& M, const Observable& H,
                                         const Constants& c);

}  // namespace qsteer::oracle
