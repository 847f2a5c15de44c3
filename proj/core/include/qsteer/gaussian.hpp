#pragma once

#include <Eigen/Dense>

#include "qsteer/assemblage.hpp"

namespace qsteer::gaussian {

enum class Quadrature { position, momentum };

// Convention for the x_A x_B covariance entry. `symmetric` is the physical
// choice (two-mode squeezing through a beamsplitter); `momentum_scaled`
// multiplies that entry by hbar^2/p0^2 and is kept only so audits can show
// it breaks both physicality and the closed-form/pipeline agreement.
enum class XxCoupling { symmetric, momentum_scaled };

// Two-mode squeezed scenario: squeezing ratio z in (0, 1], mixing angle
// theta in [0, pi/2], thermal excess k >= 0, widths dx0/dp0 with
// dx0 dp0 = hbar (k+1)/2, mean momentum p0.
struct TmssParams {
  double z = 1.0;
  double theta = 0.0;
  double k = 0.0;
  double dx0 = 0.0;
  double dp0 = 0.0;
  double p0 = 0.0;
  double m = 1.0;

  // Symmetric vacuum split dx0 = dp0 = sqrt(hbar (k+1) / 2), p0 = dp0 / R.
  static TmssParams standard(double z, double theta, double k, double R,
                             const Constants& c);

  double ratio() const;  // R = dp0 / |p0|
  void validate(const Constants& c) const;
};

// Ordering (x_A, p_A, x_B, p_B).
struct GaussianBipartiteState {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
};

struct SingleModeGaussian {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

struct HomodyneSetting {
  Quadrature quadrature = Quadrature::position;
  double noise = 0.0;  // 0 = ideal; otherwise squeezing scale of the meter
};

struct ConditionResult {
  double pdf = 0.0;  // outcome density at the measured value
  SingleModeGaussian cond;
};

struct TimeThreshold {
  double dt_closed = 0.0;
  double dt_numeric = 0.0;
};

struct DisplacementBound {
  double bound = 0.0;
  double actual = 0.0;
  bool violated = false;
};

GaussianBipartiteState tmss_covariance(const TmssParams& p, const Constants& c,
                                       XxCoupling coupling = XxCoupling::symmetric);

// Throws std::runtime_error unless cov + i (hbar/2) Omega >= -1e-10.
void validate_physical(const GaussianBipartiteState& s, const Constants& c);

// Gaussian conditioning of Bob's mode on Alice's homodyne outcome, via the
// Schur complement with a pseudoinverse for the ideal (singular) meter.
ConditionResult condition_on_homodyne(const GaussianBipartiteState& s,
                                      const HomodyneSetting& setting, double outcome,
                                      const Constants& c);

// Conditional variance of Bob's quadrature when Alice measures the same
// quadrature: dx0^2 z / (z^2 cos^2 + sin^2) and the x<->p mirror.
double conditional_quadrature_variance(const TmssParams& p, Quadrature q,
                                       const Constants& c);

// Conditional variance of H = p^2/2m, averaged over Alice's momentum
// homodyne outcomes: (Delta p^2)^2_{B|A} / (4 m^2).
double conditional_h_variance_free(const TmssParams& p, const Constants& c);

// Closed-form steering parameter for the free particle. gamma >= 1 for
// every LHS model; gamma < 1 certifies steering.
double gamma_free_particle(double z, double theta, double k, double R);

// Same quantity assembled through tmss_covariance + condition_on_homodyne
// instead of the closed form. Used to cross-audit gamma_free_particle.
double gamma_free_particle_pipeline(const TmssParams& p, const Constants& c,
                                    XxCoupling coupling = XxCoupling::symmetric);

// Free evolution of covariance and mean by S = [[1, dt/m], [0, 1]].
SingleModeGaussian evolve_free(const SingleModeGaussian& s, double dt,
                               const Constants& c);

// Time window for violating the criterion: dt_closed is the linear
// (1 - gamma) hbar / (4 R^2 Var H) expression, dt_numeric the bisection
// root of gamma(dt) = 1; they are reported separately, never asserted
// equal. Requires natural units (hbar = m = 1) and p0 != 0.
TimeThreshold time_threshold_free(const TmssParams& p, const Constants& c);

// Protocol of displacing Bob's conditional mean position by dmean_x:
// actual transit time m dmean_x / p0 against the conditional-variance
// bound hbar m dmean_x / (2 p0 (Delta p)_{B|A} (Delta x)_{B|A}).
DisplacementBound displacement_protocol_bound(const TmssParams& p, double dmean_x,
                                              const Constants& c);

}  // namespace qsteer::gaussian
