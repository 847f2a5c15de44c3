#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace qsteer {

struct Constants {
  double hbar = 1.0;
  double m = 1.0;   // mass for the free-particle scenarios
  double mu = 1.0;  // energy splitting scale for qubit ensembles
};

// Hermitian operator with an optional unit tag for report readability.
struct Observable {
  Eigen::MatrixXcd matrix;
  std::string units;
};

struct Outcome {
  std::string label;
  double probability = 0.0;
  Eigen::MatrixXcd state;  // normalized conditional density matrix
};

struct Setting {
  std::string label;
  std::vector<Outcome> outcomes;
};

// Collection of conditional states prepared on Bob's side, indexed by
// Alice's measurement setting and outcome. Probabilities are per setting.
struct DiscreteAssemblage {
  int dim = 0;
  std::vector<Setting> settings;

  // Throws std::invalid_argument unless every outcome state is a valid
  // density matrix, per-setting probabilities sum to one (1e-10), and the
  // reduced state is setting-independent (no-signaling, 1e-9 max norm).
  void validate() const;

  Eigen::MatrixXcd reduced_state() const;
};

// Concatenates the settings of several assemblages over the same space.
DiscreteAssemblage combine(const std::vector<DiscreteAssemblage>& parts);

struct HiddenState {
  double weight = 0.0;
  Eigen::MatrixXcd state;
};

// Local hidden state model: ensemble of Bob states with classical
// response probabilities response[setting][lambda][outcome].
struct LhsModel {
  std::vector<HiddenState> ensemble;
  std::vector<std::vector<std::vector<double>>> response;

  void validate() const;
};

struct WitnessReport {
  std::string criterion;
  double measured = 0.0;
  double lhs_bound = 0.0;
  double gamma = 0.0;
  bool violated = false;
  std::string setting_min;  // setting achieving the variance minimum
  std::string setting_max;  // setting achieving the rate / distance maximum
  bool degenerate = false;
};

struct ValueSetting {
  double value = 0.0;
  std::string setting;
};

double expectation(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op);
double variance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op);

// min over settings of sum_a p(a|X) Var(M; rho_{a|X}); ties keep the first
// setting in declaration order.
ValueSetting conditional_variance(const DiscreteAssemblage& a, const Observable& M);

// max over settings of sum_a p(a|X) |<(i/hbar)[H,M]>|_{a|X}, evaluated at t=0.
ValueSetting conditional_mean_rate(const DiscreteAssemblage& a, const Observable& M,
                                   const Observable& H, const Constants& c);

// Mandelstam-Tamm witness conditioned on Alice: the minimal conditional
// passage time of M against hbar / (2 DeltaH_{B|A}). Zero rate or zero
// energy variance reports degenerate instead of infinities.
WitnessReport mt_witness(const DiscreteAssemblage& a, const Observable& M,
                         const Observable& H, const Constants& c);

// hbar dmean / (2 sqrt(var_h) sqrt(var_m)); variances must be positive.
double displacement_time_bound(double dmean, double var_m, double var_h,
                               const Constants& c);

// max over settings of sum_a p(a|X) F_Q(rho_{a|X}, H), with F_Q the
// sensitivity to t under exp(-i H t / hbar).
ValueSetting conditional_qfi(const DiscreteAssemblage& a, const Observable& H,
                             const Constants& c);

// Bures-angle witness between an assemblage and its evolved copy:
// bound = hbar sqrt(<D^2>_max / <Var H>_min); violated when dt beats it.
WitnessReport geometric_time_bound(const DiscreteAssemblage& at_t0,
                                   const DiscreteAssemblage& at_t,
                                   const Observable& H, double dt,
                                   const Constants& c);

// p(a|X) = sum_l w_l r[X][l][a], states renormalized; outcomes below
// 1e-14 probability are dropped.
DiscreteAssemblage assemblage_from_lhs(const LhsModel& model,
                                       const std::vector<std::string>& settings,
                                       const std::vector<std::string>& outcomes);

// Conjugates every conditional state by exp(-i H dt / hbar).
DiscreteAssemblage evolve_assemblage(const DiscreteAssemblage& a, const Observable& H,
                                     double dt, const Constants& c);

}  // namespace qsteer
