#pragma once

#include <Eigen/Dense>

#include "qsteer/assemblage.hpp"

namespace qsteer::ghz {

// Alice holds the first (most significant) qubit of an (n+1)-qubit noisy
// GHZ state with visibility p; Bob holds the remaining n qubits.
struct GhzScenario {
  int n = 1;
  double p = 1.0;
  double mu = 1.0;
  double hbar = 1.0;

  void validate() const;
};

enum class PauliSetting { x, z };

// Throws std::invalid_argument unless rho is Hermitian (1e-12), PSD
// (eigenvalues >= -1e-10) and unit trace (1e-10).
void validate_density(const Eigen::MatrixXcd& rho);

// p |GHZ><GHZ| + (1-p) I / 2^(n+1). Dense; refuses n+1 > 14.
Eigen::MatrixXcd noisy_ghz(const GhzScenario& s);

// (mu/2) sum_i sigma_z^(i) on n qubits.
Eigen::MatrixXcd collective_jz(int n, double mu);

// Single-setting assemblage from Alice measuring her qubit in the given
// Pauli basis; outcomes "+" and "-".
DiscreteAssemblage alice_pauli_assemblage(const Eigen::MatrixXcd& rho,
                                          PauliSetting setting);

// 2/hbar^2 sum_{i,j} (l_i - l_j)^2 / (l_i + l_j) |<i|H|j>|^2 over the
// eigendecomposition of rho, pairs with l_i + l_j <= 1e-12 dropped.
// Sensitivity to t under exp(-i H t / hbar): pure states give 4 Var(H)/hbar^2.
double spectral_qfi(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& H,
                    const Constants& c);

// Bures angle arccos tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, pi/2].
double bures_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

// Quoted sigma_z-setting energy-variance bound mu^2 (1-p) n / 4. This is
// the intra-branch average; the assemblage value is
// ghz_energy_variance_exact and exceeds it strictly for p in (0,1).
double ghz_energy_variance_bound(const GhzScenario& s);

// Conditional variance of collective_jz under Alice's sigma_z setting,
// exact by the law of total variance: mu^2 n (1-p) (1 + p n) / 4.
double ghz_energy_variance_exact(const GhzScenario& s);

// Closed form mu^2 p^2 n^2 / (p + 2^(1-n) (1-p)) for the sigma_x-setting
// sensitivity (the hbar^2 <v^2> convention; equals hbar^2 times the
// spectral conditional QFI).
double ghz_conditional_qfi_closed(const GhzScenario& s);

// Same quantity computed densely: sum over sigma_x outcomes of
// p(a) spectral_qfi(rho_a, J_z).
double ghz_conditional_qfi_dense(const GhzScenario& s);

// Visibility above which the sigma_x sensitivity exceeds the quoted
// energy-variance bound: positive root of
// p^2 (4n + 1 - 2^(1-n)) + p (2^(2-n) - 1) - 2^(1-n) = 0.
double critical_visibility(int n);

// Minimal certified rotation time
// (hbar/mu) p sqrt(n / ((2^(1-n)(1-p) + p) (1-p) (1+np))).
// 0 at p = 0; +infinity sentinel at p = 1.
double ghz_time_bound(const GhzScenario& s);

// Bures witness: sigma_x conditional states evolved under collective_jz
// for dt, distance bound against the sigma_z conditional energy variance.
// Dense; refuses n+1 > 12.
WitnessReport ghz_geometric_witness(const GhzScenario& s, double dt);

}  // namespace qsteer::ghz
