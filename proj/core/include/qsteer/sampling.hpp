#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qsteer/assemblage.hpp"
#include "qsteer/gaussian.hpp"
#include "qsteer/oracle.hpp"

// Seeded random instances for property suites: Ginibre density matrices,
// GUE observables, simplex-weighted hidden-state models, and squeezed-state
// parameter draws. Everything flows through CounterRng so suites replay
// bit-for-bit from a seed.
namespace qsteer::sampling {

inline Eigen::MatrixXcd ginibre_state(oracle::CounterRng& rng, int dim, int rank = 0) {
  if (rank <= 0) rank = dim;
  Eigen::MatrixXcd g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < rank; ++j)
      g(i, j) = std::complex<double>(rng.next_normal(), rng.next_normal());
  Eigen::MatrixXcd rho = g * g.adjoint();
  return rho / rho.trace().real();
}

inline Eigen::MatrixXcd full_rank_state(oracle::CounterRng& rng, int dim,
                                        double floor_mix = 0.15) {
  return (1.0 - floor_mix) * ginibre_state(rng, dim) +
         floor_mix / dim * Eigen::MatrixXcd::Identity(dim, dim);
}

inline Eigen::MatrixXcd gue_observable(oracle::CounterRng& rng, int dim) {
  Eigen::MatrixXcd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = std::complex<double>(rng.next_normal(), rng.next_normal());
  return 0.5 * (a + a.adjoint());
}

inline std::vector<double> simplex_point(oracle::CounterRng& rng, int n) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& x : w) {
    x = -std::log(rng.next_double());
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

inline LhsModel random_lhs_model(oracle::CounterRng& rng, int dim, int n_hidden,
                                 int n_settings, int n_outcomes) {
  LhsModel model;
  const std::vector<double> weights = simplex_point(rng, n_hidden);
  for (int l = 0; l < n_hidden; ++l)
    model.ensemble.push_back({weights[l], ginibre_state(rng, dim)});
  model.response.resize(n_settings);
  for (int x = 0; x < n_settings; ++x)
    for (int l = 0; l < n_hidden; ++l)
      model.response[x].push_back(simplex_point(rng, n_outcomes));
  return model;
}

inline gaussian::TmssParams random_tmss(oracle::CounterRng& rng, const Constants& c) {
  const double z = 0.05 + 0.95 * rng.next_double();
  const double theta = 0.5 * M_PI * rng.next_double();
  const double k = 2.0 * rng.next_double();
  const double r = 0.05 + 2.95 * rng.next_double();
  return gaussian::TmssParams::standard(z, theta, k, r, c);
}

}  // namespace qsteer::sampling
