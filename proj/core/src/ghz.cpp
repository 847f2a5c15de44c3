#include "qsteer/ghz.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace qsteer::ghz {

namespace {

constexpr double kEigCutoff = 1e-12;

Eigen::MatrixXcd clamped_sqrt(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

void GhzScenario::validate() const {
  if (n < 1) throw std::invalid_argument("need at least one Bob qubit");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("visibility must lie in [0, 1]");
  if (!(mu > 0.0)) throw std::invalid_argument("magnetic moment must be positive");
  if (!(hbar > 0.0)) throw std::invalid_argument("hbar must be positive");
}

void validate_density(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 2)
    throw std::invalid_argument("density matrix must be square, dimension >= 2");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("density matrix is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
    throw std::invalid_argument("density matrix is not normalized");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density matrix is not positive semidefinite");
}

Eigen::MatrixXcd noisy_ghz(const GhzScenario& s) {
  s.validate();
  if (s.n + 1 > 14) throw std::invalid_argument("qubit count too large for a dense state");
  const Eigen::Index d = Eigen::Index(1) << (s.n + 1);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(d, d) * ((1.0 - s.p) / double(d));
  const double g = s.p / 2.0;
  rho(0, 0) += g;
  rho(0, d - 1) += g;
  rho(d - 1, 0) += g;
  rho(d - 1, d - 1) += g;
  return rho;
}

Eigen::MatrixXcd collective_jz(int n, double mu) {
  if (n < 1) throw std::invalid_argument("need at least one qubit");
  if (n > 14) throw std::invalid_argument("qubit count too large for a dense operator");
  const Eigen::Index d = Eigen::Index(1) << n;
  Eigen::MatrixXcd jz = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b)
    jz(b, b) = 0.5 * mu * (n - 2 * std::popcount(static_cast<unsigned long long>(b)));
  return jz;
}

DiscreteAssemblage alice_pauli_assemblage(const Eigen::MatrixXcd& rho,
                                          PauliSetting setting) {
  validate_density(rho);
  const Eigen::Index d = rho.rows();
  if (d % 2 != 0 || d < 4)
    throw std::invalid_argument("state must contain a qubit for Alice plus Bob's share");
  const Eigen::Index db = d / 2;

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::Vector2cd plus, minus;
  std::string label;
  if (setting == PauliSetting::z) {
    plus << 1.0, 0.0;
    minus << 0.0, 1.0;
    label = "sigma_z";
  } else {
    plus << inv_sqrt2, inv_sqrt2;
    minus << inv_sqrt2, -inv_sqrt2;
    label = "sigma_x";
  }

  Setting st;
  st.label = label;
  for (const auto& [name, v] : {std::pair{"+", plus}, std::pair{"-", minus}}) {
    Eigen::MatrixXcd cond = Eigen::MatrixXcd::Zero(db, db);
    for (Eigen::Index i = 0; i < 2; ++i)
      for (Eigen::Index j = 0; j < 2; ++j)
        cond += std::conj(v(i)) * v(j) * rho.block(i * db, j * db, db, db);
    const double prob = cond.trace().real();
    if (prob < 1e-14) continue;
    st.outcomes.push_back({name, prob, cond / prob});
  }

  DiscreteAssemblage a;
  a.dim = static_cast<int>(db);
  a.settings.push_back(std::move(st));
  return a;
}

double spectral_qfi(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h,
                    const Constants& c) {
  if (rho.rows() != h.rows() || rho.cols() != h.cols())
    throw std::invalid_argument("state and generator dimensions differ");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("state is not positive semidefinite");
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd ht = es.eigenvectors().adjoint() * h * es.eigenvectors();

  double acc = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    for (Eigen::Index j = i + 1; j < lam.size(); ++j) {
      const double s = lam(i) + lam(j);
      if (s <= kEigCutoff) continue;
      const double diff = lam(i) - lam(j);
      acc += (diff * diff / s) * std::norm(ht(i, j));
    }
  }
  return 4.0 * acc / (c.hbar * c.hbar);
}

double bures_distance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("state dimensions differ");
  const Eigen::MatrixXcd sr = clamped_sqrt(sigma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sr * rho * sr,
                                                     Eigen::EigenvaluesOnly);
  const double fidelity_root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::acos(std::min(fidelity_root, 1.0));
}

double ghz_energy_variance_bound(const GhzScenario& s) {
  s.validate();
  return s.mu * s.mu * (1.0 - s.p) * s.n / 4.0;
}

double ghz_energy_variance_exact(const GhzScenario& s) {
  s.validate();
  return s.mu * s.mu * s.n * (1.0 - s.p) * (1.0 + s.p * s.n) / 4.0;
}

double ghz_conditional_qfi_closed(const GhzScenario& s) {
  s.validate();
  if (s.p == 0.0) return 0.0;
  const double denom = s.p + std::pow(2.0, 1.0 - s.n) * (1.0 - s.p);
  return s.mu * s.mu * s.p * s.p * double(s.n) * double(s.n) / denom;
}

double ghz_conditional_qfi_dense(const GhzScenario& s) {
  s.validate();
  const Eigen::MatrixXcd rho = noisy_ghz(s);
  const DiscreteAssemblage a = alice_pauli_assemblage(rho, PauliSetting::x);
  const Eigen::MatrixXcd jz = collective_jz(s.n, s.mu);
  const Constants c{s.hbar, 1.0, s.mu};
  double acc = 0.0;
  for (const auto& oc : a.settings.front().outcomes)
    acc += oc.probability * spectral_qfi(oc.state, jz, c);
  return acc;
}

double critical_visibility(int n) {
  if (n < 1) throw std::invalid_argument("need at least one Bob qubit");
  const double d = std::pow(2.0, n);
  return (d + std::sqrt(d * (d + 32.0 * n)) - 4.0) / (8.0 * d * n + 2.0 * d - 4.0);
}

double ghz_time_bound(const GhzScenario& s) {
  s.validate();
  if (s.p == 1.0) return std::numeric_limits<double>::infinity();
  if (s.p == 0.0) return 0.0;
  const double qfi_term = std::pow(2.0, 1.0 - s.n) * (1.0 - s.p) + s.p;
  const double var_term = (1.0 - s.p) * (1.0 + s.n * s.p);
  return (s.hbar / s.mu) * s.p * std::sqrt(double(s.n) / (qfi_term * var_term));
}

WitnessReport ghz_geometric_witness(const GhzScenario& s, double dt) {
  s.validate();
  if (s.n + 1 > 12) throw std::invalid_argument("qubit count too large for this witness");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");

  const Eigen::MatrixXcd rho = noisy_ghz(s);
  const DiscreteAssemblage a =
      combine({alice_pauli_assemblage(rho, PauliSetting::x),
               alice_pauli_assemblage(rho, PauliSetting::z)});
  const Constants c{s.hbar, 1.0, s.mu};
  Observable jz{collective_jz(s.n, s.mu), "energy"};
  const DiscreteAssemblage later = evolve_assemblage(a, jz, dt, c);
  return geometric_time_bound(a, later, jz, dt, c);
}

}  // namespace qsteer::ghz
