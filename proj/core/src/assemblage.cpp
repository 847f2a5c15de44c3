#include "qsteer/assemblage.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "qsteer/ghz.hpp"

namespace qsteer {

namespace {

constexpr double kProbTol = 1e-10;
constexpr double kStateTol = 1e-10;
constexpr double kNoSignalTol = 1e-9;
constexpr double kViolationMargin = 1e-12;

void check_density(const Eigen::MatrixXcd& rho, int dim) {
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("conditional state has wrong dimension");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kStateTol)
    throw std::invalid_argument("conditional state is not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > kStateTol ||
      std::abs(rho.trace().imag()) > kStateTol)
    throw std::invalid_argument("conditional state is not normalized");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("conditional state is not positive semidefinite");
}

void check_observable(const Observable& op, int dim) {
  if (op.matrix.rows() != dim || op.matrix.cols() != dim)
    throw std::invalid_argument("observable dimension mismatch");
  if ((op.matrix - op.matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("observable is not Hermitian");
}

// Settings minimizer/maximizer with first-declared tie-breaking.
template <typename PerSetting>
ValueSetting optimize(const DiscreteAssemblage& a, bool minimize, PerSetting per_setting) {
  if (a.settings.empty()) throw std::invalid_argument("empty assemblage");
  ValueSetting best{minimize ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity(),
                    ""};
  for (const auto& st : a.settings) {
    const double v = per_setting(st);
    if (minimize ? v < best.value : v > best.value) best = {v, st.label};
  }
  return best;
}

}  // namespace

double expectation(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op) {
  return (rho * op).trace().real();
}

double variance(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& op) {
  const double mean = expectation(rho, op);
  return expectation(rho, op * op) - mean * mean;
}

void DiscreteAssemblage::validate() const {
  if (dim < 2) throw std::invalid_argument("assemblage dimension must be >= 2");
  if (settings.empty()) throw std::invalid_argument("assemblage needs at least one setting");
  Eigen::MatrixXcd reference;
  for (const auto& st : settings) {
    if (st.outcomes.empty()) throw std::invalid_argument("setting without outcomes");
    double psum = 0.0;
    Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& oc : st.outcomes) {
      if (oc.probability < -1e-12) throw std::invalid_argument("negative outcome probability");
      check_density(oc.state, dim);
      psum += oc.probability;
      reduced += oc.probability * oc.state;
    }
    if (std::abs(psum - 1.0) > kProbTol)
      throw std::invalid_argument("outcome probabilities do not sum to one");
    if (reference.size() == 0) {
      reference = reduced;
    } else if ((reduced - reference).cwiseAbs().maxCoeff() > kNoSignalTol) {
      throw std::invalid_argument("assemblage violates no-signaling across settings");
    }
  }
}

Eigen::MatrixXcd DiscreteAssemblage::reduced_state() const {
  if (settings.empty()) throw std::invalid_argument("empty assemblage");
  Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& oc : settings.front().outcomes) reduced += oc.probability * oc.state;
  return reduced;
}

DiscreteAssemblage combine(const std::vector<DiscreteAssemblage>& parts) {
  if (parts.empty()) throw std::invalid_argument("nothing to combine");
  DiscreteAssemblage out = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].dim != out.dim) throw std::invalid_argument("dimension mismatch");
    out.settings.insert(out.settings.end(), parts[i].settings.begin(),
                        parts[i].settings.end());
  }
  return out;
}

void LhsModel::validate() const {
  if (ensemble.empty()) throw std::invalid_argument("empty hidden-state ensemble");
  const Eigen::Index dim = ensemble.front().state.rows();
  double wsum = 0.0;
  for (const auto& h : ensemble) {
    if (h.weight < 0.0) throw std::invalid_argument("negative hidden-state weight");
    wsum += h.weight;
    check_density(h.state, static_cast<int>(dim));
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("hidden-state weights do not sum to one");
  for (const auto& per_setting : response) {
    if (per_setting.size() != ensemble.size())
      throw std::invalid_argument("response table does not cover the ensemble");
    for (const auto& row : per_setting) {
      double rsum = 0.0;
      for (const double r : row) {
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("response probability out of range");
        rsum += r;
      }
      if (std::abs(rsum - 1.0) > 1e-12)
        throw std::invalid_argument("response probabilities do not sum to one");
    }
  }
}

ValueSetting conditional_variance(const DiscreteAssemblage& a, const Observable& M) {
  check_observable(M, a.dim);
  const Eigen::MatrixXcd m2 = M.matrix * M.matrix;
  return optimize(a, true, [&](const Setting& st) {
    double acc = 0.0;
    for (const auto& oc : st.outcomes) {
      const double mean = expectation(oc.state, M.matrix);
      acc += oc.probability * (expectation(oc.state, m2) - mean * mean);
    }
    return acc;
  });
}

ValueSetting conditional_mean_rate(const DiscreteAssemblage& a, const Observable& M,
                                   const Observable& H, const Constants& c) {
  check_observable(M, a.dim);
  check_observable(H, a.dim);
  const Eigen::MatrixXcd rate_op =
      std::complex<double>(0.0, 1.0) * (H.matrix * M.matrix - M.matrix * H.matrix) / c.hbar;
  return optimize(a, false, [&](const Setting& st) {
    double acc = 0.0;
    for (const auto& oc : st.outcomes)
      acc += oc.probability * std::abs(expectation(oc.state, rate_op));
    return acc;
  });
}

WitnessReport mt_witness(const DiscreteAssemblage& a, const Observable& M,
                         const Observable& H, const Constants& c) {
  const ValueSetting var_m = conditional_variance(a, M);
  const ValueSetting rate = conditional_mean_rate(a, M, H, c);
  const ValueSetting var_h = conditional_variance(a, H);

  WitnessReport r;
  r.criterion = "mandelstam_tamm";
  r.setting_min = var_m.setting;
  r.setting_max = rate.setting;

  const double m_scale = M.matrix.norm();
  const double h_scale = H.matrix.norm();
  const bool zero_rate = rate.value <= 1e-14 * std::max(1.0, m_scale * h_scale / c.hbar);
  const bool zero_var_h = var_h.value <= 1e-14 * std::max(1.0, h_scale * h_scale);
  if (zero_rate || zero_var_h) {
    r.degenerate = true;
    r.lhs_bound = zero_var_h ? 0.0 : c.hbar / (2.0 * std::sqrt(var_h.value));
    return r;
  }

  r.measured = std::sqrt(std::max(0.0, var_m.value)) / rate.value;
  r.lhs_bound = c.hbar / (2.0 * std::sqrt(var_h.value));
  r.gamma = r.measured * 2.0 * std::sqrt(var_h.value) / c.hbar;
  r.violated = r.gamma < 1.0 - kViolationMargin;
  return r;
}

double displacement_time_bound(double dmean, double var_m, double var_h,
                               const Constants& c) {
  if (!(var_m > 0.0) || !(var_h > 0.0))
    throw std::invalid_argument("conditional variances must be positive");
  if (dmean < 0.0) throw std::invalid_argument("mean displacement must be nonnegative");
  return c.hbar * dmean / (2.0 * std::sqrt(var_h) * std::sqrt(var_m));
}

ValueSetting conditional_qfi(const DiscreteAssemblage& a, const Observable& H,
                             const Constants& c) {
  check_observable(H, a.dim);
  return optimize(a, false, [&](const Setting& st) {
    double acc = 0.0;
    for (const auto& oc : st.outcomes)
      acc += oc.probability * ghz::spectral_qfi(oc.state, H.matrix, c);
    return acc;
  });
}

WitnessReport geometric_time_bound(const DiscreteAssemblage& at_t0,
                                   const DiscreteAssemblage& at_t,
                                   const Observable& H, double dt,
                                   const Constants& c) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  check_observable(H, at_t0.dim);
  if (at_t.dim != at_t0.dim || at_t.settings.size() != at_t0.settings.size())
    throw std::invalid_argument("assemblage pair does not match");
  for (std::size_t x = 0; x < at_t0.settings.size(); ++x) {
    const auto& s0 = at_t0.settings[x];
    const auto& s1 = at_t.settings[x];
    if (s0.label != s1.label || s0.outcomes.size() != s1.outcomes.size())
      throw std::invalid_argument("assemblage pair does not match");
    for (std::size_t i = 0; i < s0.outcomes.size(); ++i) {
      if (s0.outcomes[i].label != s1.outcomes[i].label ||
          std::abs(s0.outcomes[i].probability - s1.outcomes[i].probability) > 1e-9)
        throw std::invalid_argument("outcome tables differ between the two times");
    }
  }

  ValueSetting dist{-std::numeric_limits<double>::infinity(), ""};
  for (std::size_t x = 0; x < at_t0.settings.size(); ++x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < at_t0.settings[x].outcomes.size(); ++i) {
      const double d = ghz::bures_distance(at_t.settings[x].outcomes[i].state,
                                           at_t0.settings[x].outcomes[i].state);
      acc += at_t0.settings[x].outcomes[i].probability * d * d;
    }
    if (acc > dist.value) dist = {acc, at_t0.settings[x].label};
  }
  const ValueSetting var_h = conditional_variance(at_t0, H);

  WitnessReport r;
  r.criterion = "bures_geometric";
  r.measured = dt;
  r.setting_min = var_h.setting;
  r.setting_max = dist.setting;

  const double h_scale = H.matrix.norm();
  const bool zero_var_h = var_h.value <= 1e-14 * std::max(1.0, h_scale * h_scale);
  // Bures angles of numerically identical states land near sqrt(machine
  // epsilon), so "no motion" is a 1e-13 squared-distance floor.
  const bool zero_dist = dist.value <= 1e-13;

  if (zero_dist) {
    r.lhs_bound = 0.0;
    r.gamma = std::numeric_limits<double>::infinity();
    r.degenerate = zero_var_h;  // 0/0: nothing moved, nothing bounded
    return r;
  }
  if (zero_var_h) {
    // Finite distance with vanishing conditional energy variance is
    // unreachable by any LHS model: unconditionally violated.
    r.lhs_bound = std::numeric_limits<double>::infinity();
    r.gamma = 0.0;
    r.violated = true;
    return r;
  }
  r.lhs_bound = c.hbar * std::sqrt(dist.value / var_h.value);
  r.gamma = dt / r.lhs_bound;
  r.violated = dt < r.lhs_bound - kViolationMargin;
  return r;
}

DiscreteAssemblage assemblage_from_lhs(const LhsModel& model,
                                       const std::vector<std::string>& settings,
                                       const std::vector<std::string>& outcomes) {
  model.validate();
  if (model.response.size() != settings.size())
    throw std::invalid_argument("setting labels do not match the response table");
  const int dim = static_cast<int>(model.ensemble.front().state.rows());

  DiscreteAssemblage a;
  a.dim = dim;
  for (std::size_t x = 0; x < settings.size(); ++x) {
    Setting st;
    st.label = settings[x];
    for (std::size_t out = 0; out < outcomes.size(); ++out) {
      double prob = 0.0;
      Eigen::MatrixXcd state = Eigen::MatrixXcd::Zero(dim, dim);
      for (std::size_t l = 0; l < model.ensemble.size(); ++l) {
        if (model.response[x][l].size() != outcomes.size())
          throw std::invalid_argument("outcome labels do not match the response table");
        const double w = model.ensemble[l].weight * model.response[x][l][out];
        prob += w;
        state += w * model.ensemble[l].state;
      }
      if (prob < 1e-14) continue;  // drop unpopulated outcomes
      st.outcomes.push_back({outcomes[out], prob, state / prob});
    }
    a.settings.push_back(std::move(st));
  }
  return a;
}

DiscreteAssemblage evolve_assemblage(const DiscreteAssemblage& a, const Observable& H,
                                     double dt, const Constants& c) {
  check_observable(H, a.dim);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.matrix);
  Eigen::VectorXcd phases(a.dim);
  for (int i = 0; i < a.dim; ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -es.eigenvalues()(i) * dt / c.hbar));
  const Eigen::MatrixXcd u =
      es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();

  DiscreteAssemblage out = a;
  for (auto& st : out.settings)
    for (auto& oc : st.outcomes) oc.state = u * oc.state * u.adjoint();
  return out;
}

}  // namespace qsteer
