#include "qsteer/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "qsteer/ghz.hpp"

namespace qsteer::oracle {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t avalanche(std::uint64_t v) {
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return v;
}

QuadratureRule build_rule(int order) {
  if (order < 2) throw std::invalid_argument("quadrature order must be >= 2");
  // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix of the
  // Hermite recurrence, weights sqrt(pi) times the squared first
  // eigenvector components.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
  for (int i = 1; i < order; ++i) {
    const double b = std::sqrt(i / 2.0);
    jacobi(i - 1, i) = b;
    jacobi(i, i - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(order);
  const double total = std::sqrt(std::numbers::pi);
  for (int i = 0; i < order; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = total * v0 * v0;
  }
  return rule;
}

int quadrature_index(const gaussian::HomodyneSetting& setting) {
  return setting.quadrature == gaussian::Quadrature::position ? 0 : 1;
}

double eval_moment(const gaussian::SingleModeGaussian& cond, MomentFunctional f) {
  switch (f) {
    case MomentFunctional::var_x:
      return cond.cov(0, 0);
    case MomentFunctional::var_p:
      return cond.cov(1, 1);
    case MomentFunctional::fourth_p: {
      // Var(p^2) of a Gaussian: 4 <p>^2 Var(p) + 2 Var(p)^2
      const double mp = cond.mean(1);
      const double vp = cond.cov(1, 1);
      return 4.0 * mp * mp * vp + 2.0 * vp * vp;
    }
    case MomentFunctional::abs_mean_p:
      return std::abs(cond.mean(1));
  }
  throw std::invalid_argument("unsupported moment functional");
}

}  // namespace

const QuadratureRule& QuadratureRule::get(int order) {
  static std::mutex guard;
  static std::map<int, std::unique_ptr<const QuadratureRule>> cache;
  const std::scoped_lock lock(guard);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<const QuadratureRule>(build_rule(order));
  return *slot;
}

CounterRng CounterRng::from_seed(std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng;
  rng.key = avalanche(seed ^ avalanche(stream * kGolden + 1));
  return rng;
}

std::uint64_t CounterRng::next_u64() {
  ++counter;
  return avalanche(key + counter * kGolden);
}

double CounterRng::next_double() {
  // 53-bit mantissa centered in (0,1) so log() downstream stays finite
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  if (have_spare) {
    have_spare = false;
    return spare;
  }
  const double u1 = next_double();
  const double u2 = next_double();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare = r * std::sin(angle);
  have_spare = true;
  return r * std::cos(angle);
}

QuadResult quad_conditional_moment(const gaussian::GaussianBipartiteState& s,
                                   const gaussian::HomodyneSetting& setting,
                                   MomentFunctional f, const Constants& c,
                                   int initial_order, double rel_tol) {
  if (setting.noise != 0.0)
    throw std::invalid_argument("quad_conditional_moment expects an ideal homodyne setting");
  if (initial_order < 20) throw std::invalid_argument("quadrature order must be >= 20");
  gaussian::validate_physical(s, c);

  const int q = quadrature_index(setting);
  const double mean_a = s.mean(q);
  const double scale = std::sqrt(2.0 * s.cov(q, q));
  const auto integrate = [&](int order) {
    const auto& rule = QuadratureRule::get(order);
    double acc = 0.0;
    for (int i = 0; i < order; ++i) {
      const double a = mean_a + scale * rule.nodes[i];
      acc += rule.weights[i] * eval_moment(gaussian::condition_on_homodyne(s, setting, a, c).cond, f);
    }
    return acc / std::sqrt(std::numbers::pi);
  };

  constexpr int kMaxOrder = 1280;
  int order = initial_order;
  double prev = integrate(order);
  while (order < kMaxOrder) {
    order *= 2;
    const double cur = integrate(order);
    if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) return {cur, order};
    prev = cur;
  }
  throw std::runtime_error("quadrature failed to converge by order 1280");
}

McResult mc_conditional_moment(const gaussian::GaussianBipartiteState& s,
                               const gaussian::HomodyneSetting& setting,
                               MomentFunctional f, const Constants& c,
                               const McConfig& cfg) {
  if (cfg.samples < 10000) throw std::invalid_argument("Monte Carlo needs at least 1e4 samples");
  gaussian::validate_physical(s, c);

  const int q = quadrature_index(setting);
  const double mean_a = s.mean(q);
  const double sd_a = std::sqrt(s.cov(q, q) + setting.noise);
  CounterRng rng = CounterRng::from_seed(cfg.seed, cfg.stream);

  // Welford so constant integrands report exactly zero spread.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    const double a = mean_a + sd_a * rng.next_normal();
    const double v = eval_moment(gaussian::condition_on_homodyne(s, setting, a, c).cond, f);
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(cfg.samples);
  const double sample_var = m2 / (n - 1.0);
  return {mean, std::sqrt(std::max(0.0, sample_var) / n), cfg.samples};
}

double qfi_finite_difference(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& H,
                             const Constants& c, double eps) {
  eps = std::clamp(eps, 1e-5, 1e-3);
  if (rho.rows() != rho.cols() || H.rows() != H.cols() || rho.rows() != H.rows())
    throw std::invalid_argument("dimension mismatch");

  // Floor tiny eigenvalues so the fidelity root stays differentiable.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(1e-10);
  lam /= lam.sum();
  const Eigen::MatrixXcd rho_f =
      es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eh(H);
  Eigen::VectorXcd phases(H.rows());
  for (Eigen::Index i = 0; i < H.rows(); ++i)
    phases(i) = std::exp(std::complex<double>(0.0, -eh.eigenvalues()(i) * eps / c.hbar));
  const Eigen::MatrixXcd u = eh.eigenvectors() * phases.asDiagonal() * eh.eigenvectors().adjoint();

  // 4 (D/eps)^2 reproduces the spectral t-sensitivity QFI at every hbar.
  const double d = ghz::bures_distance(u * rho_f * u.adjoint(), rho_f);
  return 4.0 * (d / eps) * (d / eps);
}

namespace {

std::complex<double> trace_pair(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& a) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index k = 0; k < rho.cols(); ++k) acc += rho(i, k) * a(k, i);
  return acc;
}

std::complex<double> trace_triple(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& a,
                                  const Eigen::MatrixXcd& b) {
  std::complex<double> acc = 0.0;
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index k = 0; k < rho.cols(); ++k)
      for (Eigen::Index l = 0; l < rho.cols(); ++l) acc += rho(i, k) * a(k, l) * b(l, i);
  return acc;
}

}  // namespace

ValueSetting exhaustive_conditional_variance(const DiscreteAssemblage& a,
                                             const Observable& M) {
  if (a.settings.empty()) throw std::invalid_argument("empty assemblage");
  ValueSetting best{std::numeric_limits<double>::infinity(), ""};
  for (const auto& st : a.settings) {
    double acc = 0.0;
    for (const auto& oc : st.outcomes) {
      const double m1 = trace_pair(oc.state, M.matrix).real();
      const double m2 = trace_triple(oc.state, M.matrix, M.matrix).real();
      acc += oc.probability * (m2 - m1 * m1);
    }
    if (acc < best.value) best = {acc, st.label};
  }
  return best;
}

ValueSetting exhaustive_conditional_rate(const DiscreteAssemblage& a,
                                         const Observable& M, const Observable& H,
                                         const Constants& c) {
  if (a.settings.empty()) throw std::invalid_argument("empty assemblage");
  ValueSetting best{-std::numeric_limits<double>::infinity(), ""};
  for (const auto& st : a.settings) {
    double acc = 0.0;
    for (const auto& oc : st.outcomes) {
      const std::complex<double> hm = trace_triple(oc.state, H.matrix, M.matrix);
      const std::complex<double> mh = trace_triple(oc.state, M.matrix, H.matrix);
      acc += oc.probability * std::abs((std::complex<double>(0, 1) * (hm - mh)).real()) / c.hbar;
    }
    if (acc > best.value) best = {acc, st.label};
  }
  return best;
}

}  // namespace qsteer::oracle
