#include "carma/levy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carma/error.hpp"
#include "carma/parallel.hpp"

namespace carma {

std::string to_string(LevyKind kind) {
  switch (kind) {
    case LevyKind::brownian: return "brownian";
    case LevyKind::compound_poisson_pareto: return "compound_poisson_pareto";
    case LevyKind::alpha_stable: return "alpha_stable";
    case LevyKind::mixture: return "mixture";
  }
  return "unknown";
}

LevyKind levy_kind_from_string(const std::string& name) {
  if (name == "brownian") return LevyKind::brownian;
  if (name == "compound_poisson_pareto") return LevyKind::compound_poisson_pareto;
  if (name == "alpha_stable") return LevyKind::alpha_stable;
  if (name == "mixture") return LevyKind::mixture;
  fail(ErrorCode::config, "unknown driver kind \"" + name +
                              "\" (expected brownian, compound_poisson_pareto, alpha_stable, mixture)");
}

double ParetoJumps::mean_size() const {
  if (symmetric) return 0.0;
  return alpha * scale / (alpha - 1.0);
}

double ParetoJumps::density(double x) const {
  const double ax = std::abs(x);
  if (ax < scale) return 0.0;
  if (!symmetric && x < 0.0) return 0.0;
  const double full = rate * alpha * std::pow(scale, alpha) * std::pow(ax, -alpha - 1.0);
  return symmetric ? 0.5 * full : full;
}

double StableJumps::density_constant() const {
  return std::pow(scale, alpha) / (-2.0 * std::tgamma(-alpha) * std::cos(M_PI * alpha / 2.0));
}

// ---------------------------------------------------------------------------
// LevyModel

namespace {

Eigen::VectorXd triplet_drift(int d, const std::optional<ParetoJumps>& pareto) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
  if (pareto && !pareto->symmetric) {
    // gamma = compensating drift + int_{|x|<=1} x nu(dx) = -int_{|x|>1} x nu(dx).
    const ParetoJumps& pj = *pareto;
    const double lo = std::max(1.0, pj.scale);
    const double big = pj.rate * pj.alpha * std::pow(pj.scale, pj.alpha) * std::pow(lo, 1.0 - pj.alpha) /
                       (pj.alpha - 1.0);
    g.setConstant(-big);
  }
  return g;
}

}  // namespace

LevyModel LevyModel::brownian(const Eigen::MatrixXd& Sigma) {
  LevyModel m;
  m.kind = LevyKind::brownian;
  m.d = static_cast<int>(Sigma.rows());
  m.Sigma = Sigma;
  m.gamma = Eigen::VectorXd::Zero(m.d);
  m.validate();
  return m;
}

LevyModel LevyModel::compound_poisson(int d, const ParetoJumps& jumps) {
  LevyModel m;
  m.kind = LevyKind::compound_poisson_pareto;
  m.d = d;
  m.Sigma = Eigen::MatrixXd::Zero(d, d);
  m.pareto = jumps;
  m.gamma = triplet_drift(d, m.pareto);
  m.validate();
  return m;
}

LevyModel LevyModel::alpha_stable(int d, const StableJumps& jumps) {
  LevyModel m;
  m.kind = LevyKind::alpha_stable;
  m.d = d;
  m.Sigma = Eigen::MatrixXd::Zero(d, d);
  m.stable = jumps;
  m.gamma = Eigen::VectorXd::Zero(d);
  m.validate();
  return m;
}

LevyModel LevyModel::mixture(const Eigen::MatrixXd& Sigma, std::optional<ParetoJumps> jumps,
                             std::optional<StableJumps> stable) {
  LevyModel m;
  m.kind = LevyKind::mixture;
  m.d = static_cast<int>(Sigma.rows());
  m.Sigma = Sigma;
  m.pareto = jumps;
  m.stable = stable;
  m.gamma = triplet_drift(m.d, m.pareto);
  m.validate();
  return m;
}

void LevyModel::validate() const {
  if (d < 1) fail(ErrorCode::invalid_parameter, "driver dimension must be >= 1");
  if (Sigma.rows() != d || Sigma.cols() != d)
    fail(ErrorCode::shape_mismatch, "Sigma must be " + std::to_string(d) + "x" + std::to_string(d));
  if (gamma.size() != d) fail(ErrorCode::shape_mismatch, "gamma must have length d");
  if (!Sigma.allFinite() || (Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorCode::invalid_parameter, "Sigma must be finite and symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Sigma);
  if (es.eigenvalues().minCoeff() < -1e-10)
    fail(ErrorCode::invalid_parameter, "Sigma is not positive semidefinite (min eigenvalue " +
                                           std::to_string(es.eigenvalues().minCoeff()) + ")");
  if (pareto) {
    const ParetoJumps& pj = *pareto;
    if (!(pj.alpha > 1.0 && pj.alpha <= 2.0))
      fail(ErrorCode::invalid_parameter, "Pareto tail index alpha = " + std::to_string(pj.alpha) +
                                             " outside the allowed range (1, 2]");
    if (!(pj.rate > 0.0))
      fail(ErrorCode::invalid_parameter, "jump rate must be positive (got " + std::to_string(pj.rate) + ")");
    if (!(pj.scale > 0.0)) fail(ErrorCode::invalid_parameter, "Pareto scale must be positive");
  }
  if (stable) {
    const StableJumps& sj = *stable;
    if (!(sj.alpha > 1.0 && sj.alpha < 2.0))
      fail(ErrorCode::invalid_parameter, "stable index alpha = " + std::to_string(sj.alpha) +
                                             " outside the allowed range (1, 2)");
    if (!(sj.scale > 0.0)) fail(ErrorCode::invalid_parameter, "stable scale must be positive");
  }
  switch (kind) {
    case LevyKind::brownian:
      if (pareto || stable) fail(ErrorCode::invalid_parameter, "brownian driver cannot carry jumps");
      break;
    case LevyKind::compound_poisson_pareto:
      if (!pareto || stable) fail(ErrorCode::invalid_parameter, "compound Poisson driver needs Pareto jumps only");
      break;
    case LevyKind::alpha_stable:
      if (!stable || pareto) fail(ErrorCode::invalid_parameter, "alpha-stable driver needs stable parameters only");
      break;
    case LevyKind::mixture:
      break;
  }
}

double LevyModel::tail_index() const {
  double a = 2.0;
  if (pareto) a = std::min(a, pareto->alpha);
  if (stable) a = std::min(a, stable->alpha);
  return a;
}

Eigen::VectorXd LevyModel::compensating_drift() const {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
  if (pareto) b.setConstant(-pareto->rate * pareto->mean_size());
  return b;
}

double LevyModel::jump_density(double x) const {
  double v = 0.0;
  if (pareto) v += pareto->density(x);
  if (stable) v += stable->density_constant() * std::pow(std::abs(x), -1.0 - stable->alpha);
  return v;
}

// ---------------------------------------------------------------------------
// Grid and path

TimeGrid TimeGrid::span(double from, double to, double step) {
  if (!(step > 0.0) || !(to > from)) fail(ErrorCode::invalid_parameter, "grid needs step > 0 and to > from");
  TimeGrid g;
  g.step = step;
  g.first = static_cast<long>(std::floor(from / step + 1e-9));
  const long last = static_cast<long>(std::ceil(to / step - 1e-9));
  g.cells = last - g.first;
  return g;
}

long TimeGrid::index_of(double x) const {
  const double r = x / step - static_cast<double>(first);
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-9 || k < 0 || k > static_cast<double>(cells)) return -1;
  return static_cast<long>(k);
}

Eigen::VectorXd SamplePath::value_at(double t) const {
  const long k = grid.index_of(t);
  const long k0 = grid.index_of(0.0);
  if (k < 0 || k0 < 0) fail(ErrorCode::invalid_parameter, "value_at needs t and 0 on the grid");
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
  for (long c = std::min(k, k0); c < std::max(k, k0); ++c) acc += increment(c);
  return k >= k0 ? acc : Eigen::VectorXd(-acc);
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6361726dU};
  return std::mt19937_64(seq);
}

double sample_symmetric_stable(double alpha, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-M_PI / 2.0, M_PI / 2.0);
  std::exponential_distribution<double> expo(1.0);
  double V = unif(rng);
  while (V == -M_PI / 2.0) V = unif(rng);
  const double W = expo(rng);
  return std::sin(alpha * V) / std::pow(std::cos(V), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * V) / W, (1.0 - alpha) / alpha);
}

SamplePath simulate_path(const LevyModel& model, const TimeGrid& grid, std::uint64_t seed,
                         std::uint64_t stream) {
  model.validate();
  if (grid.cells < 1 || !(grid.step > 0.0)) fail(ErrorCode::invalid_parameter, "grid must have at least one cell");
  const int d = model.d;
  const long n = grid.cells;
  const double dt = grid.step;
  SamplePath path;
  path.grid = grid;
  path.d = d;
  path.seed = seed;
  path.stream = stream;
  path.increments.assign(static_cast<std::size_t>(n) * d, 0.0);
  std::mt19937_64 rng = make_rng(seed, stream);

  // Gaussian part N(0, dt Sigma) through the symmetric square root.
  if (!model.Sigma.isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.Sigma);
    const Eigen::MatrixXd root = es.eigenvectors() *
                                 es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                                 es.eigenvectors().transpose() * std::sqrt(dt);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(d);
    for (long k = 0; k < n; ++k) {
      for (int i = 0; i < d; ++i) z[i] = normal(rng);
      Eigen::Map<Eigen::VectorXd>(path.increments.data() + k * d, d) += root * z;
    }
  }

  // Compound Poisson part: exponential inter-arrival times binned into cells.
  if (model.pareto) {
    const ParetoJumps& pj = *model.pareto;
    std::exponential_distribution<double> gap(pj.rate);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double horizon = static_cast<double>(n) * dt;
    const double drift = -pj.rate * pj.mean_size() * dt;
    for (int i = 0; i < d; ++i) {
      double s = gap(rng);
      while (s < horizon) {
        const long cell = std::min(n - 1, static_cast<long>(s / dt));
        double u = unif(rng);
        while (u == 0.0) u = unif(rng);
        double size = pj.scale * std::pow(u, -1.0 / pj.alpha);
        if (pj.symmetric && unif(rng) < 0.5) size = -size;
        path.increments[cell * d + i] += size;
        s += gap(rng);
      }
      if (drift != 0.0)
        for (long k = 0; k < n; ++k) path.increments[k * d + i] += drift;
    }
  }

  if (model.stable) {
    const StableJumps& sj = *model.stable;
    const double factor = sj.scale * std::pow(dt, 1.0 / sj.alpha);
    for (long k = 0; k < n; ++k)
      for (int i = 0; i < d; ++i) path.increments[k * d + i] += factor * sample_symmetric_stable(sj.alpha, rng);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Stochastic integrals

namespace {

void check_cells(const SamplePath& path, std::size_t n) {
  if (static_cast<long>(n) != path.grid.cells)
    fail(ErrorCode::shape_mismatch, "integrand has " + std::to_string(n) + " samples but the path has " +
                                        std::to_string(path.grid.cells) + " cells");
}

}  // namespace

Eigen::VectorXd integrate_against(const SamplePath& path, const std::vector<double>& f) {
  check_cells(path, f.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(path.d);
  for (long k = 0; k < path.grid.cells; ++k)
    if (f[k] != 0.0) acc += f[k] * path.increment(k);
  return acc;
}

Eigen::VectorXcd integrate_against(const SamplePath& path, const std::vector<std::complex<double>>& f) {
  check_cells(path, f.size());
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(path.d);
  for (long k = 0; k < path.grid.cells; ++k) acc += f[k] * path.increment(k).cast<std::complex<double>>();
  return acc;
}

Eigen::VectorXd integrate_against(const SamplePath& path, const std::vector<Eigen::MatrixXd>& f) {
  check_cells(path, f.size());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(f.empty() ? path.d : f.front().rows());
  for (long k = 0; k < path.grid.cells; ++k) {
    if (f[k].cols() != path.d || f[k].rows() != acc.size())
      fail(ErrorCode::shape_mismatch, "matrix integrand has inconsistent shape");
    acc += f[k] * path.increment(k);
  }
  return acc;
}

Eigen::VectorXd integrate_function(const SamplePath& path, const std::function<double(double)>& f) {
  std::vector<double> values(path.grid.cells);
  for (long k = 0; k < path.grid.cells; ++k) values[k] = f(path.grid.t(k));
  return integrate_against(path, values);
}

double hill_tail_index(const std::vector<double>& samples, int k) {
  const long n = static_cast<long>(samples.size());
  if (k < 1 || k >= n)
    fail(ErrorCode::insufficient_samples, "Hill estimator needs 1 <= k < n (k=" + std::to_string(k) +
                                              ", n=" + std::to_string(n) + ")");
  std::vector<double> x(samples.size());
  std::transform(samples.begin(), samples.end(), x.begin(), [](double v) { return std::abs(v); });
  std::nth_element(x.begin(), x.begin() + k, x.end(), std::greater<double>());
  const double threshold = x[k];
  if (!(threshold > 0.0)) fail(ErrorCode::insufficient_samples, "Hill threshold order statistic is zero");
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += std::log(x[i] / threshold);
  if (!(sum > 0.0)) fail(ErrorCode::insufficient_samples, "top order statistics are tied");
  return static_cast<double>(k) / sum;
}

ContinuityReport integral_continuity_check(const LevyModel& model,
                                           const std::vector<std::vector<double>>& f_sequence,
                                           const std::vector<double>& f_limit, const TimeGrid& grid,
                                           std::uint64_t seed, int paths, double eps, unsigned threads) {
  if (paths < 1 || !(eps > 0.0)) fail(ErrorCode::invalid_parameter, "continuity check needs paths >= 1, eps > 0");
  const std::size_t m = f_sequence.size();
  std::vector<std::vector<char>> exceed(paths, std::vector<char>(m, 0));
  parallel_for(static_cast<std::size_t>(paths), threads, [&](std::size_t i) {
    const SamplePath path = simulate_path(model, grid, seed, i);
    const Eigen::VectorXd limit = integrate_against(path, f_limit);
    for (std::size_t n = 0; n < m; ++n)
      exceed[i][n] = (integrate_against(path, f_sequence[n]) - limit).norm() > eps;
  });
  ContinuityReport rep;
  for (std::size_t n = 0; n < m; ++n) {
    double count = 0.0;
    for (int i = 0; i < paths; ++i) count += exceed[i][n];
    const double pr = count / paths;
    rep.probability.push_back(pr);
    rep.std_error.push_back(std::sqrt(pr * (1.0 - pr) / paths));
  }
  for (std::size_t n = 1; n < m; ++n) {
    const double band = 2.0 * std::hypot(rep.std_error[n], rep.std_error[n - 1]) + 1.0 / paths;
    if (rep.probability[n] > rep.probability[n - 1] + band) rep.non_increasing = false;
  }
  return rep;
}

}  // namespace carma
