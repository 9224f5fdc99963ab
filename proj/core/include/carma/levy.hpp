#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace carma {

enum class LevyKind { brownian, compound_poisson_pareto, alpha_stable, mixture };

std::string to_string(LevyKind kind);
LevyKind levy_kind_from_string(const std::string& name);

/// Compound Poisson jumps with Pareto sizes x_m U^{-1/alpha}. Each of the d
/// components carries its own independent jump stream with the given rate.
struct ParetoJumps {
  double rate = 1.0;
  double alpha = 1.5;
  double scale = 1.0;  // x_m
  bool symmetric = true;

  double mean_size() const;  // E[J]; 0 when symmetric
  /// Levy density of one component at x (x != 0).
  double density(double x) const;
};

/// Symmetric alpha-stable components with characteristic function
/// exp(-scale^alpha |z|^alpha) per unit time, independent across coordinates.
struct StableJumps {
  double alpha = 1.5;
  double scale = 1.0;

  /// Levy density c |x|^{-1-alpha}.
  double density_constant() const;
};

struct LevyModel {
  LevyKind kind = LevyKind::brownian;
  int d = 1;
  Eigen::VectorXd gamma;  // triplet drift w.r.t. truncation 1{|x| <= 1}, after mean-zero correction
  Eigen::MatrixXd Sigma;  // Gaussian covariance
  std::optional<ParetoJumps> pareto;
  std::optional<StableJumps> stable;

  static LevyModel brownian(const Eigen::MatrixXd& Sigma);
  static LevyModel compound_poisson(int d, const ParetoJumps& jumps);
  static LevyModel alpha_stable(int d, const StableJumps& jumps);
  static LevyModel mixture(const Eigen::MatrixXd& Sigma, std::optional<ParetoJumps> jumps,
                           std::optional<StableJumps> stable);

  /// Throws invalid_parameter for out-of-range parameters.
  void validate() const;
  /// Nominal tail index: 2 without jumps, else the smallest jump index.
  double tail_index() const;
  bool has_jumps() const { return pareto.has_value() || stable.has_value(); }
  /// Drift added per unit time to the simulated path so that E[L_1] = 0.
  Eigen::VectorXd compensating_drift() const;
  /// Levy density of one coordinate's jumps (jumps live on the axes).
  double jump_density(double x) const;
};

/// Uniform grid t_k = (first + k) * step, k = 0..cells. With a power-of-two
/// step the integer points are represented exactly.
struct TimeGrid {
  long first = 0;
  long cells = 0;
  double step = 1.0;

  static TimeGrid span(double from, double to, double step);

  double t(long k) const { return static_cast<double>(first + k) * step; }
  double start() const { return t(0); }
  double end() const { return t(cells); }
  /// Index k with t(k) == x (within 1e-9 step); -1 if x is not a grid point.
  long index_of(double x) const;
};

/// Simulated increments Delta L_k over [t_k, t_{k+1}), row-major cells x d.
struct SamplePath {
  TimeGrid grid;
  int d = 1;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> increments;

  Eigen::Map<const Eigen::VectorXd> increment(long k) const {
    return Eigen::Map<const Eigen::VectorXd>(increments.data() + k * d, d);
  }
  /// L_t - L_0 at a grid point t (two-sided convention L_0 = 0).
  Eigen::VectorXd value_at(double t) const;
};

/// The per-path generator: mt19937_64 seeded from (seed, stream) so path k of
/// an ensemble does not depend on the ensemble size.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream);

/// Standard symmetric alpha-stable draw (Chambers-Mallows-Stuck).
double sample_symmetric_stable(double alpha, std::mt19937_64& rng);

SamplePath simulate_path(const LevyModel& model, const TimeGrid& grid, std::uint64_t seed,
                         std::uint64_t stream = 0);

/// Left-endpoint sums sum_k f_k Delta L_k. f has one entry per cell.
Eigen::VectorXd integrate_against(const SamplePath& path, const std::vector<double>& f);
Eigen::VectorXcd integrate_against(const SamplePath& path, const std::vector<std::complex<double>>& f);
Eigen::VectorXd integrate_against(const SamplePath& path, const std::vector<Eigen::MatrixXd>& f);
/// Samples f at the left endpoints and integrates.
Eigen::VectorXd integrate_function(const SamplePath& path, const std::function<double(double)>& f);

/// Hill estimator alpha = k / sum_{i<k} log(X_(i) / X_(k)) on |samples|.
double hill_tail_index(const std::vector<double>& samples, int k);

struct ContinuityReport {
  std::vector<double> probability;  // P(|int f_n dL - int f dL| > eps), one per n
  std::vector<double> std_error;
  bool non_increasing = true;       // up to two standard errors
};

/// Monte Carlo estimate of P(||int f_n dL - int f dL|| > eps) with common
/// random paths (streams 0..paths-1).
ContinuityReport integral_continuity_check(const LevyModel& model,
                                           const std::vector<std::vector<double>>& f_sequence,
                                           const std::vector<double>& f_limit, const TimeGrid& grid,
                                           std::uint64_t seed, int paths, double eps,
                                           unsigned threads = 0);

}  // namespace carma
