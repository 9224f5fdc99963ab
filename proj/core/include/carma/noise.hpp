#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carma/levy.hpp"
#include "carma/spectral.hpp"

namespace carma {

// ---------------------------------------------------------------------------
// Generating triplet of M(A), identified with R^{2d} as [Re_1..Re_d, Im_1..Im_d].

struct ContentQuadrature {
  double window = 1000.0;      // outer frequency window X (Richardson over X and 2X)
  double panel_width = M_PI;   // outer Gauss panel width
  double inner_tolerance = 1e-10;
};

class ContentTriplet {
 public:
  ContentTriplet(ElementarySet A, LevyModel model, ContentQuadrature opts = {});

  int d() const { return model_.d; }
  const Eigen::VectorXd& gamma() const { return gamma_; }
  const Eigen::MatrixXd& Sigma() const { return Sigma_; }
  /// 2x2 factor K with Sigma_M = K (x) Sigma.
  const Eigen::Matrix2d& gaussian_factor() const { return K_; }
  /// Truncation/extrapolation metadata of the last quadratures.
  double gamma_error() const { return gamma_error_; }
  double sigma_error() const { return sigma_error_; }

  using TestFunction = std::function<std::complex<double>(const Eigen::VectorXd&)>;
  struct NuValue {
    std::complex<double> value;
    double extrapolation_error = 0.0;
    double truncation_bound = 0.0;  // sup|phi| times nu_M mass beyond the radius cutoff
  };
  /// int phi d nu_M over pushforward points of norm <= radius. phi must be
  /// integrable near the origin (e.g. O(|v|^2)).
  NuValue nu_integral(const TestFunction& phi, double radius, double kappa) const;

  /// nu_M({v : |v| > r}) from the closed-form jump tail.
  double nu_tail_mass(double r) const;

  /// Levy-Khintchine characteristic function E exp(i <z, M(A)>), z in R^{2d}.
  std::complex<double> characteristic_function(const Eigen::VectorXd& z) const;

 private:
  ElementarySet A_;
  LevyModel model_;
  ContentQuadrature opts_;
  Eigen::VectorXd gamma_;
  Eigen::MatrixXd Sigma_;
  Eigen::Matrix2d K_;
  double gamma_error_ = 0.0;
  double sigma_error_ = 0.0;
};

ContentTriplet content_triplet(const ElementarySet& A, const LevyModel& model, const ContentQuadrature& opts = {});

/// Empirical characteristic function mean(exp(i <z, X_k>)) of R^{2d} samples (rows).
std::complex<double> empirical_cf(const std::vector<Eigen::VectorXd>& samples, const Eigen::VectorXd& z);

// ---------------------------------------------------------------------------
// Constants of the moment/Levy-measure analysis of Z_t = M([0, t)).

/// sup_mu sqrt(1 - cos(t mu)) / |mu| = t / sqrt(2).
double c_of_t(double t);
/// Grid-search value of the same supremum over mu in (0, mu_max].
double c_of_t_grid_search(double t, double mu_max = 100.0, int points = 200000);
/// eta(t) = pi beta / (sqrt(2) c(t)).
double eta_of_t(double t, double beta);

/// r(mu) = sqrt(1 - cos(t mu)) / |mu| (t/sqrt(2) at mu = 0).
double r_of_mu(double mu, double t);

/// int_lo^hi r(mu)^beta dmu for 0 <= lo < hi (hi may be +inf when beta > 1).
/// Panels follow the zeros of sin(t mu / 2); the infinite tail uses the
/// period mean plus a first-order correction.
double periodic_power_integral(double beta, double t, double lo, double hi);
/// Same integral over [0, inf) by panel sums on [0, X], [0, 2X], [0, 4X] and
/// two-term Richardson extrapolation; an independent scheme.
double periodic_power_integral_richardson(double beta, double t, double periods = 4000);

/// C(delta, t) = int_R (1 - cos(t mu))^{delta/2} / |mu|^delta dmu.
double C_of_delta(double delta, double t);
double C_of_delta_richardson(double delta, double t);

enum class Verdict { finite, divergent, inconclusive };
std::string to_string(Verdict v);

struct DeltaIntegralReport {
  double delta = 0.0;
  double t = 0.0;
  std::vector<double> truncations;  // R values
  std::vector<double> truncated_values;
  Verdict verdict = Verdict::inconclusive;
  double value = 0.0;        // full value when finite, +inf otherwise
  double error_bound = 0.0;  // quadrature/tail estimate
  double upper_bound = 0.0;  // C(delta) (1/(sqrt2 pi))^delta int |y|^delta nu(dy)
  double lower_bound = 0.0;  // (1/(sqrt2 pi))^delta int_{|mu|>=1} r^delta * int_{|y|<=1} |y|^delta nu(dy)
};

/// int_{|x| <= 1} |x|^delta nu_{Z_t}(dx) for scalar Pareto/stable drivers by the
/// frequency-outer order with closed-form inner jump moments. For stable
/// drivers the truncation R also cuts jumps below 1/R. Throws
/// unsupported_model for d > 1.
DeltaIntegralReport nu_Zt_delta_integral(double delta, double t, const LevyModel& model,
                                         const std::vector<double>& truncations);

/// Both integration orders on the bounded jump domain |y| <= y_max.
struct FubiniReport {
  double mu_outer = 0.0;
  double jump_outer = 0.0;
};
FubiniReport nu_Zt_delta_integral_both_orders(double delta, double t, const LevyModel& model, double y_max);

/// nu_{Z_t}({|x| > eps}) for scalar jump drivers.
double nu_Zt_tail_mass(double eps, double t, const LevyModel& model);

/// Intervals of mu >= 0 where r(mu) > threshold (one per hump of |sin(t mu/2)|).
std::vector<Interval> r_superlevel_intervals(double t, double threshold);

struct ExpMomentReport {
  double eta = 0.0;
  double lhs = 0.0;  // int_{|x|>1} exp(eta |x|) nu_{Z_t}(dx)
  double rhs = 0.0;  // (2/pi) int_{|y| > sqrt2 pi / c} |y| exp(eta c |y| / (sqrt2 pi)) nu(dy)
};
/// Exponential-moment inequality for a symmetric scalar jump density
/// supported in [-y_max, y_max] (density given for y > 0, per side).
ExpMomentReport exp_moment_check(double t, double beta, const std::function<double(double)>& density,
                                 double y_max);

// ---------------------------------------------------------------------------
// Monte Carlo diagnostics.

struct ContentSampler {
  TimeGrid grid;                 // frequency grid of the simulated driver
  double edge_tolerance = 0.05;  // passed to random_content
  unsigned threads = 0;
};

/// n samples of M(A) (as R^{2d}) from streams [first_stream, first_stream + n).
std::vector<Eigen::VectorXd> sample_content(const ElementarySet& A, const LevyModel& model, int n,
                                            std::uint64_t seed, const ContentSampler& sampler,
                                            std::uint64_t first_stream = 0);
/// Joint samples of (M(A_1), ..., M(A_m)) on common paths.
std::vector<std::vector<Eigen::VectorXd>> sample_contents(const std::vector<ElementarySet>& sets,
                                                          const LevyModel& model, int n, std::uint64_t seed,
                                                          const ContentSampler& sampler,
                                                          std::uint64_t first_stream = 0);

struct MomentReport {
  double p = 0.0;
  std::vector<long> sizes;
  std::vector<double> estimates;
  std::vector<double> drifts;  // estimates[j] / estimates[j-1] - 1
  Verdict verdict = Verdict::inconclusive;
};

/// Moment stability verdict from samples of |Z|: the estimate at size n is the
/// median of the block means of |Z|^p over disjoint blocks of length n.
MomentReport moment_probe_from_samples(double p, const std::vector<double>& norms, const std::vector<long>& sizes);
/// Simulates 10 max(sizes) samples of Z_t = M([0, t)) and applies the probe.
MomentReport moment_probe(double p, const LevyModel& model, double t, const std::vector<long>& sizes,
                          std::uint64_t seed, const ContentSampler& sampler);

struct DependenceReport {
  double dcor = 0.0;
  double dcor_p_value = 1.0;
  bool independence_rejected = false;  // at level 0.01
  double pearson = 0.0;
  double ks_statistic = 0.0;           // Re M(A_1) against Re M(A_1 + tau)
  double ks_p_value = 1.0;
  int n = 0;
  int permutations = 0;
};
DependenceReport dependence_diagnostic(const ElementarySet& A1, const ElementarySet& A2, const LevyModel& model,
                                       int n, std::uint64_t seed, const ContentSampler& sampler,
                                       int permutations = 1000, double tau = M_PI);

}  // namespace carma
