#pragma once

#include <cstdint>
#include <vector>

namespace carma::stats {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // unbiased
double correlation(const std::vector<double>& x, const std::vector<double>& y);
/// Linear-interpolated sample quantile, q in [0, 1].
double quantile(std::vector<double> x, double q);
double median(std::vector<double> x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution (effective sample size correction of Stephens).
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);
/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// Squared-distance-covariance based distance correlation of two samples.
double distance_correlation(const std::vector<double>& x, const std::vector<double>& y);

struct PermutationTest {
  double statistic = 0.0;
  double p_value = 1.0;
  int permutations = 0;
};
/// Independence test: distance correlation with a permutation p-value
/// (1 + #{perm >= observed}) / (1 + B). Deterministic for a given seed.
PermutationTest distance_correlation_test(const std::vector<double>& x, const std::vector<double>& y,
                                          int permutations, std::uint64_t seed);

}  // namespace carma::stats
