#include "carma/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "carma/error.hpp"
#include "carma/levy.hpp"

namespace carma::stats {

double mean(const std::vector<double>& x) {
  if (x.empty()) fail(ErrorCode::insufficient_samples, "mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) fail(ErrorCode::insufficient_samples, "variance needs two samples");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    fail(ErrorCode::shape_mismatch, "correlation needs two samples of equal size >= 2");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) fail(ErrorCode::insufficient_samples, "quantile of an empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * x[lo] + w * x[hi];
}

double median(std::vector<double> x) { return quantile(std::move(x), 0.5); }

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; the value is 1 to double precision
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::insufficient_samples, "KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double sq = std::sqrt(ne);
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d);
  return r;
}

namespace {

// Pieces of the V-statistic dCov^2 = S1 + S2 - 2 S3 that do not change when y is permuted.
struct DcorParts {
  std::vector<double> row_a, row_b;
  double total_a = 0.0, total_b = 0.0;
  double dvar_x = 0.0, dvar_y = 0.0;
};

std::vector<double> row_sums(const std::vector<double>& x) {
  // sum_j |x_i - x_j| in O(n log n) via sorting.
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
  double total = 0.0;
  for (double v : x) total += v;
  std::vector<double> out(n);
  double prefix = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double v = x[order[r]];
    const double below = static_cast<double>(r) * v - prefix;
    const double above = (total - prefix - v) - static_cast<double>(n - r - 1) * v;
    out[order[r]] = below + above;
    prefix += v;
  }
  return out;
}

double pair_sum(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) acc += std::abs(xi - x[j]) * std::abs(yi - y[j]);
    s += acc;
  }
  return 2.0 * s;
}

DcorParts prepare(const std::vector<double>& x, const std::vector<double>& y) {
  DcorParts p;
  p.row_a = row_sums(x);
  p.row_b = row_sums(y);
  p.total_a = std::accumulate(p.row_a.begin(), p.row_a.end(), 0.0);
  p.total_b = std::accumulate(p.row_b.begin(), p.row_b.end(), 0.0);
  const double n = static_cast<double>(x.size());
  auto dvar = [&](const std::vector<double>& v, const std::vector<double>& row, double total) {
    double s3 = 0.0;
    for (double r : row) s3 += r * r;
    return pair_sum(v, v) / (n * n) + (total / (n * n)) * (total / (n * n)) - 2.0 * s3 / (n * n * n);
  };
  p.dvar_x = dvar(x, p.row_a, p.total_a);
  p.dvar_y = dvar(y, p.row_b, p.total_b);
  return p;
}

double dcov2(const DcorParts& p, const std::vector<double>& x, const std::vector<double>& y,
             const std::vector<double>& row_b_aligned) {
  const double n = static_cast<double>(x.size());
  double s3 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s3 += p.row_a[i] * row_b_aligned[i];
  return pair_sum(x, y) / (n * n) + (p.total_a / (n * n)) * (p.total_b / (n * n)) - 2.0 * s3 / (n * n * n);
}

double to_dcor(double dcov, const DcorParts& p) {
  const double denom = std::sqrt(p.dvar_x * p.dvar_y);
  if (!(denom > 0.0)) return 0.0;
  return std::sqrt(std::max(0.0, dcov) / denom);
}

}  // namespace

double distance_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    fail(ErrorCode::shape_mismatch, "distance correlation needs two samples of equal size >= 2");
  const DcorParts p = prepare(x, y);
  return to_dcor(dcov2(p, x, y, p.row_b), p);
}

PermutationTest distance_correlation_test(const std::vector<double>& x, const std::vector<double>& y,
                                          int permutations, std::uint64_t seed) {
  if (x.size() != y.size() || x.size() < 4)
    fail(ErrorCode::insufficient_samples, "distance correlation test needs equal samples of size >= 4");
  if (permutations < 1) fail(ErrorCode::invalid_parameter, "permutation count must be positive");
  const DcorParts p = prepare(x, y);
  const double observed = dcov2(p, x, y, p.row_b);

  std::mt19937_64 rng = make_rng(seed, 0x70657266ULL);
  std::vector<std::size_t> perm(x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> yp(y.size()), rowp(y.size());
  int exceed = 0;
  for (int b = 0; b < permutations; ++b) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      yp[i] = y[perm[i]];
      rowp[i] = p.row_b[perm[i]];
    }
    if (dcov2(p, x, yp, rowp) >= observed) ++exceed;
  }
  PermutationTest t;
  t.statistic = to_dcor(observed, p);
  t.permutations = permutations;
  t.p_value = (1.0 + exceed) / (1.0 + permutations);
  return t;
}

}  // namespace carma::stats
