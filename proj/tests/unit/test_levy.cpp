#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "carma/error.hpp"
#include "carma/levy.hpp"
#include "carma/stats.hpp"

namespace carma {
namespace {

std::vector<double> endpoint_samples(const LevyModel& model, int n, std::uint64_t seed) {
  const TimeGrid g = TimeGrid::span(0.0, 1.0, 1.0);
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = simulate_path(model, g, seed, k).increments[0];
  return out;
}

TEST(LevyModel, RejectsOutOfRangeParameters) {
  EXPECT_THROW(LevyModel::alpha_stable(1, StableJumps{2.5, 1.0}), Error);
  EXPECT_THROW(LevyModel::alpha_stable(1, StableJumps{1.0, 1.0}), Error);
  EXPECT_THROW(LevyModel::compound_poisson(1, ParetoJumps{-1.0, 1.5, 1.0, true}), Error);
  EXPECT_THROW(LevyModel::compound_poisson(1, ParetoJumps{1.0, 2.5, 1.0, true}), Error);
  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  try {
    LevyModel::brownian(bad);
    FAIL() << "expected invalid_parameter";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::invalid_parameter);
  }
}

TEST(LevyModel, MeanZeroDrift) {
  const auto sym = LevyModel::compound_poisson(1, ParetoJumps{2.0, 1.5, 1.0, true});
  EXPECT_EQ(sym.compensating_drift()[0], 0.0);
  const auto pos = LevyModel::compound_poisson(1, ParetoJumps{2.0, 1.5, 1.0, false});
  // E[J] = alpha x_m / (alpha - 1) = 3.
  EXPECT_NEAR(pos.compensating_drift()[0], -6.0, 1e-12);
  EXPECT_TRUE(LevyModel::brownian(Eigen::MatrixXd::Identity(2, 2)).gamma.isZero());
}

TEST(TimeGrid, IntegerPointsAreExact) {
  const TimeGrid g = TimeGrid::span(-3.0, 2.0, 1.0 / 64.0);
  EXPECT_EQ(g.cells, 5 * 64);
  EXPECT_EQ(g.t(g.index_of(1.0)), 1.0);
  EXPECT_EQ(g.index_of(0.3), -1);
}

TEST(SimulatePath, BrownianIncrementVariance) {
  const auto bm = LevyModel::brownian(Eigen::MatrixXd::Identity(2, 2));
  const auto path = simulate_path(bm, TimeGrid::span(0.0, 100000.0, 1.0), 1);
  for (int i = 0; i < 2; ++i) {
    std::vector<double> x(path.grid.cells);
    for (long k = 0; k < path.grid.cells; ++k) x[k] = path.increment(k)[i];
    EXPECT_NEAR(stats::variance(x), 1.0, 0.03);
  }
}

TEST(SimulatePath, JumpDriversHaveMeanZero) {
  const std::vector<LevyModel> models{
      LevyModel::compound_poisson(1, ParetoJumps{1.0, 1.5, 1.0, true}),
      LevyModel::compound_poisson(1, ParetoJumps{1.0, 1.8, 0.5, false}),
      LevyModel::alpha_stable(1, StableJumps{1.5, 1.0}),
      LevyModel::mixture(Eigen::MatrixXd::Identity(1, 1), ParetoJumps{0.5, 1.7, 1.0, false}, StableJumps{1.6, 0.5}),
  };
  for (const auto& m : models) {
    const auto x = endpoint_samples(m, 20000, 3);
    const double se = std::sqrt(stats::variance(x) / x.size());
    EXPECT_LT(std::abs(stats::mean(x)), 3.0 * se) << to_string(m.kind);
  }
}

TEST(SimulatePath, StableTailIndexByHill) {
  const auto x = endpoint_samples(LevyModel::alpha_stable(1, StableJumps{1.5, 1.0}), 100000, 5);
  const double a = hill_tail_index(x, 1000);
  EXPECT_GE(a, 1.35);
  EXPECT_LE(a, 1.65);
}

TEST(SimulatePath, SameInputsGiveIdenticalBits) {
  const auto m = LevyModel::mixture(Eigen::MatrixXd::Identity(2, 2), ParetoJumps{1.0, 1.5, 1.0, true},
                                    StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(-5.0, 5.0, 1.0 / 32.0);
  const auto a = simulate_path(m, g, 42, 7);
  const auto b = simulate_path(m, g, 42, 7);
  EXPECT_EQ(a.increments, b.increments);
  EXPECT_NE(a.increments, simulate_path(m, g, 42, 8).increments);
}

TEST(SimulatePath, IncrementsAreStationaryAcrossCells) {
  const std::vector<LevyModel> models{LevyModel::compound_poisson(1, ParetoJumps{4.0, 1.5, 1.0, true}),
                                      LevyModel::alpha_stable(1, StableJumps{1.5, 1.0}),
                                      LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1))};
  const TimeGrid g = TimeGrid::span(0.0, 4.0, 0.25);
  for (const auto& m : models) {
    std::vector<double> first, later;
    for (int k = 0; k < 10000; ++k) {
      const auto p = simulate_path(m, g, 9, k);
      first.push_back(p.increments[0]);
      later.push_back(p.increments[12]);
    }
    EXPECT_GT(stats::ks_two_sample(first, later).p_value, 0.01) << to_string(m.kind);
  }
}

TEST(SimulatePath, DisjointCellsAreUncorrelated) {
  const auto bm = LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1));
  const TimeGrid g = TimeGrid::span(0.0, 2.0, 0.5);
  const int n = 10000;
  std::vector<double> a, b;
  for (int k = 0; k < n; ++k) {
    const auto p = simulate_path(bm, g, 4, k);
    a.push_back(p.increments[0]);
    b.push_back(p.increments[1]);
  }
  EXPECT_LT(std::abs(stats::correlation(a, b)), 3.0 / std::sqrt(n));
}

TEST(IntegrateAgainst, ConstantIntegrandTelescopes) {
  const auto m = LevyModel::compound_poisson(2, ParetoJumps{3.0, 1.5, 1.0, true});
  const TimeGrid g = TimeGrid::span(-2.0, 3.0, 1.0 / 16.0);
  const auto p = simulate_path(m, g, 1);
  const Eigen::VectorXd total = integrate_against(p, std::vector<double>(g.cells, 1.0));
  EXPECT_LT((total - (p.value_at(3.0) - p.value_at(-2.0))).norm(), 1e-12);
  std::vector<Eigen::MatrixXd> id(g.cells, Eigen::MatrixXd::Identity(2, 2));
  EXPECT_LT((integrate_against(p, id) - total).norm(), 1e-12);
}

TEST(IntegrateAgainst, IndicatorGivesUnitIncrement) {
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(-2.0, 3.0, 1.0 / 16.0);
  const auto p = simulate_path(m, g, 2);
  const Eigen::VectorXd v = integrate_function(p, [](double s) { return (s >= 0.0 && s < 1.0) ? 1.0 : 0.0; });
  EXPECT_NEAR(v[0], p.value_at(1.0)[0] - p.value_at(0.0)[0], 1e-12);
}

TEST(IntegrateAgainst, ShapeMismatchIsReported) {
  const auto p = simulate_path(LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1)), TimeGrid::span(0, 1, 0.5), 1);
  try {
    integrate_against(p, std::vector<double>(3, 1.0));
    FAIL() << "expected shape_mismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::shape_mismatch);
  }
}

TEST(IntegrateAgainst, ItoIsometryForBrownianDriver) {
  const auto bm = LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1));
  const TimeGrid g = TimeGrid::span(0.0, 1.0, 1.0 / 256.0);
  std::vector<double> v;
  for (int k = 0; k < 20000; ++k)
    v.push_back(integrate_function(simulate_path(bm, g, 6, k), [](double s) { return std::exp(-(1.0 - s)); })[0]);
  const double expected = (1.0 - std::exp(-2.0)) / 2.0;
  EXPECT_NEAR(stats::variance(v) / expected, 1.0, 0.05);
}

TEST(HillTailIndex, ExactParetoSamples) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(100000);
  for (auto& v : x) v = std::pow(1.0 - u(rng), -1.0 / 1.5);
  const double a = hill_tail_index(x, 1000);
  EXPECT_GE(a, 1.42);
  EXPECT_LE(a, 1.58);
}

TEST(HillTailIndex, GaussianHasNoPlateau) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  std::vector<double> x(100000);
  for (auto& v : x) v = nd(rng);
  const double deep = hill_tail_index(x, 100), mid = hill_tail_index(x, 1000), wide = hill_tail_index(x, 10000);
  EXPECT_GT(deep, mid * 1.15);
  EXPECT_GT(mid, wide * 1.15);
}

TEST(HillTailIndex, StableSamplesPlateau) {
  // Closer to 2 the second-order term biases Hill upward (about 1.87 at alpha 1.7).
  const auto x = endpoint_samples(LevyModel::alpha_stable(1, StableJumps{1.3, 1.0}), 100000, 13);
  for (int k : {500, 1000, 2000}) EXPECT_NEAR(hill_tail_index(x, k), 1.3, 0.15) << "k=" << k;
}

TEST(HillTailIndex, NeedsMoreSamplesThanOrderStatistics) {
  try {
    hill_tail_index({1.0, 2.0, 3.0}, 3);
    FAIL() << "expected insufficient_samples";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_samples);
  }
}

std::vector<double> indicator_on(const TimeGrid& g, double a, double b, double value = 1.0) {
  std::vector<double> f(g.cells, 0.0);
  for (long k = 0; k < g.cells; ++k)
    if (g.t(k) >= a && g.t(k) < b) f[k] = value;
  return f;
}

TEST(IntegralContinuity, ShrinkingSupportGap) {
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(0.0, 1.0, 1.0 / 1024.0);
  std::vector<std::vector<double>> seq;
  for (int n : {4, 16, 64, 256, 1024}) seq.push_back(indicator_on(g, 0.0, 1.0 - 1.0 / n));
  const auto r = integral_continuity_check(m, seq, indicator_on(g, 0.0, 1.0), g, 3, 2000, 0.1);
  EXPECT_TRUE(r.non_increasing);
  EXPECT_LT(r.probability.back(), 0.05);
}

TEST(IntegralContinuity, ConstantSequenceHasZeroProbability) {
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(0.0, 1.0, 1.0 / 64.0);
  const auto f = indicator_on(g, 0.0, 1.0);
  const auto r = integral_continuity_check(m, {f, f, f}, f, g, 3, 500, 0.1);
  for (double p : r.probability) EXPECT_EQ(p, 0.0);
}

TEST(IntegralContinuity, PerturbationOfOrderOneOverN) {
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(0.0, 1.0, 1.0 / 64.0);
  std::vector<std::vector<double>> seq;
  for (int n : {1, 4, 16, 64}) seq.push_back(indicator_on(g, 0.0, 1.0, 1.0 + 1.0 / n));
  const auto r = integral_continuity_check(m, seq, indicator_on(g, 0.0, 1.0), g, 3, 2000, 0.1);
  EXPECT_TRUE(r.non_increasing);
  EXPECT_GT(r.probability.front(), r.probability.back());
  EXPECT_LT(r.probability.back(), 0.05);
}

}  // namespace
}  // namespace carma
