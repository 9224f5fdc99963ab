#include <gtest/gtest.h>
#include <gsl/gsl_sf_expint.h>

#include <cmath>

#include "carma/error.hpp"
#include "carma/quadrature.hpp"
#include "carma/spectral.hpp"
#include "carma/stats.hpp"

namespace carma {
namespace {

const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

// int_{-inf}^x F(y) dy with F(y) = (1 - cos y) / (pi y^2), through the sine integral.
double fejer_cdf_oracle(double x) {
  if (x == 0.0) return 0.5;
  return 0.5 + (gsl_sf_Si(x) - (1.0 - std::cos(x)) / x) / M_PI;
}

TEST(FourierIndicator, ClosedFormValues) {
  const auto A = ElementarySet::interval(0.0, 1.0);
  EXPECT_LT(std::abs(fourier_indicator(A, 2.0 * M_PI)), 1e-15);
  EXPECT_NEAR(std::abs(fourier_indicator(A, 0.0) - 1.0 / kSqrt2Pi), 0.0, 1e-15);
  const ElementarySet U({{0.0, 1.0}, {2.0, 3.0}});
  const auto B = ElementarySet::interval(2.0, 3.0);
  for (double mu : {-3.3, 0.0, 0.7, 12.0})
    EXPECT_LT(std::abs(fourier_indicator(U, mu) - fourier_indicator(A, mu) - fourier_indicator(B, mu)), 1e-15);
  // Direct quadrature of (1/sqrt(2pi)) int_0^1 e^{-i mu x} dx.
  const double mu = 2.7;
  const double re = quad::adaptive([&](double x) { return std::cos(mu * x); }, 0.0, 1.0, 1e-14).value / kSqrt2Pi;
  const double im = -quad::adaptive([&](double x) { return std::sin(mu * x); }, 0.0, 1.0, 1e-14).value / kSqrt2Pi;
  EXPECT_NEAR(std::abs(fourier_indicator(A, mu) - std::complex<double>(re, im)), 0.0, 1e-13);
}

TEST(ElementarySet, RejectsOverlapsAndEmptyIntervals) {
  EXPECT_THROW(ElementarySet({{0.0, 1.0}, {0.5, 2.0}}), Error);
  EXPECT_THROW(ElementarySet({{1.0, 1.0}}), Error);
  EXPECT_TRUE(ElementarySet::interval(0, 1).disjoint_from(ElementarySet::interval(1, 2)));
}

TEST(FejerKernel, PointValues) {
  EXPECT_NEAR(fejer_kernel(0.0, 1.0), 1.0 / (2.0 * M_PI), 1e-16);
  EXPECT_NEAR(fejer_kernel(M_PI, 1.0), 2.0 / std::pow(M_PI, 3), 1e-16);
  EXPECT_NEAR(fejer_kernel(0.3, 10.0), 10.0 * fejer_kernel(3.0, 1.0), 1e-15);
}

TEST(FejerKernel, UnitMass) {
  for (double lambda : {1.0, 10.0}) {
    const auto e = quad::real_line([&](double x) { return fejer_kernel(x, lambda); }, 4000.0 / lambda, 2.0,
                                   2.0 * M_PI / lambda, 20);
    EXPECT_NEAR(e.value, 1.0, 1e-6) << lambda;
  }
}

TEST(FejerKernel, AntiderivativeAgreesWithSineIntegral) {
  for (double x : {-500.0, -120.0, -99.0, -7.3, -1.0, 0.0, 1e-3, 0.4, 2.0, 50.0, 101.0, 1e4})
    EXPECT_NEAR(fejer_antiderivative(x), fejer_cdf_oracle(x), 1e-11) << x;
}

TEST(FejerKernel, FourierTransformIsTriangle) {
  for (double lambda : {1.0, 10.0}) {
    for (int k = 0; k < 10; ++k) {
      const double xi = -1.3 * lambda + 0.29 * lambda * k;
      const double tri = std::max(0.0, 1.0 - std::abs(xi) / lambda) / kSqrt2Pi;
      EXPECT_NEAR(fejer_fourier(xi, lambda), tri, 1e-15);
      EXPECT_NEAR(fejer_fourier_quadrature(xi, lambda), tri, 1e-6) << "lambda=" << lambda << " xi=" << xi;
    }
  }
}

TEST(FejerConvolve, AntiderivativeRouteMatchesDirectQuadrature) {
  for (double lambda : {1.0, 10.0, 250.0})
    for (double xi : {-3.0, 0.0, 0.2, 0.999, 1.0, 1.7, 40.0})
      EXPECT_NEAR(fejer_convolve_indicator(0.0, 1.0, lambda, xi, 2.0),
                  fejer_convolve_indicator_quadrature(0.0, 1.0, lambda, xi, 2.0), 1e-9)
          << lambda << " " << xi;
}

TEST(FejerConvolve, FarFieldDecay) {
  for (double lambda : {1.0, 10.0, 100.0}) {
    const double v = fejer_convolve_indicator(0.0, 1.0, lambda, 1.0 + 100.0 / lambda);
    // Relative to (b - a) times the kernel peak lambda / (2 pi).
    EXPECT_LT(v, 1e-3 * lambda / (2.0 * M_PI)) << lambda;
    EXPECT_LE(v, 2.0 / (M_PI * lambda * std::pow(100.0 / lambda, 2)));
  }
}

TEST(FejerConvolve, ApproximateIdentityAtMidpoint) {
  double prev = 1.0;
  for (double lambda : {10.0, 100.0, 1000.0, 10000.0}) {
    const double err = std::abs(fejer_convolve_indicator(0.0, 1.0, lambda, 0.5) - 1.0);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(FejerConvolve, SymmetricIntervalGivesEvenFunction) {
  for (double lambda : {0.5, 3.0, 40.0})
    for (double xi : {0.1, 0.9, 1.0, 2.5, 30.0})
      EXPECT_NEAR(fejer_convolve_indicator(-1.0, 1.0, lambda, xi), fejer_convolve_indicator(-1.0, 1.0, lambda, -xi),
                  1e-10);
}

TEST(FejerL1, IndicatorErrorsDecrease) {
  const PiecewiseConstant f{{0.0, 1.0}, {1.0}};
  const auto r = fejer_l1_convergence(f, {10.0, 100.0, 1000.0});
  EXPECT_TRUE(r.non_increasing);
  EXPECT_GT(r.errors[0], r.errors[1]);
  EXPECT_GT(r.errors[1], r.errors[2]);
  EXPECT_LT(r.errors[2], 0.02);
}

TEST(FejerL1, ZeroFunction) {
  const PiecewiseConstant f{{0.0, 1.0}, {0.0}};
  for (double e : fejer_l1_convergence(f, {10.0, 100.0}).errors) EXPECT_EQ(e, 0.0);
}

TEST(FejerL1, SmoothedInputConvergesFasterThanIndicator) {
  // Staircase of F_2 * 1_[0,1) on a fine partition: small jumps only.
  PiecewiseConstant f;
  const int cells = 60;
  for (int i = 0; i <= cells; ++i) f.breaks.push_back(-2.5 + 6.0 * i / cells);
  for (int i = 0; i < cells; ++i)
    f.values.push_back(fejer_convolve_indicator(0.0, 1.0, 2.0, 0.5 * (f.breaks[i] + f.breaks[i + 1])));
  const auto smooth = fejer_l1_convergence(f, {100.0});
  const auto rough = fejer_l1_convergence(PiecewiseConstant{{0.0, 1.0}, {1.0}}, {100.0});
  EXPECT_LT(smooth.errors[0], 0.2 * rough.errors[0]);
}

TEST(RandomContent, EmptySetAndAdditivity) {
  const auto m = LevyModel::compound_poisson(2, ParetoJumps{1.0, 1.5, 1.0, true});
  const auto path = simulate_path(m, TimeGrid::span(-64.0, 64.0, 1.0 / 8.0), 3);
  EXPECT_EQ(random_content(ElementarySet(), path).value.norm(), 0.0);
  const auto A = ElementarySet::interval(0.0, 1.0), B = ElementarySet::interval(2.0, 3.0);
  const Eigen::VectorXcd sum = random_content(A, path).value + random_content(B, path).value;
  EXPECT_LT((random_content(A.united(B), path).value - sum).norm(), 1e-12);
}

TEST(RandomContent, NarrowGridExceedsTruncationBudget) {
  const auto m = LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1));
  const auto path = simulate_path(m, TimeGrid::span(-2.0, 2.0, 1.0 / 8.0), 3);
  try {
    random_content(ElementarySet::interval(0.0, 1.0), path, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::truncation_budget);
  }
}

// E|int f dM|^2 = (1/2pi) int |f^|^2 for Brownian L with unit covariance.
TEST(RandomContent, BrownianIsometry) {
  const auto bm = LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1));
  const TimeGrid g = TimeGrid::span(-64.0, 64.0, 1.0 / 8.0);
  const std::vector<ElementarySet> sets{ElementarySet::interval(0.0, 1.0), ElementarySet({{0.0, 1.0}, {2.0, 3.0}}),
                                        ElementarySet::interval(-1.0, 0.5)};
  const int n = 10000;
  for (const auto& A : sets) {
    std::vector<double> re(n), im(n);
    const auto w = random_content_weights(A, g);
    for (int k = 0; k < n; ++k) {
      const auto v = integrate_against(simulate_path(bm, g, 8, k), w)[0];
      re[k] = v.real();
      im[k] = v.imag();
    }
    const double oracle_re = quad::gauss_panels(
        [&](double s) { return std::pow(fourier_indicator(A, s).real(), 2); }, g.start(), g.end(), 1024, 20);
    const double oracle_im = quad::gauss_panels(
        [&](double s) { return std::pow(fourier_indicator(A, s).imag(), 2); }, g.start(), g.end(), 1024, 20);
    EXPECT_NEAR(stats::variance(re) / (oracle_re / (2.0 * M_PI)), 1.0, 0.05);
    EXPECT_NEAR((stats::variance(re) + stats::variance(im)) / ((oracle_re + oracle_im) / (2.0 * M_PI)), 1.0, 0.05);
    // Plancherel: the full-line value is |A| / (2 pi); the window misses O(1/T).
    EXPECT_NEAR((oracle_re + oracle_im) / A.measure(), 1.0, 0.02);
  }
}

TEST(SpectralLevy, ZeroTimeGivesZero) {
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const auto path = simulate_path(m, TimeGrid::span(-20.0, 20.0, 1.0 / 64.0), 1);
  EXPECT_EQ(spectral_levy_approx(0.0, 50.0, path).value.norm(), 0.0);
}

TEST(SpectralLevy, WeightsAreFejerSmoothedIndicator) {
  const TimeGrid g = TimeGrid::span(-20.0, 20.0, 1.0 / 16.0);
  const auto w = spectral_levy_weights(-1.5, 5.0, g);
  for (long k : {0L, 300L, 310L, 320L, 639L})
    EXPECT_NEAR(w.weights[k], -fejer_convolve_indicator(-1.5, 0.0, 5.0, g.t(k)), 1e-12);
}

TEST(SpectralLevy, PathwiseErrorShrinksWithLambda) {
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(-50.0, 51.0, 1.0 / 512.0);
  std::vector<std::vector<double>> err(3);
  const std::vector<double> lambdas{10.0, 50.0, 250.0};
  std::vector<ApproxWeights> w;
  for (double l : lambdas) w.push_back(spectral_levy_weights(1.0, l, g));
  for (int k = 0; k < 40; ++k) {
    const auto path = simulate_path(m, g, 21, k);
    const double target = path.value_at(1.0)[0];
    for (int j = 0; j < 3; ++j) err[j].push_back(std::abs(integrate_against(path, w[j].weights)[0] - target));
  }
  EXPECT_GT(stats::median(err[0]), stats::median(err[1]));
  EXPECT_GT(stats::median(err[1]), stats::median(err[2]));
}

MatrixPolyPair car21() { return MatrixPolyPair::scalar({1.5, 0.5}, {1.0, 2.0}); }

TEST(SmoothedKernel, FftMatchesQuadrature) {
  const auto pq = car21();
  const auto ke = kernel_expansion(pq, spectrum(pq));
  for (double lambda : {10.0, 50.0}) {
    const auto sk = fejer_smooth_kernel(ke, lambda, -5.0, 0.125, 161);
    EXPECT_LT(sk.aliasing_bound, 1e-7);
    for (long k = 0; k < 161; k += 8)
      EXPECT_NEAR(sk.at_index(k)(0, 0), fejer_smooth_kernel_quadrature(ke, lambda, -5.0 + 0.125 * k)(0, 0),
                  1e-7 + sk.aliasing_bound)
          << lambda << " " << k;
  }
}

TEST(SpectralMcarma, ZeroKernelGivesZero) {
  const auto pq = car21();
  auto ke = kernel_expansion(pq, spectrum(pq));
  for (auto& term : ke.terms) term.C.setZero();
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const auto path = simulate_path(m, TimeGrid::span(-40.0, 11.0, 1.0 / 64.0), 1);
  EXPECT_LT(spectral_mcarma_approx(1.0, 50.0, path, ke).value.norm(), 1e-12);
}

TEST(SpectralMcarma, ApproachesMovingAverage) {
  const auto pq = car21();
  const auto ke = kernel_expansion(pq, spectrum(pq));
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(-90.0, 51.0, 1.0 / 256.0);
  const auto ma = moving_average_weights(1.0, g, ke);
  std::vector<MatrixWeights> w;
  for (double l : {10.0, 50.0, 250.0}) w.push_back(spectral_mcarma_weights(1.0, l, g, ke));
  std::vector<std::vector<double>> err(3);
  for (int k = 0; k < 30; ++k) {
    const auto path = simulate_path(m, g, 5, k);
    const double y = apply_weights(ma, path)[0];
    for (int j = 0; j < 3; ++j) err[j].push_back(std::abs(apply_weights(w[j], path)[0] - y));
  }
  EXPECT_GT(stats::median(err[0]), stats::median(err[1]));
  EXPECT_GT(stats::median(err[1]), stats::median(err[2]));
}

TEST(MovingAverage, OuStationaryVariance) {
  const auto pq = MatrixPolyPair::scalar({1.0}, {1.0});
  const auto ke = kernel_expansion(pq, spectrum(pq));
  const auto bm = LevyModel::brownian(Eigen::MatrixXd::Identity(1, 1));
  const TimeGrid g = TimeGrid::span(-25.0, 1.0, 1.0 / 64.0);
  const auto w = moving_average_weights(1.0, g, ke);
  std::vector<double> y;
  for (int k = 0; k < 10000; ++k) y.push_back(apply_weights(w, simulate_path(bm, g, 2, k))[0]);
  EXPECT_NEAR(stats::variance(y) / 0.5, 1.0, 0.05);
}

TEST(MovingAverage, ShiftedTimesShareTheMarginal) {
  const auto pq = car21();
  const auto ke = kernel_expansion(pq, spectrum(pq));
  const auto m = LevyModel::compound_poisson(1, ParetoJumps{2.0, 1.5, 1.0, true});
  const TimeGrid g = TimeGrid::span(-60.0, 4.0, 1.0 / 16.0);
  const auto w1 = moving_average_weights(1.0, g, ke), w2 = moving_average_weights(3.5, g, ke);
  std::vector<double> a, b;
  for (int k = 0; k < 4000; ++k) {
    a.push_back(apply_weights(w1, simulate_path(m, g, 3, k))[0]);
    b.push_back(apply_weights(w2, simulate_path(m, g, 3, 4000 + k))[0]);
  }
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.01);
}

TEST(MovingAverage, InheritsStableTailIndex) {
  const auto pq = car21();
  const auto ke = kernel_expansion(pq, spectrum(pq));
  const auto m = LevyModel::alpha_stable(1, StableJumps{1.5, 1.0});
  const TimeGrid g = TimeGrid::span(-40.0, 1.0, 1.0 / 8.0);
  const auto w = moving_average_weights(1.0, g, ke);
  std::vector<double> y;
  for (int k = 0; k < 30000; ++k) y.push_back(apply_weights(w, simulate_path(m, g, 4, k))[0]);
  EXPECT_NEAR(hill_tail_index(y, 300), 1.5, 0.15);
}

TEST(MovingAverage, ShortHistoryIsReported) {
  const auto pq = MatrixPolyPair::scalar({1.0}, {1.0});
  const auto ke = kernel_expansion(pq, spectrum(pq));
  try {
    moving_average_weights(1.0, TimeGrid::span(-3.0, 1.0, 0.125), ke, 1e-6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::history_truncation);
  }
}

}  // namespace
}  // namespace carma
