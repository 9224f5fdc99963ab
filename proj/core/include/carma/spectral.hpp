#pragma once

#include <complex>
#include <vector>

#include "carma/levy.hpp"
#include "carma/polyalg.hpp"

namespace carma {

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

/// Finite union of disjoint half-open intervals [a_i, b_i).
class ElementarySet {
 public:
  ElementarySet() = default;
  /// Throws invalid_parameter unless a_i < b_i and the intervals are disjoint.
  explicit ElementarySet(std::vector<Interval> intervals);
  static ElementarySet interval(double a, double b) { return ElementarySet({{a, b}}); }

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  double measure() const;
  ElementarySet shifted(double tau) const;
  bool disjoint_from(const ElementarySet& other) const;
  ElementarySet united(const ElementarySet& other) const;

 private:
  std::vector<Interval> intervals_;  // sorted by a
};

/// Fourier transform (1/sqrt(2 pi)) int_A e^{-i mu x} dx.
std::complex<double> fourier_indicator(const ElementarySet& A, double mu);

/// F_lambda(x) = lambda F(lambda x), F(x) = (1/2pi) (sin(x/2)/(x/2))^2.
double fejer_kernel(double x, double lambda);
/// Its Fourier transform (1/sqrt(2pi)) (1 - |xi|/lambda)_+.
double fejer_fourier(double xi, double lambda);
/// Fourier transform of F_lambda computed by quadrature (oracle for fejer_fourier).
double fejer_fourier_quadrature(double xi, double lambda);

/// int_x^inf cos(omega u) / u^2 du for x > 0 and omega * x >= 100 (or omega == 0),
/// by the asymptotic expansion.
double cos_over_square_tail(double omega, double x);

/// G(x) = int_{-inf}^x F(y) dy. Adaptive quadrature for |x| < 100, asymptotic
/// tail expansion beyond.
double fejer_antiderivative(double x);

/// (F_lambda * (w 1_[a,b)))(xi) = w int_a^b F_lambda(xi - y) dy via the antiderivative.
double fejer_convolve_indicator(double a, double b, double lambda, double xi, double weight = 1.0);
/// Same quantity by direct adaptive quadrature with absolute tolerance 1e-10.
double fejer_convolve_indicator_quadrature(double a, double b, double lambda, double xi,
                                           double weight = 1.0);

/// Piecewise constant function: values[i] on [breaks[i], breaks[i+1]).
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values;
  double l1_norm() const;
  double operator()(double x) const;
};

struct L1Convergence {
  std::vector<double> lambdas;
  std::vector<double> errors;      // ||f - F_lambda * f||_{L1} on the truncated window
  std::vector<double> tail_bound;  // bound for the mass outside the window
  bool non_increasing = true;
};
/// ||f - F_lambda * f||_{L1} by quadrature for each lambda.
L1Convergence fejer_l1_convergence(const PiecewiseConstant& f, const std::vector<double>& lambdas);

// ---------------------------------------------------------------------------
// Random content and pathwise approximants. The path's time axis plays the
// role of the frequency variable of M.

struct ContentValue {
  Eigen::VectorXcd value;
  double truncation_bound = 0.0;  // |1^_A| beyond the grid edges
};

/// M(A) = (1/sqrt(2pi)) sum_k 1^_A(t_k) Delta L_k. Throws truncation_budget when
/// the transform bound at the grid edge exceeds edge_tolerance.
ContentValue random_content(const ElementarySet& A, const SamplePath& path,
                            double edge_tolerance = 1e-2);
/// Per-cell weights (1/sqrt(2pi)) 1^_A(t_k) used by random_content.
std::vector<std::complex<double>> random_content_weights(const ElementarySet& A, const TimeGrid& grid);

struct ApproxWeights {
  std::vector<double> weights;  // per cell (scalar integrands)
  double truncation_bound = 0.0;
};

/// Weights (F_lambda * 1_[0,t))(t_k), sign-adjusted for t < 0.
ApproxWeights spectral_levy_weights(double t, double lambda, const TimeGrid& grid,
                                    double edge_tolerance = 1e-3);

struct SpectralValue {
  Eigen::VectorXd value;
  double imag_residual = 0.0;
  double truncation_bound = 0.0;
};
SpectralValue spectral_levy_approx(double t, double lambda, const SamplePath& path,
                                   double edge_tolerance = 1e-3);

/// s_lambda = F_lambda * h sampled at v = v0 + k dv, k = 0..count-1, computed
/// from (1/sqrt(2pi)) int_{-lambda}^{lambda} e^{i v mu} (1 - |mu|/lambda) h^(mu) dmu by FFT.
struct SmoothedKernel {
  double lambda = 0.0;
  double v0 = 0.0;
  double dv = 0.0;
  std::vector<Mat> values;
  double aliasing_bound = 0.0;

  const Mat& at_index(long k) const { return values.at(k); }
};
SmoothedKernel fejer_smooth_kernel(const KernelExpansion& ke, double lambda, double v0, double dv,
                                   long count);
/// Pointwise (F_lambda * h)(v) by adaptive quadrature against the closed-form h.
Mat fejer_smooth_kernel_quadrature(const KernelExpansion& ke, double lambda, double v,
                                   double abs_tol = 1e-9);

struct MatrixWeights {
  std::vector<Mat> weights;  // per cell, already scaled by 1/sqrt(2pi)
  double truncation_bound = 0.0;
};

/// Weights (1/sqrt(2pi)) s_lambda(t - t_k) of the spectral MCARMA approximant.
MatrixWeights spectral_mcarma_weights(double t, double lambda, const TimeGrid& grid,
                                      const KernelExpansion& ke, double edge_tolerance = 1e-3);
SpectralValue spectral_mcarma_approx(double t, double lambda, const SamplePath& path,
                                     const KernelExpansion& ke, double edge_tolerance = 1e-3);

/// Weights (1/sqrt(2pi)) h(t - t_k). Throws history_truncation when the kernel
/// bound beyond the grid exceeds tolerance.
MatrixWeights moving_average_weights(double t, const TimeGrid& grid, const KernelExpansion& ke,
                                     double tolerance = 1e-6);
SpectralValue moving_average(double t, const SamplePath& path, const KernelExpansion& ke,
                             double tolerance = 1e-6);

/// Applies per-cell matrix weights to a path.
Eigen::VectorXd apply_weights(const MatrixWeights& w, const SamplePath& path);

}  // namespace carma
