#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace carma {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

/// Autoregressive/moving-average matrix polynomials
///   P(z) = z^p I + z^{p-1} A_1 + ... + A_p,
///   Q(z) = z^q B_0 + ... + B_q,
/// with p > q >= 0 and d x d real coefficients.
struct MatrixPolyPair {
  int d = 0;
  int p = 0;
  int q = 0;
  std::vector<Mat> A;  // A_1 .. A_p
  std::vector<Mat> B;  // B_0 .. B_q

  /// Builds and validates; throws invalid_parameter / shape_mismatch.
  static MatrixPolyPair make(std::vector<Mat> A, std::vector<Mat> B);
  void validate() const;

  /// Scalar convenience: P = z^p + a[0] z^{p-1} + ... , Q = b[0] z^q + ...
  static MatrixPolyPair scalar(const std::vector<double>& a, const std::vector<double>& b);
};

CMat eval_P(const MatrixPolyPair& pq, cplx z);
CMat eval_Q(const MatrixPolyPair& pq, cplx z);

/// G(z) = P(z)^{-1} Q(z) via an LU solve. Throws singular_solve when P(z) is
/// numerically singular.
CMat eval_G(const MatrixPolyPair& pq, cplx z);

/// g(mu) = P(i mu)^{-1} Q(i mu).
CMat eval_transfer(const MatrixPolyPair& pq, double mu);

/// Coefficients of det P(z), ascending powers, length d*p + 1.
Eigen::VectorXd det_poly(const MatrixPolyPair& pq);

struct PolyZero {
  cplx value;
  int multiplicity = 1;
};

struct SpectrumOfP {
  std::vector<PolyZero> zeros;
  bool admissible = false;  // no zero on the imaginary axis
  bool causal = false;      // all zeros in the open left half-plane

  int total_multiplicity() const;
  /// Smallest |Re lambda| over all zeros.
  double min_abs_real() const;
  double max_modulus() const;
};

/// Roots of a monic-up-to-scale real polynomial (ascending coefficients),
/// clustered into distinct zeros with multiplicities. Flags are set but no
/// admissibility error is raised.
SpectrumOfP cluster_roots(const Eigen::VectorXd& coeffs);

/// Zeros of det P with multiplicities. Throws inadmissible_model (with the
/// offending zero in the message) when a zero lies on the imaginary axis.
SpectrumOfP spectrum(const MatrixPolyPair& pq);

/// Laurent coefficients a_{-1}, ..., a_{-m} of G at spec.zeros[index],
/// computed by trapezoidal quadrature on a circle. Throws contour_quadrature if
/// the coefficient a_{-(m+1)} (zero in exact arithmetic) is not negligible.
std::vector<CMat> laurent_coefficients(const MatrixPolyPair& pq, const SpectrumOfP& spec,
                                       std::size_t index);

struct KernelTerm {
  cplx lambda;
  int s = 0;  // power of mu
  CMat C;
};

/// h(mu) = sqrt(2 pi) sum_terms mu^s e^{lambda mu} 1{Re(lambda) mu < 0} C.
struct KernelExpansion {
  int d = 0;
  double scale = 0.0;  // sqrt(2 pi)
  std::vector<KernelTerm> terms;

  /// min |Re lambda| over the terms.
  double decay_rate() const;
  /// Upper bound for ||h(u)|| (Frobenius) over |u| >= H.
  double tail_bound(double H) const;
  /// Same bound restricted to u >= H (side = +1) or u <= -H (side = -1).
  double tail_bound_side(double H, int side) const;
};

KernelExpansion kernel_expansion(const MatrixPolyPair& pq, const SpectrumOfP& spec);

/// Complex reconstruction; h(0) = 0 by convention.
CMat kernel_eval_complex(const KernelExpansion& ke, double t);
/// Real part of the reconstruction.
Mat kernel_eval(const KernelExpansion& ke, double t);

/// Fourier transform of the kernel recomputed from the expansion,
/// sum_terms (+/-) C s! / (i mu - lambda)^{s+1}; equals g(mu).
CMat kernel_fourier(const KernelExpansion& ke, double mu);

struct FftOracleOptions {
  double tolerance = 1e-8;
  /// Number of Markov parameters matched by the analytic reference
  /// subtracted before the FFT; 0 disables subtraction.
  int reference_order = 3;
  /// Fixed frequency cutoff M; 0 lets the oracle choose M from the tolerance.
  double max_frequency = 0.0;
  /// Upper bound on the FFT length.
  long max_points = 1L << 22;
};

struct FftOracleResult {
  std::vector<Mat> values;     // one per requested time
  double truncation_estimate;  // estimated sup-norm error from the frequency cutoff
  double max_frequency;        // M actually used
  double time_step;            // FFT time resolution
  long points;                 // FFT length
};

/// Independent kernel oracle: numerical inverse Fourier transform of g on a
/// truncated frequency grid, sampled at t0 + k*step, k = 0..count-1. Throws
/// tolerance_not_achievable if the truncation estimate exceeds the tolerance.
FftOracleResult kernel_fft_oracle(const MatrixPolyPair& pq, double t0, double step, int count,
                                  const FftOracleOptions& opts = {});

}  // namespace carma
