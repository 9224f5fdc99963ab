#include "carma/polyalg.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "carma/error.hpp"

namespace carma {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
// Multiple roots split by ~eps^(1/m) in the companion eigensolve.
constexpr double kClusterRadius = 1e-5;
constexpr double kAxisTolerance = 1e-9;
constexpr int kContourNodes = 256;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string format_complex(cplx z) {
  std::ostringstream os;
  os.precision(10);
  os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// MatrixPolyPair

void MatrixPolyPair::validate() const {
  if (d < 1) fail(ErrorCode::invalid_parameter, "dimension d must be >= 1");
  if (q < 0 || p <= q)
    fail(ErrorCode::invalid_parameter, "orders must satisfy p > q >= 0 (got p=" +
                                           std::to_string(p) + ", q=" + std::to_string(q) + ")");
  if (static_cast<int>(A.size()) != p)
    fail(ErrorCode::shape_mismatch, "expected " + std::to_string(p) + " AR coefficients, got " +
                                        std::to_string(A.size()));
  if (static_cast<int>(B.size()) != q + 1)
    fail(ErrorCode::shape_mismatch, "expected " + std::to_string(q + 1) +
                                        " MA coefficients, got " + std::to_string(B.size()));
  for (const auto& m : A)
    if (m.rows() != d || m.cols() != d)
      fail(ErrorCode::shape_mismatch, "AR coefficient is not " + std::to_string(d) + "x" +
                                          std::to_string(d));
  for (const auto& m : B)
    if (m.rows() != d || m.cols() != d)
      fail(ErrorCode::shape_mismatch, "MA coefficient is not " + std::to_string(d) + "x" +
                                          std::to_string(d));
  for (const auto& m : A)
    if (!m.allFinite()) fail(ErrorCode::invalid_parameter, "AR coefficient has non-finite entries");
  for (const auto& m : B)
    if (!m.allFinite()) fail(ErrorCode::invalid_parameter, "MA coefficient has non-finite entries");
  if (B.front().isZero(0.0)) fail(ErrorCode::invalid_parameter, "B_0 must not be the zero matrix");
}

MatrixPolyPair MatrixPolyPair::make(std::vector<Mat> A, std::vector<Mat> B) {
  MatrixPolyPair pq;
  pq.p = static_cast<int>(A.size());
  pq.q = static_cast<int>(B.size()) - 1;
  pq.d = B.empty() ? 0 : static_cast<int>(B.front().rows());
  pq.A = std::move(A);
  pq.B = std::move(B);
  pq.validate();
  return pq;
}

MatrixPolyPair MatrixPolyPair::scalar(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<Mat> A;
  std::vector<Mat> B;
  for (double x : a) A.push_back(Mat::Constant(1, 1, x));
  for (double x : b) B.push_back(Mat::Constant(1, 1, x));
  return make(std::move(A), std::move(B));
}

CMat eval_P(const MatrixPolyPair& pq, cplx z) {
  CMat acc = CMat::Identity(pq.d, pq.d);
  for (const auto& Ai : pq.A) acc = z * acc + Ai.cast<cplx>();
  return acc;
}

CMat eval_Q(const MatrixPolyPair& pq, cplx z) {
  CMat acc = CMat::Zero(pq.d, pq.d);
  for (const auto& Bj : pq.B) acc = z * acc + Bj.cast<cplx>();
  return acc;
}

CMat eval_G(const MatrixPolyPair& pq, cplx z) {
  const CMat P = eval_P(pq, z);
  Eigen::PartialPivLU<CMat> lu(P);
  const double rc = lu.rcond();
  if (!(rc > 1e-14)) {
    fail(ErrorCode::singular_solve,
         "P(z) is numerically singular at z = " + format_complex(z) +
             " (reciprocal condition " + std::to_string(rc) + ")");
  }
  return lu.solve(eval_Q(pq, z));
}

CMat eval_transfer(const MatrixPolyPair& pq, double mu) { return eval_G(pq, cplx(0.0, mu)); }

// ---------------------------------------------------------------------------
// det P and its zeros

Eigen::VectorXd det_poly(const MatrixPolyPair& pq) {
  const int n = pq.d * pq.p;
  double coef_norm = 0.0;
  for (const auto& Ai : pq.A) coef_norm = std::max(coef_norm, Ai.norm());
  const double scale = 1.0 + coef_norm;

  // det P(scale * w^k), w = exp(2 pi i / (n+1)); coefficients by inverse DFT.
  const int m = n + 1;
  std::vector<cplx> values(m);
  for (int k = 0; k < m; ++k) {
    const cplx z = scale * std::polar(1.0, 2.0 * M_PI * k / m);
    values[k] = eval_P(pq, z).determinant();
  }
  Eigen::VectorXd coeffs(m);
  double imag_residual = 0.0;
  for (int j = 0; j < m; ++j) {
    cplx acc = 0.0;
    for (int k = 0; k < m; ++k) acc += values[k] * std::polar(1.0, -2.0 * M_PI * j * k / m);
    acc /= static_cast<double>(m) * std::pow(scale, j);
    coeffs[j] = acc.real();
    imag_residual = std::max(imag_residual, std::abs(acc.imag()));
  }
  if (std::abs(coeffs[n] - 1.0) > 1e-8 || imag_residual > 1e-6) {
    std::ostringstream os;
    os << "det P interpolation ill-conditioned: leading coefficient " << coeffs[n]
       << ", imaginary residual " << imag_residual << " (rescale the model coefficients)";
    fail(ErrorCode::degenerate_interpolation, os.str());
  }
  coeffs[n] = 1.0;
  return coeffs;
}

int SpectrumOfP::total_multiplicity() const {
  int total = 0;
  for (const auto& z : zeros) total += z.multiplicity;
  return total;
}

double SpectrumOfP::min_abs_real() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& z : zeros) r = std::min(r, std::abs(z.value.real()));
  return r;
}

double SpectrumOfP::max_modulus() const {
  double r = 0.0;
  for (const auto& z : zeros) r = std::max(r, std::abs(z.value));
  return r;
}

SpectrumOfP cluster_roots(const Eigen::VectorXd& coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1) fail(ErrorCode::invalid_parameter, "polynomial must have degree >= 1");
  const double lead = coeffs[n];
  if (lead == 0.0) fail(ErrorCode::invalid_parameter, "leading coefficient is zero");

  Mat companion = Mat::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeffs[i] / lead;
  Eigen::EigenSolver<Mat> es(companion, false);
  if (es.info() != Eigen::Success) fail(ErrorCode::internal, "companion eigenvalue solve failed");
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + n);

  // Greedy single-linkage clustering with relative radius.
  std::vector<int> label(n, -1);
  int clusters = 0;
  for (int i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = clusters;
    bool grown = true;
    while (grown) {
      grown = false;
      for (int j = 0; j < n; ++j) {
        if (label[j] >= 0) continue;
        for (int k = 0; k < n; ++k) {
          if (label[k] != clusters) continue;
          if (std::abs(roots[j] - roots[k]) <= kClusterRadius * (1.0 + std::abs(roots[k]))) {
            label[j] = clusters;
            grown = true;
            break;
          }
        }
      }
    }
    ++clusters;
  }

  SpectrumOfP spec;
  for (int c = 0; c < clusters; ++c) {
    cplx sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i)
      if (label[i] == c) {
        sum += roots[i];
        ++count;
      }
    cplx center = sum / static_cast<double>(count);
    // Real polynomials: snap numerically real zeros onto the axis.
    if (std::abs(center.imag()) <= 1e-7 * (1.0 + std::abs(center)))
      center = cplx(center.real(), 0.0);
    spec.zeros.push_back({center, count});
  }
  std::sort(spec.zeros.begin(), spec.zeros.end(), [](const PolyZero& a, const PolyZero& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });

  spec.admissible = true;
  spec.causal = true;
  for (const auto& z : spec.zeros) {
    if (std::abs(z.value.real()) < kAxisTolerance * (1.0 + std::abs(z.value)))
      spec.admissible = false;
    if (!(z.value.real() < 0.0)) spec.causal = false;
  }
  if (!spec.admissible) spec.causal = false;
  return spec;
}

SpectrumOfP spectrum(const MatrixPolyPair& pq) {
  SpectrumOfP spec = cluster_roots(det_poly(pq));
  if (!spec.admissible) {
    std::ostringstream os;
    os << "det P has zeros on the imaginary axis:";
    for (const auto& z : spec.zeros)
      if (std::abs(z.value.real()) < kAxisTolerance * (1.0 + std::abs(z.value)))
        os << " lambda = " << format_complex(z.value);
    fail(ErrorCode::inadmissible_model, os.str());
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Laurent coefficients and the kernel expansion

std::vector<CMat> laurent_coefficients(const MatrixPolyPair& pq, const SpectrumOfP& spec,
                                       std::size_t index) {
  const cplx lambda = spec.zeros.at(index).value;
  const int m = spec.zeros[index].multiplicity;
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < spec.zeros.size(); ++j)
    if (j != index) nearest = std::min(nearest, std::abs(spec.zeros[j].value - lambda));
  const double r = std::isfinite(nearest) ? 0.25 * nearest : 0.25 * (1.0 + std::abs(lambda));

  // a_{-k} = (1/2 pi i) oint G(z) (z - lambda)^{k-1} dz, trapezoid in theta.
  std::vector<CMat> a(m + 1, CMat::Zero(pq.d, pq.d));
  double g_max = 0.0;
  for (int j = 0; j < kContourNodes; ++j) {
    const cplx w = r * std::polar(1.0, 2.0 * M_PI * (j + 0.5) / kContourNodes);
    const CMat G = eval_G(pq, lambda + w);
    g_max = std::max(g_max, G.norm());
    cplx wk = w;
    for (int k = 1; k <= m + 1; ++k) {
      a[k - 1] += G * wk;
      wk *= w;
    }
  }
  for (auto& ak : a) ak /= static_cast<double>(kContourNodes);

  const double scale = g_max * std::pow(r, m + 1);
  if (a[m].norm() > 1e-8 * scale + 1e-300) {
    std::ostringstream os;
    os << "Laurent circle around lambda = " << format_complex(lambda)
       << " does not isolate a pole of order <= " << m << " (residual " << a[m].norm() / scale
       << ")";
    fail(ErrorCode::contour_quadrature, os.str());
  }
  a.pop_back();
  return a;
}

KernelExpansion kernel_expansion(const MatrixPolyPair& pq, const SpectrumOfP& spec) {
  if (!spec.admissible)
    fail(ErrorCode::inadmissible_model, "kernel expansion requires an admissible spectrum");
  KernelExpansion ke;
  ke.d = pq.d;
  ke.scale = kSqrt2Pi;
  for (std::size_t i = 0; i < spec.zeros.size(); ++i) {
    const cplx lambda = spec.zeros[i].value;
    const std::vector<CMat> a = laurent_coefficients(pq, spec, i);
    const double sign = lambda.real() < 0.0 ? 1.0 : -1.0;
    for (std::size_t s = 0; s < a.size(); ++s)
      ke.terms.push_back({lambda, static_cast<int>(s), sign * a[s] / factorial(static_cast<int>(s))});
  }
  return ke;
}

double KernelExpansion::decay_rate() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& t : terms) r = std::min(r, std::abs(t.lambda.real()));
  return r;
}

double KernelExpansion::tail_bound(double H) const {
  return std::max(tail_bound_side(H, 1), tail_bound_side(H, -1));
}

double KernelExpansion::tail_bound_side(double H, int side) const {
  double bound = 0.0;
  for (const auto& t : terms) {
    // Terms with Re(lambda) < 0 live on u > 0.
    if ((t.lambda.real() < 0.0) != (side > 0)) continue;
    const double rho = std::abs(t.lambda.real());
    const double u = std::max(H, t.s / rho);  // u^s e^{-rho u} decreases beyond s/rho
    bound += t.C.norm() * std::pow(u, t.s) * std::exp(-rho * u);
  }
  return scale * bound;
}

CMat kernel_eval_complex(const KernelExpansion& ke, double t) {
  CMat h = CMat::Zero(ke.d, ke.d);
  if (t == 0.0) return h;
  for (const auto& term : ke.terms) {
    if (!(term.lambda.real() * t < 0.0)) continue;
    h += (std::pow(t, term.s) * std::exp(term.lambda * t)) * term.C;
  }
  return ke.scale * h;
}

Mat kernel_eval(const KernelExpansion& ke, double t) { return kernel_eval_complex(ke, t).real(); }

CMat kernel_fourier(const KernelExpansion& ke, double mu) {
  CMat g = CMat::Zero(ke.d, ke.d);
  const cplx iw(0.0, mu);
  for (const auto& term : ke.terms) {
    const double sign = term.lambda.real() < 0.0 ? 1.0 : -1.0;
    g += (sign * factorial(term.s) / std::pow(iw - term.lambda, term.s + 1)) * term.C;
  }
  return g;
}

// ---------------------------------------------------------------------------
// FFT oracle

namespace {

// Coefficients G_n of G(z) = sum_{n>=1} G_n z^{-n}, n = 1..count.
std::vector<CMat> markov_parameters(const MatrixPolyPair& pq, int count) {
  const int lag = pq.p - pq.q;
  std::vector<CMat> G(count + 1, CMat::Zero(pq.d, pq.d));
  for (int n = 1; n <= count; ++n) {
    const int j = n - lag;
    if (j >= 0 && j <= pq.q) G[n] = pq.B[j].cast<cplx>();
    for (int i = 1; i <= std::min(pq.p, n - 1); ++i) G[n] -= pq.A[i - 1].cast<cplx>() * G[n - i];
  }
  return G;
}

// Reference R(z) = sum_k R_k (z+1)^{-k} sharing the first K Markov parameters.
std::vector<CMat> reference_coefficients(const std::vector<CMat>& G, int K) {
  std::vector<CMat> R(K + 1, CMat::Zero(G[1].rows(), G[1].cols()));
  for (int n = 1; n <= K; ++n) {
    R[n] = G[n];
    for (int k = 1; k < n; ++k) {
      const double sgn = ((n - k) % 2 == 0) ? 1.0 : -1.0;
      R[n] -= R[k] * (sgn * binomial(n - 1, n - k));
    }
  }
  return R;
}

CMat reference_transfer(const std::vector<CMat>& R, double mu) {
  CMat out = CMat::Zero(R[1].rows(), R[1].cols());
  const cplx w = cplx(1.0, mu);
  cplx pw = 1.0;
  for (std::size_t k = 1; k < R.size(); ++k) {
    pw *= w;
    out += R[k] / pw;
  }
  return out;
}

Mat reference_kernel(const std::vector<CMat>& R, double t) {
  Mat out = Mat::Zero(R[1].rows(), R[1].cols());
  if (t < 0.0) return out;
  for (std::size_t k = 1; k < R.size(); ++k) {
    double v;
    if (t == 0.0)
      v = (k == 1) ? 0.5 : 0.0;  // the inverse transform converges to the midpoint
    else
      v = std::pow(t, static_cast<double>(k - 1)) * std::exp(-t) / factorial(static_cast<int>(k - 1));
    out += v * R[k].real();
  }
  return kSqrt2Pi * out;
}

}  // namespace

FftOracleResult kernel_fft_oracle(const MatrixPolyPair& pq, double t0, double step, int count,
                                  const FftOracleOptions& opts) {
  pq.validate();
  if (count < 1 || !(step > 0.0)) fail(ErrorCode::invalid_parameter, "oracle grid needs count >= 1, step > 0");
  if (!(opts.tolerance > 0.0)) fail(ErrorCode::invalid_parameter, "oracle tolerance must be positive");
  const SpectrumOfP spec = spectrum(pq);
  const int lag = pq.p - pq.q;
  const int K = std::max(0, opts.reference_order);
  const double t_end = t0 + step * (count - 1);

  std::vector<CMat> R;
  if (K > 0) R = reference_coefficients(markov_parameters(pq, K), K);
  auto remainder = [&](double mu) {
    CMat g = eval_transfer(pq, mu);
    if (K > 0) g -= reference_transfer(R, mu);
    return g;
  };

  // Tail |rem(mu)| ~ c |mu|^{-kappa}; estimated sup error (2/sqrt(2pi)) |rem(M)| M / (kappa-1).
  const double kappa = K > 0 ? K + 1.0 : static_cast<double>(lag);
  double t_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < count; ++k) {
    const double t = std::abs(t0 + k * step);
    if (t > 0.5 * step) t_min = std::min(t_min, t);
  }
  auto estimate = [&](double M) {
    if (kappa <= 1.0) {
      // Jump discontinuity at 0: the truncated transform oscillates with amplitude ~ |B_0| / (M t).
      return 2.0 / kSqrt2Pi * pq.B[0].norm() / (M * t_min);
    }
    const double tail = std::max(remainder(M).norm(), remainder(-M).norm());
    return 2.0 / kSqrt2Pi * tail * M / (kappa - 1.0);
  };

  const double rho = std::min(1.0, spec.min_abs_real());
  const double period_needed = (t_end - t0) + 2.0 * 40.0 / rho;

  double M_target = opts.max_frequency;
  if (M_target <= 0.0) {
    M_target = 4.0 * (1.0 + spec.max_modulus());
    while (estimate(M_target) > opts.tolerance) {
      M_target *= 1.5;
      if (M_target / M_PI * period_needed > static_cast<double>(opts.max_points)) break;
    }
  }

  const long r = std::max(1L, static_cast<long>(std::ceil(M_target * step / M_PI)));
  const double dt = step / static_cast<double>(r);
  const double M = M_PI / dt;
  long N = 1;
  while (static_cast<double>(N) * dt < period_needed) N <<= 1;
  if (N > opts.max_points)
    fail(ErrorCode::tolerance_not_achievable,
         "FFT oracle needs " + std::to_string(N) + " points, above the budget of " +
             std::to_string(opts.max_points));

  const double est = estimate(M);
  if (est > opts.tolerance) {
    std::ostringstream os;
    os << "FFT oracle truncation error estimate " << est << " at cutoff M = " << M
       << " exceeds the requested tolerance " << opts.tolerance;
    fail(ErrorCode::tolerance_not_achievable, os.str());
  }

  const double dmu = 2.0 * M_PI / (static_cast<double>(N) * dt);
  std::vector<std::vector<cplx>> spectra(pq.d * pq.d, std::vector<cplx>(N));
  for (long k = 0; k < N; ++k) {
    const double mu = (static_cast<double>(k) - static_cast<double>(N / 2)) * dmu;
    const CMat g = remainder(mu);
    const cplx shift = std::polar(1.0, mu * t0);
    for (int i = 0; i < pq.d; ++i)
      for (int j = 0; j < pq.d; ++j) spectra[i * pq.d + j][k] = g(i, j) * shift;
  }

  Eigen::FFT<double> fft;
  FftOracleResult out;
  out.values.assign(count, Mat::Zero(pq.d, pq.d));
  std::vector<cplx> time_domain;
  for (int i = 0; i < pq.d; ++i) {
    for (int j = 0; j < pq.d; ++j) {
      fft.inv(time_domain, spectra[i * pq.d + j]);
      for (int k = 0; k < count; ++k) {
        const long n = static_cast<long>(k) * r;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx v = time_domain[n] * (static_cast<double>(N) * dmu / kSqrt2Pi * sign);
        out.values[k](i, j) = v.real();
      }
    }
  }
  if (K > 0)
    for (int k = 0; k < count; ++k) out.values[k] += reference_kernel(R, t0 + k * step);

  out.truncation_estimate = est;
  out.max_frequency = M;
  out.time_step = dt;
  out.points = N;
  return out;
}

}  // namespace carma
