#include "carma/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "carma/error.hpp"
#include "carma/quadrature.hpp"

namespace carma {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kAsymptoticStart = 100.0;

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// F(x) = (1/2pi) sinc(x/2)^2.
double fejer_unit(double x) {
  const double s = sinc(0.5 * x);
  return s * s / (2.0 * M_PI);
}

// int_y^inf cos(u)/u^2 du for y >= kAsymptoticStart.
double cos_tail_unit(double y) {
  const double s = std::sin(y);
  const double c = std::cos(y);
  const double y2 = y * y;
  double pw = y2;  // y^n
  double out = -s / pw;
  pw *= y;
  out += 2.0 * c / pw;
  pw *= y;
  out += 6.0 * s / pw;
  pw *= y;
  out -= 24.0 * c / pw;
  pw *= y;
  out -= 120.0 * s / pw;
  pw *= y;
  out += 720.0 * c / pw;
  pw *= y;
  out += 5040.0 * s / pw;
  pw *= y;
  out -= 40320.0 * c / pw;
  return out;
}

// Cumulative integrals int_0^{2 pi k} F, k = 0..16, so the antiderivative only
// needs one partial period of quadrature per call.
const std::array<double, 17>& fejer_period_table() {
  static const std::array<double, 17> table = [] {
    std::array<double, 17> t{};
    t[0] = 0.0;
    for (int k = 1; k < 17; ++k)
      t[k] = t[k - 1] + quad::adaptive(fejer_unit, 2.0 * M_PI * (k - 1), 2.0 * M_PI * k, 1e-15).value;
    return t;
  }();
  return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// Elementary sets

ElementarySet::ElementarySet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  for (const auto& iv : intervals_)
    if (!(iv.a < iv.b) || !std::isfinite(iv.a) || !std::isfinite(iv.b))
      fail(ErrorCode::invalid_parameter, "elementary set intervals need finite a < b");
  std::sort(intervals_.begin(), intervals_.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
  for (std::size_t i = 1; i < intervals_.size(); ++i)
    if (intervals_[i].a < intervals_[i - 1].b)
      fail(ErrorCode::invalid_parameter, "elementary set intervals must be disjoint");
}

double ElementarySet::measure() const {
  double m = 0.0;
  for (const auto& iv : intervals_) m += iv.b - iv.a;
  return m;
}

ElementarySet ElementarySet::shifted(double tau) const {
  std::vector<Interval> out = intervals_;
  for (auto& iv : out) {
    iv.a += tau;
    iv.b += tau;
  }
  return ElementarySet(std::move(out));
}

bool ElementarySet::disjoint_from(const ElementarySet& other) const {
  for (const auto& x : intervals_)
    for (const auto& y : other.intervals_)
      if (x.a < y.b && y.a < x.b) return false;
  return true;
}

ElementarySet ElementarySet::united(const ElementarySet& other) const {
  if (!disjoint_from(other)) fail(ErrorCode::invalid_parameter, "union of overlapping elementary sets");
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return ElementarySet(std::move(all));
}

std::complex<double> fourier_indicator(const ElementarySet& A, double mu) {
  std::complex<double> acc = 0.0;
  for (const auto& iv : A.intervals()) {
    const double len = iv.b - iv.a;
    acc += std::polar(len * sinc(0.5 * len * mu), -0.5 * (iv.a + iv.b) * mu);
  }
  return acc / kSqrt2Pi;
}

// ---------------------------------------------------------------------------
// Fejer kernel

double fejer_kernel(double x, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_parameter, "Fejer parameter lambda must be positive");
  return lambda * fejer_unit(lambda * x);
}

double fejer_fourier(double xi, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_parameter, "Fejer parameter lambda must be positive");
  return std::max(0.0, 1.0 - std::abs(xi) / lambda) / kSqrt2Pi;
}

double cos_over_square_tail(double omega, double x) {
  if (!(x > 0.0)) fail(ErrorCode::invalid_parameter, "tail integral needs x > 0");
  omega = std::abs(omega);
  if (omega == 0.0) return 1.0 / x;
  const double y = omega * x;
  if (y >= kAsymptoticStart) return omega * cos_tail_unit(y);
  // Quadrature up to the asymptotic regime, expansion beyond.
  const double y1 = kAsymptoticStart;
  const double head =
      quad::adaptive([](double u) { return std::cos(u) / (u * u); }, y, y1, 1e-13 / omega).value;
  return omega * (head + cos_tail_unit(y1));
}

double fejer_antiderivative(double x) {
  if (x < 0.0) return 1.0 - fejer_antiderivative(-x);
  if (x >= kAsymptoticStart) {
    // int_x^inf F = (1/pi) (1/x - int_x^inf cos(u)/u^2 du).
    return 1.0 - (1.0 / x - cos_tail_unit(x)) / M_PI;
  }
  const auto& table = fejer_period_table();
  const int k = std::min(16, static_cast<int>(x / (2.0 * M_PI)));
  const double from = 2.0 * M_PI * k;
  const double partial = x > from ? quad::adaptive(fejer_unit, from, x, 1e-14).value : 0.0;
  return 0.5 + table[k] + partial;
}

double fejer_convolve_indicator(double a, double b, double lambda, double xi, double weight) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_parameter, "Fejer parameter lambda must be positive");
  if (!(a < b)) return 0.0;
  // int_a^b F_lambda(xi - y) dy = G(lambda (xi - a)) - G(lambda (xi - b)).
  const double u = lambda * (xi - a);
  const double v = lambda * (xi - b);
  double diff;
  if (v >= 0.0) {
    // Both arguments on the right: subtract tails to avoid cancellation near 1.
    diff = (1.0 - fejer_antiderivative(v)) - (1.0 - fejer_antiderivative(u));
  } else {
    diff = fejer_antiderivative(u) - fejer_antiderivative(v);
  }
  return weight * diff;
}

double fejer_convolve_indicator_quadrature(double a, double b, double lambda, double xi, double weight) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_parameter, "Fejer parameter lambda must be positive");
  if (!(a < b)) return 0.0;
  auto f = [&](double y) { return fejer_kernel(xi - y, lambda); };
  // Split at the peak so the adaptive rule sees it at an endpoint.
  double total = 0.0;
  if (xi > a && xi < b)
    total = quad::adaptive(f, a, xi, 5e-11, 25).value + quad::adaptive(f, xi, b, 5e-11, 25).value;
  else
    total = quad::adaptive(f, a, b, 1e-10, 25).value;
  return weight * total;
}

double fejer_fourier_quadrature(double xi, double lambda) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_parameter, "Fejer parameter lambda must be positive");
  xi = std::abs(xi);
  // F_lambda(x) cos(xi x) = [cos(xi x) - cos((lambda+xi)x)/2 - cos((lambda-xi)x)/2] / (pi lambda x^2).
  const double X = 40.0 * M_PI / lambda;
  double head = 0.0;
  const int periods = 20;
  for (int k = 0; k < periods; ++k) {
    const double lo = X * k / periods;
    const double hi = X * (k + 1) / periods;
    head += quad::adaptive([&](double x) { return fejer_kernel(x, lambda) * std::cos(xi * x); }, lo, hi,
                           1e-13)
                .value;
  }
  const double tail = (cos_over_square_tail(xi, X) - 0.5 * cos_over_square_tail(lambda + xi, X) -
                       0.5 * cos_over_square_tail(lambda - xi, X)) /
                      (M_PI * lambda);
  return 2.0 * (head + tail) / kSqrt2Pi;
}

// ---------------------------------------------------------------------------
// L1 approximation

double PiecewiseConstant::l1_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += std::abs(values[i]) * (breaks[i + 1] - breaks[i]);
  return s;
}

double PiecewiseConstant::operator()(double x) const {
  if (breaks.empty() || x < breaks.front() || x >= breaks.back()) return 0.0;
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
  return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
}

L1Convergence fejer_l1_convergence(const PiecewiseConstant& f, const std::vector<double>& lambdas) {
  if (f.breaks.size() != f.values.size() + 1)
    fail(ErrorCode::shape_mismatch, "piecewise constant function needs one more break than values");
  for (std::size_t i = 1; i < f.breaks.size(); ++i)
    if (!(f.breaks[i] > f.breaks[i - 1])) fail(ErrorCode::invalid_parameter, "breaks must increase");
  L1Convergence out;
  out.lambdas = lambdas;
  const double mass = f.l1_norm();
  for (double lambda : lambdas) {
    if (mass == 0.0) {
      out.errors.push_back(0.0);
      out.tail_bound.push_back(0.0);
      continue;
    }
    auto smoothed = [&](double x) {
      double s = 0.0;
      for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.values[i] != 0.0) s += fejer_convolve_indicator(f.breaks[i], f.breaks[i + 1], lambda, x, f.values[i]);
      return s;
    };
    auto integrand = [&](double x) { return std::abs(f(x) - smoothed(x)); };
    // Window of W beyond the support; outside, |F_lambda * f| <= 2 ||f||_1 / (pi lambda dist^2).
    const double W = std::max(50.0, 5000.0 / lambda);
    std::vector<double> nodes;
    nodes.push_back(f.breaks.front() - W);
    for (double b : f.breaks) {
      // Extra nodes near each discontinuity where the error concentrates.
      for (double off : {-100.0, -10.0, -1.0}) nodes.push_back(b + off / lambda);
      nodes.push_back(b);
      for (double off : {1.0, 10.0, 100.0}) nodes.push_back(b + off / lambda);
    }
    nodes.push_back(f.breaks.back() + W);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    double total = 0.0;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const double lo = std::max(nodes[i - 1], f.breaks.front() - W);
      const double hi = std::min(nodes[i], f.breaks.back() + W);
      if (hi > lo) total += quad::adaptive_nothrow(integrand, lo, hi, 1e-9, 20).value;
    }
    out.errors.push_back(total);
    out.tail_bound.push_back(2.0 * 2.0 * mass / (M_PI * lambda * W));
  }
  for (std::size_t i = 1; i < out.errors.size(); ++i)
    if (out.errors[i] > out.errors[i - 1] + 1e-8) out.non_increasing = false;
  return out;
}

// ---------------------------------------------------------------------------
// Random content and approximants

std::vector<std::complex<double>> random_content_weights(const ElementarySet& A, const TimeGrid& grid) {
  std::vector<std::complex<double>> w(grid.cells);
  for (long k = 0; k < grid.cells; ++k) w[k] = fourier_indicator(A, grid.t(k)) / kSqrt2Pi;
  return w;
}

ContentValue random_content(const ElementarySet& A, const SamplePath& path, double edge_tolerance) {
  ContentValue out;
  if (A.empty()) {
    out.value = Eigen::VectorXcd::Zero(path.d);
    return out;
  }
  const double edge = std::min(std::abs(path.grid.start()), std::abs(path.grid.end()));
  out.truncation_bound = path.grid.start() < 0.0 && path.grid.end() > 0.0
                             ? 2.0 * static_cast<double>(A.intervals().size()) / (2.0 * M_PI * edge)
                             : std::numeric_limits<double>::infinity();
  if (out.truncation_bound > edge_tolerance) {
    std::ostringstream os;
    os << "frequency grid [" << path.grid.start() << ", " << path.grid.end()
       << "] leaves an indicator-transform tail of " << out.truncation_bound << " > " << edge_tolerance;
    fail(ErrorCode::truncation_budget, os.str());
  }
  out.value = integrate_against(path, random_content_weights(A, path.grid));
  return out;
}

ApproxWeights spectral_levy_weights(double t, double lambda, const TimeGrid& grid, double edge_tolerance) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_parameter, "Fejer parameter lambda must be positive");
  ApproxWeights out;
  out.weights.assign(grid.cells, 0.0);
  if (t == 0.0) return out;
  const double a = std::min(0.0, t);
  const double b = std::max(0.0, t);
  const double sign = t > 0.0 ? 1.0 : -1.0;
  const double D = std::min(a - grid.start(), grid.end() - b);
  out.truncation_bound = D > 0.0 ? 2.0 * (b - a) / (M_PI * lambda * D * D) : std::numeric_limits<double>::infinity();
  if (out.truncation_bound > edge_tolerance) {
    std::ostringstream os;
    os << "grid [" << grid.start() << ", " << grid.end() << "] too short for t = " << t
       << " at lambda = " << lambda << " (edge weight bound " << out.truncation_bound << ")";
    fail(ErrorCode::truncation_budget, os.str());
  }
  for (long k = 0; k < grid.cells; ++k)
    out.weights[k] = fejer_convolve_indicator(a, b, lambda, grid.t(k), sign);
  return out;
}

SpectralValue spectral_levy_approx(double t, double lambda, const SamplePath& path, double edge_tolerance) {
  const ApproxWeights w = spectral_levy_weights(t, lambda, path.grid, edge_tolerance);
  SpectralValue out;
  out.value = integrate_against(path, w.weights);
  out.truncation_bound = w.truncation_bound;
  return out;
}

constexpr double kSmoothAliasTarget = 1e-8;
constexpr long kSmoothMaxPoints = 1L << 22;

SmoothedKernel fejer_smooth_kernel(const KernelExpansion& ke, double lambda, double v0, double dv, long count) {
  if (!(lambda > 0.0) || !(dv > 0.0) || count < 1)
    fail(ErrorCode::invalid_parameter, "smoothed kernel needs lambda > 0, dv > 0, count >= 1");
  const int d = ke.d;
  const long r = std::max(1L, static_cast<long>(std::ceil(1.05 * lambda * dv / M_PI)));
  const double dt = dv / static_cast<double>(r);
  const double reach = std::max(std::abs(v0), std::abs(v0 + dv * (count - 1)));
  // Images of the far tail |s(v)| <= 2 sqrt(2pi) |g(0)| / (pi lambda v^2) decide the period.
  const double g0 = kernel_fourier(ke, 0.0).norm();
  const double gap_needed = std::sqrt(8.0 * kSqrt2Pi * g0 / (M_PI * lambda * kSmoothAliasTarget));
  const double period = std::max({512.0, 4.0 * reach, 2.0 * reach + gap_needed});
  long N = 1;
  while (static_cast<double>(N) * dt < period && N < kSmoothMaxPoints) N <<= 1;
  // Past the length cap the aliasing target is relaxed; aliasing_bound reports what was reached.
  if (static_cast<double>(N) * dt < 4.0 * reach)
    fail(ErrorCode::truncation_budget, "smoothed kernel FFT would need more than 2^22 points");
  const double dmu = 2.0 * M_PI / (static_cast<double>(N) * dt);

  std::vector<std::vector<std::complex<double>>> spectra(d * d, std::vector<std::complex<double>>(N, 0.0));
  for (long k = 0; k < N; ++k) {
    const double mu = (static_cast<double>(k) - static_cast<double>(N / 2)) * dmu;
    const double taper = 1.0 - std::abs(mu) / lambda;
    if (taper <= 0.0) continue;
    const CMat g = kernel_fourier(ke, mu);
    const std::complex<double> shift = std::polar(taper, mu * v0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) spectra[i * d + j][k] = g(i, j) * shift;
  }

  SmoothedKernel out;
  out.lambda = lambda;
  out.v0 = v0;
  out.dv = dv;
  out.values.assign(count, Mat::Zero(d, d));
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> time_domain;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      fft.inv(time_domain, spectra[i * d + j]);
      for (long k = 0; k < count; ++k) {
        const long n = k * r;
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        out.values[k](i, j) = (time_domain[n] * (static_cast<double>(N) * dmu / kSqrt2Pi * sign)).real();
      }
    }
  const double gap = static_cast<double>(N) * dt - 2.0 * reach;
  out.aliasing_bound = 2.0 * 2.0 * kSqrt2Pi * g0 / (M_PI * lambda * gap * gap) * 2.0;
  return out;
}

Mat fejer_smooth_kernel_quadrature(const KernelExpansion& ke, double lambda, double v, double abs_tol) {
  if (!(lambda > 0.0)) fail(ErrorCode::invalid_parameter, "Fejer parameter lambda must be positive");
  const int d = ke.d;
  Mat out = Mat::Zero(d, d);
  const double rho = ke.decay_rate();
  for (int side : {1, -1}) {
    // Truncate where the kernel bound drops below the tolerance.
    double U = 1.0;
    while (ke.tail_bound_side(U, side) > 0.01 * abs_tol * rho && U < 1e4) U *= 1.5;
    std::vector<double> cuts = {0.0, U};
    const double sv = side * v;
    if (sv > 0.0 && sv < U) cuts.insert(cuts.begin() + 1, sv);
    const double piece = 8.0 * 2.0 * M_PI / lambda;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        auto f = [&](double w) {
          const double u = side * w;
          return fejer_kernel(v - u, lambda) * kernel_eval(ke, u)(i, j);
        };
        double total = 0.0;
        for (std::size_t c = 1; c < cuts.size(); ++c) {
          const int pieces = std::max(1, static_cast<int>(std::ceil((cuts[c] - cuts[c - 1]) / piece)));
          const double h = (cuts[c] - cuts[c - 1]) / pieces;
          for (int p = 0; p < pieces; ++p)
            total += quad::adaptive(f, cuts[c - 1] + p * h, cuts[c - 1] + (p + 1) * h, abs_tol / (pieces * 4.0))
                         .value;
        }
        out(i, j) += total;
      }
  }
  return out;
}

MatrixWeights spectral_mcarma_weights(double t, double lambda, const TimeGrid& grid, const KernelExpansion& ke,
                                      double edge_tolerance) {
  const double DL = t - grid.start();
  const double DR = grid.end() - t;
  if (!(DL > 0.0) || !(DR > 0.0)) fail(ErrorCode::truncation_budget, "t must lie inside the path grid");
  const double g0 = kernel_fourier(ke, 0.0).norm();
  MatrixWeights out;
  out.truncation_bound = (ke.tail_bound_side(DL, 1) + ke.tail_bound_side(DR, -1)) / kSqrt2Pi +
                         2.0 * g0 / (M_PI * lambda * std::min(DL, DR) * std::min(DL, DR));
  if (out.truncation_bound > edge_tolerance) {
    std::ostringstream os;
    os << "grid [" << grid.start() << ", " << grid.end() << "] too short for the smoothed kernel at t = " << t
       << " (bound " << out.truncation_bound << ")";
    fail(ErrorCode::truncation_budget, os.str());
  }
  const long n = grid.cells;
  // v_k = t - t_k for k = n-1 .. 0 is an increasing grid starting at t - t_{n-1}.
  const SmoothedKernel s = fejer_smooth_kernel(ke, lambda, t - grid.t(n - 1), grid.step, n);
  out.truncation_bound += s.aliasing_bound / kSqrt2Pi;
  out.weights.resize(n);
  for (long k = 0; k < n; ++k) out.weights[k] = s.values[n - 1 - k] / kSqrt2Pi;
  return out;
}

Eigen::VectorXd apply_weights(const MatrixWeights& w, const SamplePath& path) {
  return integrate_against(path, w.weights);
}

SpectralValue spectral_mcarma_approx(double t, double lambda, const SamplePath& path, const KernelExpansion& ke,
                                     double edge_tolerance) {
  const MatrixWeights w = spectral_mcarma_weights(t, lambda, path.grid, ke, edge_tolerance);
  SpectralValue out;
  out.value = apply_weights(w, path);
  out.truncation_bound = w.truncation_bound;
  return out;
}

MatrixWeights moving_average_weights(double t, const TimeGrid& grid, const KernelExpansion& ke, double tolerance) {
  const double DL = t - grid.start();
  const double DR = grid.end() - t;
  MatrixWeights out;
  out.truncation_bound = (ke.tail_bound_side(std::max(DL, 0.0), 1) + ke.tail_bound_side(std::max(DR, 0.0), -1)) /
                         kSqrt2Pi;
  if (out.truncation_bound > tolerance) {
    std::ostringstream os;
    os << "simulated history [" << grid.start() << ", " << grid.end() << "] leaves kernel mass bound "
       << out.truncation_bound << " > " << tolerance << " at t = " << t;
    fail(ErrorCode::history_truncation, os.str());
  }
  out.weights.resize(grid.cells);
  for (long k = 0; k < grid.cells; ++k) out.weights[k] = kernel_eval(ke, t - grid.t(k)) / kSqrt2Pi;
  return out;
}

SpectralValue moving_average(double t, const SamplePath& path, const KernelExpansion& ke, double tolerance) {
  const MatrixWeights w = moving_average_weights(t, path.grid, ke, tolerance);
  SpectralValue out;
  out.value = apply_weights(w, path);
  out.truncation_bound = w.truncation_bound;
  // Imaginary residual of the kernel reconstruction at the sampled lags.
  for (long k = 0; k < path.grid.cells; k += std::max(1L, path.grid.cells / 64))
    out.imag_residual = std::max(out.imag_residual,
                                 kernel_eval_complex(ke, t - path.grid.t(k)).imag().cwiseAbs().maxCoeff());
  return out;
}

}  // namespace carma
