#pragma once

#include <functional>
#include <vector>

namespace carma::quad {

using RealFn = std::function<double(double)>;

struct Estimate {
  double value = 0.0;
  double error = 0.0;  // a-posteriori error estimate
};

/// Adaptive Gauss-Kronrod (15/31 points) on a finite interval. Throws
/// ErrorCode::quadrature if the error estimate exceeds abs_tol.
Estimate adaptive(const RealFn& f, double a, double b, double abs_tol, unsigned max_depth = 18);

/// Same as adaptive() but never throws; the caller inspects the error field.
Estimate adaptive_nothrow(const RealFn& f, double a, double b, double abs_tol,
                          unsigned max_depth = 18);

/// Adaptive quadrature on [a, inf) through Boost's exp-sinh rule.
Estimate half_line(const RealFn& f, double a, double abs_tol);

/// Composite fixed-order Gauss-Legendre rule with `panels` equal panels.
double gauss_panels(const RealFn& f, double a, double b, int panels, int order = 20);

/// Integral over the whole real line of a function whose tails decay like
/// |x|^{-kappa}. The finite-window integrals over [-X, X] and [-2X, 2X] are
/// computed with composite Gauss panels and combined by Richardson
/// extrapolation assuming I(X) = I_inf - c X^{1-kappa}.
struct LineEstimate {
  double value = 0.0;
  double window = 0.0;          // X actually used
  double tail_correction = 0.0;  // extrapolated minus I(2X)
  double error = 0.0;            // |I(2X) - I(X)| as a conservative bound
};
LineEstimate real_line(const RealFn& f, double window, double kappa, double panel_width,
                       int order = 20);

/// Gauss-Legendre nodes/weights on [-1, 1]; order must be 10, 20 or 30.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

}  // namespace carma::quad
