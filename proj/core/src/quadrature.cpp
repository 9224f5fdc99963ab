#include "carma/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "carma/error.hpp"

namespace carma::quad {

Estimate adaptive_nothrow(const RealFn& f, double a, double b, double abs_tol, unsigned max_depth) {
  if (a == b) return {};
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  double err = 0.0;
  double l1 = 0.0;
  // Boost terminates on error <= tol * L1; a coarse pass gives L1 so the
  // absolute target can be expressed as a relative one.
  double value = GK::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (err <= abs_tol) return {value, err};
  const double rel = std::max(abs_tol / std::max(l1, 1e-300), 1e-15);
  value = GK::integrate(f, a, b, max_depth, rel, &err, &l1);
  return {value, err};
}

Estimate adaptive(const RealFn& f, double a, double b, double abs_tol, unsigned max_depth) {
  Estimate e = adaptive_nothrow(f, a, b, abs_tol, max_depth);
  if (!std::isfinite(e.value) || e.error > abs_tol) {
    std::ostringstream os;
    os << "adaptive quadrature on [" << a << ", " << b << "] reached error " << e.error
       << " > tolerance " << abs_tol;
    fail(ErrorCode::quadrature, os.str());
  }
  return e;
}

Estimate half_line(const RealFn& f, double a, double abs_tol) {
  boost::math::quadrature::exp_sinh<double> integrator;
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = integrator.integrate([&](double x) { return f(a + x); }, 1e-12, &err,
                                            &l1, &levels);
  if (!std::isfinite(value) || err > std::max(abs_tol, 1e-12 * l1)) {
    std::ostringstream os;
    os << "half-line quadrature from " << a << " reached error " << err << " > tolerance "
       << abs_tol;
    fail(ErrorCode::quadrature, os.str());
  }
  return {value, err};
}

namespace {

template <unsigned N>
GaussRule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  GaussRule rule;
  // Boost stores the non-negative half; for odd N the first node is 0.
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rule.nodes.push_back(0.0);
      rule.weights.push_back(w[i]);
    } else {
      rule.nodes.push_back(x[i]);
      rule.weights.push_back(w[i]);
      rule.nodes.push_back(-x[i]);
      rule.weights.push_back(w[i]);
    }
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static const GaussRule r10 = make_rule<10>();
  static const GaussRule r20 = make_rule<20>();
  static const GaussRule r30 = make_rule<30>();
  switch (order) {
    case 10: return r10;
    case 20: return r20;
    case 30: return r30;
    default: fail(ErrorCode::invalid_parameter, "Gauss-Legendre order must be 10, 20 or 30");
  }
}

double gauss_panels(const RealFn& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    double s = 0.0;
    for (int k = 0; k < order; ++k) s += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
    total += 0.5 * h * s;
  }
  return total;
}

LineEstimate real_line(const RealFn& f, double window, double kappa, double panel_width,
                       int order) {
  if (!(window > 0.0) || !(kappa > 1.0) || !(panel_width > 0.0))
    fail(ErrorCode::invalid_parameter, "real_line needs window > 0, kappa > 1, panel_width > 0");
  const int panels = std::max(1, static_cast<int>(std::ceil(window / panel_width)));
  // [-X, X] plus the two outer shells [-2X, -X) and (X, 2X].
  const double inner = gauss_panels(f, -window, window, 2 * panels, order);
  const double shell = gauss_panels(f, -2.0 * window, -window, panels, order) +
                       gauss_panels(f, window, 2.0 * window, panels, order);
  const double i1 = inner;
  const double i2 = inner + shell;
  const double factor = std::pow(2.0, kappa - 1.0) - 1.0;
  LineEstimate out;
  out.window = 2.0 * window;
  out.tail_correction = (i2 - i1) / factor;
  out.value = i2 + out.tail_correction;
  out.error = std::abs(i2 - i1);
  return out;
}

}  // namespace carma::quad
