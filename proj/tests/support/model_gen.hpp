#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "carma/polyalg.hpp"

namespace carma::testing {

struct RandomModelOptions {
  double min_abs_real = 0.3;   // keeps kernels decaying fast enough for the oracle window
  double min_separation = 0.25;  // keeps Laurent circles well conditioned
  double max_modulus = 4.0;
  bool causal_only = false;
};

/// Random admissible model with d in {1,2}, p in {1,2,3}, q < p, drawn by
/// rejection from uniform coefficients.
inline MatrixPolyPair random_model(std::mt19937_64& rng, const RandomModelOptions& opts = {}) {
  std::uniform_int_distribution<int> dd(1, 2), pp(1, 3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    const int d = dd(rng), p = pp(rng);
    const int q = std::uniform_int_distribution<int>(0, p - 1)(rng);
    std::vector<Mat> A, B;
    for (int i = 0; i < p; ++i) {
      Mat a(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) a(r, c) = u(rng) * (i + 1);
      A.push_back(a);
    }
    for (int j = 0; j <= q; ++j) {
      Mat b(d, d);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) b(r, c) = u(rng);
      B.push_back(b);
    }
    MatrixPolyPair pq = MatrixPolyPair::make(A, B);
    const SpectrumOfP spec = cluster_roots(det_poly(pq));
    if (spec.total_multiplicity() != d * p) continue;
    bool ok = true;
    for (std::size_t i = 0; i < spec.zeros.size() && ok; ++i) {
      const cplx l = spec.zeros[i].value;
      if (spec.zeros[i].multiplicity != 1) ok = false;
      if (std::abs(l.real()) < opts.min_abs_real || std::abs(l) > opts.max_modulus) ok = false;
      if (opts.causal_only && l.real() >= 0.0) ok = false;
      for (std::size_t j = 0; j < i; ++j)
        if (std::abs(l - spec.zeros[j].value) < opts.min_separation) ok = false;
    }
    if (ok) return pq;
  }
}

/// Scalar model with a double zero at -1: P = (z+1)^2 (z+2), Q = z + 3.
inline MatrixPolyPair double_zero_model() { return MatrixPolyPair::scalar({4.0, 5.0, 2.0}, {1.0, 3.0}); }

}  // namespace carma::testing
