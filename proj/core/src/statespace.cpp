#include "carma/statespace.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "carma/error.hpp"

namespace carma {

StateSpacePair build_state_space(const MatrixPolyPair& pq) {
  pq.validate();
  const int d = pq.d;
  const int p = pq.p;
  StateSpacePair ss;
  ss.d = d;
  ss.p = p;
  ss.A = Mat::Zero(d * p, d * p);
  for (int k = 0; k + 1 < p; ++k) ss.A.block(k * d, (k + 1) * d, d, d) = Mat::Identity(d, d);
  for (int k = 0; k < p; ++k) ss.A.block((p - 1) * d, k * d, d, d) = -pq.A[p - 1 - k];

  ss.beta = Mat::Zero(d * p, d);
  for (int k = 1; k <= p; ++k) {
    Mat bk = Mat::Zero(d, d);
    const int j = pq.q - p + k;
    if (j >= 0) bk = pq.B[j];
    for (int i = 1; i <= k - 1; ++i) bk -= pq.A[i - 1] * ss.beta.middleRows((k - i - 1) * d, d);
    ss.beta.middleRows((k - 1) * d, d) = bk;
  }
  return ss;
}

bool has_companion_layout(const StateSpacePair& ss, const MatrixPolyPair& pq) {
  const int d = pq.d;
  const int p = pq.p;
  if (ss.A.rows() != d * p || ss.A.cols() != d * p) return false;
  for (int bi = 0; bi < p; ++bi) {
    for (int bj = 0; bj < p; ++bj) {
      const Mat blk = ss.A.block(bi * d, bj * d, d, d);
      Mat expected = Mat::Zero(d, d);
      if (bi == p - 1)
        expected = -pq.A[p - 1 - bj];
      else if (bj == bi + 1)
        expected = Mat::Identity(d, d);
      if (blk != expected) return false;
    }
  }
  return true;
}

namespace {

Mat pade_solve(const Mat& U, const Mat& V) {
  const Mat num = V + U;
  const Mat den = V - U;
  return den.partialPivLu().solve(num);
}

template <std::size_t N>
Mat pade_low(const Mat& X, const std::array<double, N>& b) {
  // Degree m = N - 1 in {3, 5, 7, 9}.
  const int n = static_cast<int>(X.rows());
  const Mat I = Mat::Identity(n, n);
  const Mat X2 = X * X;
  Mat odd = b[1] * I;
  Mat even = b[0] * I;
  Mat power = I;
  for (std::size_t k = 2; k < N; k += 2) {
    power = power * X2;
    even += b[k] * power;
    if (k + 1 < N) odd += b[k + 1] * power;
  }
  return pade_solve(X * odd, even);
}

Mat pade13(const Mat& X) {
  static constexpr std::array<double, 14> b = {
      64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
      129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
      1323241920.0,        40840800.0,          960960.0,           16380.0,
      182.0,               1.0};
  const int n = static_cast<int>(X.rows());
  const Mat I = Mat::Identity(n, n);
  const Mat X2 = X * X;
  const Mat X4 = X2 * X2;
  const Mat X6 = X4 * X2;
  const Mat U = X * (X6 * (b[13] * X6 + b[11] * X4 + b[9] * X2) + b[7] * X6 + b[5] * X4 +
                     b[3] * X2 + b[1] * I);
  const Mat V = X6 * (b[12] * X6 + b[10] * X4 + b[8] * X2) + b[6] * X6 + b[4] * X4 + b[2] * X2 +
                b[0] * I;
  return pade_solve(U, V);
}

}  // namespace

Mat expm(const Mat& M, double t) {
  if (M.rows() != M.cols()) fail(ErrorCode::shape_mismatch, "expm needs a square matrix");
  const Mat X = t * M;
  if (!X.allFinite()) fail(ErrorCode::overflow, "expm argument has non-finite entries");
  const double norm1 = X.cwiseAbs().colwise().sum().maxCoeff();

  // Thresholds for a unit-roundoff backward error bound.
  if (norm1 <= 1.495585217958292e-2) return pade_low<4>(X, {120.0, 60.0, 12.0, 1.0});
  if (norm1 <= 2.539398330063230e-1)
    return pade_low<6>(X, {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0});
  if (norm1 <= 9.504178996162932e-1)
    return pade_low<8>(X, {17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0});
  if (norm1 <= 2.097847961257068)
    return pade_low<10>(X, {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
                            2162160.0, 110880.0, 3960.0, 90.0, 1.0});

  constexpr double theta13 = 5.371920351148152;
  const int s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
  if (s > 1000) fail(ErrorCode::overflow, "expm argument norm too large; rescale t");
  Mat R = pade13(std::ldexp(1.0, -s) * X);
  for (int k = 0; k < s; ++k) R = R * R;
  if (!R.allFinite()) fail(ErrorCode::overflow, "expm result overflows double precision; rescale t");
  return R;
}

Mat first_block_exp(const StateSpacePair& ss, double t) {
  return (expm(ss.A, t) * ss.beta).topRows(ss.d);
}

Mat contour_side(const MatrixPolyPair& pq, const SpectrumOfP& spec, double t) {
  CMat acc = CMat::Zero(pq.d, pq.d);
  for (std::size_t i = 0; i < spec.zeros.size(); ++i) {
    const std::vector<CMat> a = laurent_coefficients(pq, spec, i);
    const cplx e = std::exp(spec.zeros[i].value * t);
    double tk = 1.0;  // t^{k-1} / (k-1)!
    for (std::size_t k = 1; k <= a.size(); ++k) {
      acc += (e * tk) * a[k - 1];
      tk *= t / static_cast<double>(k);
    }
  }
  return acc.real();
}

double causal_kernel_identity_check(const MatrixPolyPair& pq, const std::vector<double>& u_grid) {
  const SpectrumOfP spec = spectrum(pq);
  if (!spec.causal)
    fail(ErrorCode::inadmissible_model, "the causal kernel identity needs all zeros in Re < 0");
  const KernelExpansion ke = kernel_expansion(pq, spec);
  const StateSpacePair ss = build_state_space(pq);
  double worst = 0.0;
  for (double u : u_grid) {
    if (!(u > 0.0)) continue;
    const Mat diff = first_block_exp(ss, u) - kernel_eval(ke, u) / ke.scale;
    worst = std::max(worst, diff.norm());
  }
  return worst;
}

double spectrum_match_distance(const StateSpacePair& ss, const SpectrumOfP& spec) {
  Eigen::EigenSolver<Mat> es(ss.A, false);
  std::vector<cplx> eig(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::vector<cplx> zeros;
  for (const auto& z : spec.zeros)
    for (int k = 0; k < z.multiplicity; ++k) zeros.push_back(z.value);
  if (zeros.size() != eig.size()) return std::numeric_limits<double>::infinity();
  std::vector<bool> used(eig.size(), false);
  double worst = 0.0;
  for (const cplx& z : zeros) {
    std::size_t best = eig.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eig.size(); ++k) {
      if (used[k]) continue;
      const double dist = std::abs(eig[k] - z);
      if (dist < best_dist) {
        best_dist = dist;
        best = k;
      }
    }
    used[best] = true;
    worst = std::max(worst, best_dist);
  }
  return worst;
}

CMat companion_h(const MatrixPolyPair& pq, int k, cplx z) {
  CMat acc = CMat::Zero(pq.d, pq.d);
  cplx zu = 1.0;
  for (int u = 0; u <= pq.p - k; ++u) {
    const int idx = pq.p - k - u;
    if (idx == 0)
      acc += zu * CMat::Identity(pq.d, pq.d);
    else
      acc += zu * pq.A[idx - 1].cast<cplx>();
    zu *= z;
  }
  return acc;
}

CMat companion_r(const MatrixPolyPair& pq, int k, cplx z) {
  CMat acc = CMat::Zero(pq.d, pq.d);
  cplx zu = 1.0;
  for (int u = 0; u <= k; ++u) {
    acc -= zu * pq.A[pq.p - u - 1].cast<cplx>();
    zu *= z;
  }
  return acc;
}

CMat resolvent_block(const MatrixPolyPair& pq, int i, int j, cplx z) {
  CMat inner;
  if (i <= j)
    inner = std::pow(z, i - 1) * companion_h(pq, j, z);
  else
    inner = std::pow(z, i - j - 1) * companion_r(pq, j - 1, z);
  return eval_P(pq, z).partialPivLu().solve(inner);
}

CMat resolvent_from_blocks(const MatrixPolyPair& pq, cplx z) {
  const int d = pq.d;
  CMat out(d * pq.p, d * pq.p);
  for (int i = 1; i <= pq.p; ++i)
    for (int j = 1; j <= pq.p; ++j)
      out.block((i - 1) * d, (j - 1) * d, d, d) = resolvent_block(pq, i, j, z);
  return out;
}

CMat q_from_beta(const MatrixPolyPair& pq, const StateSpacePair& ss, cplx z) {
  CMat acc = CMat::Zero(pq.d, pq.d);
  for (int j = 1; j <= pq.p; ++j) acc += companion_h(pq, j, z) * ss.beta_block(j).cast<cplx>();
  return acc;
}

}  // namespace carma
