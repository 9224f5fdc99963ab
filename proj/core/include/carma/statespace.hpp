#pragma once

#include <vector>

#include "carma/polyalg.hpp"

namespace carma {

/// Companion realization: A is dp x dp with identity blocks on the block
/// superdiagonal and (-A_p, ..., -A_1) in the last block row; beta stacks
/// beta_1..beta_p (dp x d).
struct StateSpacePair {
  int d = 0;
  int p = 0;
  Mat A;
  Mat beta;

  Mat beta_block(int k) const { return beta.middleRows((k - 1) * d, d); }  // k = 1..p
};

/// beta_k = -sum_{i=1}^{k-1} A_i beta_{k-i} + B_{q-p+k}, with B_j = 0 for j < 0.
StateSpacePair build_state_space(const MatrixPolyPair& pq);

/// Exact structural check of the companion layout against pq.
bool has_companion_layout(const StateSpacePair& ss, const MatrixPolyPair& pq);

/// e^{tM} by scaling and squaring with diagonal Pade approximants of degree
/// 3, 5, 7, 9 or 13. Throws overflow when the result is not representable.
Mat expm(const Mat& M, double t = 1.0);

/// Top d x d block of e^{tA} beta.
Mat first_block_exp(const StateSpacePair& ss, double t);

/// Sum over all zeros of det P of Res[e^{tz} P(z)^{-1} Q(z)].
Mat contour_side(const MatrixPolyPair& pq, const SpectrumOfP& spec, double t);

/// max_u || first_block_exp(u) - h(u)/sqrt(2 pi) || over the given u > 0.
/// Requires a causal model (throws inadmissible_model otherwise).
double causal_kernel_identity_check(const MatrixPolyPair& pq, const std::vector<double>& u_grid);

/// Greedy nearest-match pairing of the eigenvalues of A with the zeros of
/// det P (expanded by multiplicity); returns the largest paired distance.
double spectrum_match_distance(const StateSpacePair& ss, const SpectrumOfP& spec);

// Polynomial blocks from the realization argument, exposed for verification.

/// h_{k,p}(z) = sum_{u=0}^{p-k} z^u A_{p-k-u}, A_0 = I.
CMat companion_h(const MatrixPolyPair& pq, int k, cplx z);
/// r_k(z) = -sum_{u=0}^{k} z^u A_{p-u}.
CMat companion_r(const MatrixPolyPair& pq, int k, cplx z);
/// Block (i, j) of (zI - A)^{-1} written through P(z)^{-1}.
CMat resolvent_block(const MatrixPolyPair& pq, int i, int j, cplx z);
/// Full dp x dp matrix assembled from resolvent_block.
CMat resolvent_from_blocks(const MatrixPolyPair& pq, cplx z);
/// sum_j h_{j,p}(z) beta_j, which reproduces Q(z).
CMat q_from_beta(const MatrixPolyPair& pq, const StateSpacePair& ss, cplx z);

}  // namespace carma
