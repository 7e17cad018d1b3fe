#pragma once

#include <map>

#include "operlab/rootsys.hpp"
#include "operlab/types.hpp"

namespace operlab {

// Chevalley-type basis of the simply-laced algebra underlying an AlgebraData,
// with exact integer structure constants coming from a bimultiplicative
// asymmetry function on the root lattice.  Basis order: H_1..H_N, then E_gamma
// for positive roots in the RootSystem order, then E_{-gamma} in the same
// order.  Elements are coefficient vectors of length dim().
struct Chevalley {
  AlgebraData alg;
  int N = 0;  // rank of the simply-laced algebra
  int P = 0;  // number of positive roots

  int dim() const { return N + 2 * P; }
  int idx_H(int i) const { return i; }
  int idx_E(int root_idx, bool negative) const { return N + (negative ? P : 0) + root_idx; }

  Vec basis_H(int i) const;
  Vec basis_E(int root_idx, bool negative) const;

  // +(k+1) / -(k+1) when v is the k-th positive root or its negative, else 0
  std::map<std::vector<int>, int> root_lookup;
  int find_root_signed(const VecI& v) const;

  // asymmetry function on the root lattice, values +-1
  int eps(const VecI& a, const VecI& b) const;

  // bracket of basis elements, returned as (coefficient, basis index) or
  // coefficient 0 when the bracket vanishes; general brackets via ad
  Vec bracket(const Vec& x, const Vec& y) const;
  Mat ad(const Vec& x) const;

  // invariant bilinear form
  cplx form(const Vec& x, const Vec& y) const;
  Mat gram;

  // signed-permutation matrix of the diagram automorphism, and the recursive
  // signs on positive roots that make it an automorphism
  Mat sigma_hat;
  std::vector<int> sign_pos;
  Mat grade_projector(int j) const;  // eigenspace of sigma_hat for omega^j

  // canonical decomposition gamma = alpha_i + gamma' for positive roots of
  // height > 1, so any representation can rebuild root-vector matrices with
  // the same normalization as this basis
  std::vector<std::pair<int, int>> decomp;  // (simple index, index of gamma')

  // folded generators and Cartan elements, as vectors in the big algebra
  Vec e_fold(int i) const;
  Vec f_fold(int i) const;
  Vec h_fold(int i) const;
  Vec f_principal() const;                      // sum of all folded f_i
  Vec cartan_elem(const Vec& coeffs) const;     // sum c_i (folded alpha_i^vee)
  Vec theta_covee_elem() const;

  // highest-weight vector of the twist eigenspace used in the connection,
  // with its dual partner: form(v_theta, v_minus_theta) = 1.  The stored
  // scale makes the distinguished cyclic eigenvalue on the first fundamental
  // representation equal to 1 (applied by normalize_v_theta).
  Vec v_theta, v_minus_theta;
  bool v_theta_normalized = false;

  // root vectors of the fixed-point subalgebra, indexed by positive roots of
  // the folded system (for r = 1 these coincide with basis_E up to identity)
  std::vector<Vec> ring_pos, ring_neg;
};

Chevalley build_chevalley(const AlgebraData& alg);

// rescale (v_theta, v_minus_theta) by (s, 1/s); the scale itself is computed
// in the spectral layer
void rescale_v_theta(Chevalley& ch, cplx s);

}  // namespace operlab
