#pragma once

#include "operlab/module.hpp"

namespace operlab {

// maximal eigenvalue: real, simple, strictly dominating the real part of all
// others by at least `gap`; the eigenvector is scaled to unit norm with its
// largest component real positive
std::pair<cplx, Vec> maximal_eigen(const Mat& M, double gap);

// matrix of f + e^{2 pi i t} v_theta in the given representation
Mat cyclic_matrix(const Chevalley& ch, const Module& m, double t);

// diagonal operator exp(s <rho^vee, weight>) built from the folded Weyl vector
Mat rho_exp(const AlgebraData& alg, const Module& m, cplx s);

// rescale v_theta so that the distinguished eigenvalue on the first
// fundamental representation equals one
void normalize_v_theta(Chevalley& ch, double gap = 1e-9);

// fundamental representations with their distinguished eigendata, consistent
// along diagram-automorphism orbits
struct SpectralData {
  Chevalley ch;                 // with normalized v_theta
  std::vector<Module> fund;     // per node of the simply-laced diagram
  std::vector<cplx> mu;         // distinguished eigenvalue per node
  std::vector<Vec> psi;         // distinguished eigenvector per node
  std::vector<Mat> twist;       // intertwiner L(omega_i) -> L(omega_{sigma i})

  const Module& fund_folded(int i) const { return fund[ch.alg.orbit_rep[i]]; }
  // automorphism action on L(omega_i) for a fixed node, identity otherwise
  Mat R(int folded_i) const;
};

SpectralData build_spectral(const AlgebraId& id, double gap = 1e-9);

// eigenvector of the rotated cyclic element on the alternating square,
// predicted from the single-representation eigenvector
Vec psi_wedge(const SpectralData& sd, int folded_i, const WedgeSpace& w);
// counterpart on the tensor product over the neighbours of the node
Vec psi_tensor(const SpectralData& sd, int folded_i, const TensorSpace& t,
               const std::vector<int>& target_nodes);

// first angles (rotating the spectrum by e^{i phi}) at which the distinguished
// eigenvalue stops strictly dominating, on either side
std::pair<double, double> dominance_angles(const std::vector<cplx>& eigs, cplx mu);
std::pair<double, double> dominance_angles(const Mat& M, double gap);

}  // namespace operlab
