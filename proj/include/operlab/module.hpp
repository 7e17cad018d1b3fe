#pragma once

#include "operlab/chevalley.hpp"

namespace operlab {

// Irreducible highest-weight representation of the simply-laced algebra,
// built generator by generator.  Basis vectors are produced depth-first from
// the highest-weight vector (index 0); each non-top basis vector remembers
// the lowering step that defined it.
struct Module {
  VecI hw;                       // highest weight, Dynkin labels
  int N = 0;                     // rank of the acting algebra
  int dim = 0;
  std::vector<VecI> weights;     // weight of each basis vector
  std::vector<std::pair<int, int>> defining;  // (j, u): basis vector = F_j u
  std::vector<Mat> E, F;         // generator actions
  Mat H(int i) const;            // diagonal weight action
  Mat gramc;                     // contravariant bilinear form, <v0,v0> = 1

  // matrix of the root-basis element E_{±gamma}, following the canonical
  // bracket decompositions of the Chevalley layer
  Mat root_vector(const Chevalley& ch, int root_idx, bool negative) const;
  // matrix of a general algebra element given by Chevalley coordinates
  Mat act(const Chevalley& ch, const Vec& x) const;

  // diagonal operator with entries <c, weight> for folded coroot coefficients c
  Mat cartan_diag(const AlgebraData& alg, const Vec& folded_coeffs) const;
};

inline constexpr int kModuleDimCap = 4000;

Module build_module(const Chevalley& ch, const VecI& hw, int dim_cap = kModuleDimCap);

// intertwiner L(hw) -> L(sigma hw) twisting the action by the diagram
// automorphism: T v0 = v0 and T F_j = F_{sigma(j)} T
Mat twist_intertwiner(const Chevalley& ch, const Module& source, const Module& target);

// alternating square of a module, with index bookkeeping
struct WedgeSpace {
  const Module* base = nullptr;
  int dim = 0;
  std::vector<std::pair<int, int>> pairs;  // p < q
  Vec wedge(const Vec& a, const Vec& b) const;
  Mat lift(const Mat& X) const;  // X^I + I^X restricted to alternating part
  Mat gramc;                     // induced contravariant form
};
WedgeSpace build_wedge(const Module& m);

// ordered tensor product of modules of the same algebra
struct TensorSpace {
  std::vector<const Module*> factors;
  int dim = 0;
  Mat lift(int slot, const Mat& X) const;        // act on one slot
  Mat lift_all(const std::vector<Mat>& Xs) const;  // sum over slots
  Vec pure(const std::vector<Vec>& vs) const;
  Mat gramc;
};
TensorSpace build_tensor(const std::vector<const Module*>& factors);

// canonical surjection from the alternating square of L(omega_i) onto the
// tensor product of the neighbour representations, normalized on the top
// vectors; the complement of the image's preimage is annihilated
struct FusionMap {
  int node = 0;                   // tilde node i
  std::vector<int> target_nodes;  // tilde nodes with multiplicity, in order
  Mat matrix;                     // from wedge coordinates to tensor coordinates
};
FusionMap build_fusion(const Chevalley& ch, int node_tilde, const Module& mod_i,
                       const WedgeSpace& wedge_i, const TensorSpace& target,
                       const std::vector<const Module*>& target_mods);

// target factor list for the fusion map at a tilde node: every neighbour j
// repeated -C_{ij} times, in increasing node order
std::vector<int> fusion_target_nodes(const AlgebraData& alg, int node_tilde);

}  // namespace operlab
