#ifndef OPERLAB_ROOTSYS_HPP
#define OPERLAB_ROOTSYS_HPP

#include <string>
#include <vector>

#include "operlab/types.hpp"

namespace operlab {

// Identifier of one supported algebra: an untwisted simply-laced series with a
// diagram automorphism of order r ("A1", "A5^2", "D3^2", "D4^3", ...).
struct AlgebraId {
  char series = 'A';   // 'A', 'D' or 'E'
  int rank_tilde = 1;  // rank of the simply-laced algebra
  int r = 1;           // order of the diagram automorphism (1, 2 or 3)

  bool operator==(const AlgebraId&) const = default;
};

AlgebraId parse_algebra_id(const std::string& s);
std::string to_string(const AlgebraId& id);

// Finite root system generated from a Cartan matrix C_{ij} = <alpha_i^vee, alpha_j>.
struct RootSystem {
  MatI cartan;               // n x n
  VecI sym;                  // minimal positive integers d_i with d_i C_{ij} = d_j C_{ji}
  std::vector<VecI> pos;     // positive roots (coefficients over simple roots), height-lex order
  std::vector<int> heights;  // height per positive root

  int rank() const { return static_cast<int>(cartan.rows()); }
  int npos() const { return static_cast<int>(pos.size()); }
  // index of a positive root in `pos`, or -1
  int index_of(const VecI& root) const;
  // <alpha_i^vee, beta>
  int pairing(int i, const VecI& beta) const;
  // (beta, gamma) with the symmetrizer normalized so short roots have length^2 = 2
  int inner(const VecI& beta, const VecI& gamma) const;
  // coroot of a root, expressed over the simple coroot basis
  VecI coroot(const VecI& root) const;
  bool is_short(int idx) const;
  // exponents (increasing, with multiplicity), from the height histogram
  std::vector<int> exponents() const;
};

RootSystem build_root_system(const MatI& cartan);

// Cartan matrix and diagram automorphism of the simply-laced series.
MatI simply_laced_cartan(char series, int n);
// 0-based node permutation of order r (identity for r = 1)
std::vector<int> diagram_automorphism(const AlgebraId& id);

// All discrete data of one folded algebra.
struct AlgebraData {
  AlgebraId id;
  int n = 0;  // rank of the folded algebra = number of orbits

  RootSystem rs_tilde;           // root system of the simply-laced algebra
  std::vector<int> sigma;        // node permutation (0-based)
  std::vector<int> orbit_rep;    // folded index -> representative node
  std::vector<int> orbit_size;   // <i>
  std::vector<int> fold_index;   // node -> folded index

  MatI cartan_folded;            // n x n
  RootSystem rs_folded;          // folded (fixed-point) root system
  MatI cartan_affine;            // (n+1) x (n+1), index 0 first
  VecI kac, kac_dual;            // labels a_i, a_i^vee, size n+1
  int h = 0, h_dual = 0;         // Coxeter and dual Coxeter numbers
  std::vector<int> exponents;    // of the folded algebra, increasing

  std::vector<int> p_tilde;      // bipartition value p(i) per node (p(0-based first node)=0)
  std::vector<double> kappa;     // per node of the simply-laced diagram

  VecI theta;                    // highest (short, if r>1) root of the folded system
  VecI theta_covee;              // theta^vee over the folded simple coroots
  std::vector<int> theta_grade;          // <theta^vee, alpha> per positive folded root
  std::vector<int> delta_u;              // folded positive-root indices with grade >= 1
  std::vector<int> delta_u_short;        // the short ones among those
  int dim_u = 0;                         // |delta_u| (+1 for r > 1)
  std::vector<int> spec_theta_covee;     // distinct ad-eigenvalues on the simply-laced algebra

  double D(int i) const { return double(orbit_size[i]) / double(id.r); }
  double kappa_folded(int i) const { return kappa[orbit_rep[i]]; }
  // <theta^vee, beta> for a root beta of the simply-laced system
  int theta_pairing_tilde(const VecI& beta_tilde) const;
  // pairing of a folded-coroot combination with a simply-laced weight (Dynkin labels)
  // ell = sum_i c_i alpha_i^vee acting on weight mu: sum_i c_i sum_l mu(alpha^vee_{sigma^l(rep_i)})
  cplx pair_folded_coroots(const Vec& c, const VecI& dynkin_tilde) const;
  // solve for coefficients c with <sum c_i alpha_i^vee, alpha_j> = values_j
  Vec coroot_coeffs_from_pairings(const Vec& values) const;
  Vec rho_covee_coeffs() const;  // <rho^vee, alpha_j> = 1 for all folded j
};

AlgebraData build_algebra(const AlgebraId& id);

// reflection s_i on a simply-laced weight given by Dynkin labels; for folded
// indices the product of reflections over the orbit (orbit nodes are pairwise
// non-adjacent for every supported automorphism).
VecI weyl_reflect_tilde(const AlgebraData& alg, int node_tilde, const VecI& dynkin);
VecI weyl_reflect_folded(const AlgebraData& alg, int folded_index, const VecI& dynkin);
VecI weyl_apply(const AlgebraData& alg, const std::vector<int>& word_folded, const VecI& dynkin);

// Dynkin labels of the fundamental weight of a simply-laced node
VecI fundamental_weight_tilde(const AlgebraData& alg, int node_tilde);

}  // namespace operlab

#endif
