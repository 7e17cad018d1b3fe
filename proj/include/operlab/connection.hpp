#pragma once

#include <memory>
#include <string>
#include <vector>

#include "operlab/chevalley.hpp"
#include "operlab/module.hpp"
#include "operlab/ode.hpp"
#include "operlab/types.hpp"

namespace operlab {

// One additional regular singularity of the connection.  X is the residue
// datum in Chevalley coordinates of the big algebra; in extended mode Xm[m]
// holds the grade-m component (m = 0..r-1), and X is their sum.
struct Singularity {
  cplx w = 1.0;
  Vec X;                 // element of the positive nilpotent part
  std::vector<Vec> Xm;   // extended mode only; Xm[m] in the grade-m eigenspace
};

// Meromorphic connection  d/dz + (1/z)(f + ell + (z + z^k lambda) v_theta
//   + sum_j r z^r/(z^r - w_j^r) (-theta_covee + X(j)))
// with the extended variant multiplying Xm[m] by (z/w_j)^m.
struct ConnectionSpec {
  std::shared_ptr<const Chevalley> ch;
  double k = 0.5;
  Vec ell_pairings;      // <ell, alpha_i> over the folded simple roots
  Vec ell_coeffs;        // ell = sum_i ell_coeffs[i] * alpha_i^vee (folded)
  std::vector<Singularity> sites;
  bool extended = false;

  const AlgebraData& alg() const { return ch->alg; }
  void validate() const;
};

ConnectionSpec parse_connection_json(const std::string& json_text,
                                     std::shared_ptr<const Chevalley> ch = nullptr);

// Laurent data of the connection at a singularity w_j, as coefficients of
// d/dx + R/x + a + b x + c x^2 + ... with x = z - w_j.  Each coefficient is
// affine in lambda; *_lin is the lambda-linear part (a multiple of v_theta).
struct LaurentLocal {
  cplx w;
  Vec eta;               // R = -theta_covee + eta
  Vec a_const, a_lin;
  Vec b_const, b_lin;
  Vec c_const, c_lin;
};

// Evaluator of the connection in a fixed module.
class ConnectionEval {
 public:
  ConnectionEval(const ConnectionSpec& spec, const Module& mod);

  // coefficient A(z) of d/dz + A(z), rotated by t: the joint substitution
  // (z, lambda) -> (e^{2 pi i t} z, e^{-2 pi i k t} lambda) applied to the
  // coefficient.  argz fixes the branch of z^k.
  Mat coefficient(cplx z, double argz, cplx lambda, double t = 0.0) const;

  // right-hand side of Psi' = -A(z) Psi for the integrator
  OdeRhs rhs(cplx lambda, double t = 0.0) const;

  const Mat& f_mat() const { return F_; }
  const Mat& ell_mat() const { return L_; }
  const Mat& vtheta_mat() const { return V_; }
  const Module& mod() const { return mod_; }
  const ConnectionSpec& spec() const { return spec_; }

 private:
  const ConnectionSpec& spec_;
  const Module& mod_;
  Mat F_, L_, V_, Th_;
  std::vector<Mat> X_;
};

// Taylor data at z = 0:  z L = z d/dz + f + ell + lambda z^k v_theta
//   + sum_{l>=1} A_l z^l,   returned as A_l for l = 1..max_order
// (A_1 contains v_theta; singular sites contribute through their geometric
// series).  Coefficients are Chevalley-coordinate vectors.
std::vector<Vec> laurent_at_zero(const ConnectionSpec& spec, int max_order);

// Laurent expansion at site j (up to the x^2 term), computed by truncated
// power-series arithmetic; exact up to rounding.
LaurentLocal laurent_at_singularity(const ConnectionSpec& spec, int j);

// deterministic vector of twist grade m with weight alpha (a positive folded
// root, short if m > 0), used as the basis for extended-mode residue data
Vec grade_root_vector(const Chevalley& ch, int folded_pos_idx, int m);

// ell as a folded-coroot element from its simple-root pairings
Vec ell_from_pairings(const AlgebraData& alg, const Vec& pairings);

// diagonal matrix of ell acting in the module
Mat ell_matrix(const AlgebraData& alg, const Module& mod, const Vec& ell_coeffs);

// omega(ell) for the weight of basis state s of the module
cplx weight_of_ell(const AlgebraData& alg, const Module& mod, const Vec& ell_coeffs,
                   int state);

}  // namespace operlab
