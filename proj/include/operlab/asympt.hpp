#pragma once

#include "operlab/connection.hpp"
#include "operlab/module.hpp"
#include "operlab/ode.hpp"

namespace operlab {

// Everything needed to seed solutions at large |z| for one chosen node: the
// spectrum of the rotated cyclic element, the two-step gauge to the leading
// diagonal model, and the sector geometry of the dominance pattern.
struct AsymptoticData {
  ConnectionSpec spec;
  Module mod;
  int node = 0;       // folded node index
  double kappa = 0.0; // rotation angle attached to the node
  int h = 0;          // principal-gradation period (grade of v_theta plus one)

  Mat Lambda;             // module matrix of f + e^{2 pi i kappa} v_theta
  std::vector<cplx> mu;   // eigenvalues, sorted by decreasing real part
  Mat P, Pinv;            // unit eigenvector columns and inverse, same order
  int sub_index = 0;      // column with strictly maximal real part

  Vec ntilde;             // algebra element solving the constant-term equation
  double delta0 = 0.0, delta = 0.0;  // remainder decay exponents
  double delta_exact = 0.0;          // decay of the resummed-profile residual

  double zeta_star = 0.0;   // (-zeta_star, 0) free of dominance crossings
  double zeta_sub = 0.0;    // dominance half-angle of the top eigenvalue
  std::vector<cplx> bad;    // singular points of the rotated connection
};

AsymptoticData build_asymptotic(const ConnectionSpec& spec, const Module& mod,
                                int node);

// scalar profile multiplying the cyclic element after gauging; `resummed`
// sums the full binomial series of (1 + c lambda z^{k-1})^{1/h}, otherwise
// only the finitely many non-decaying terms are kept
cplx q_factor(const AsymptoticData& d, cplx z, double argz, cplx lambda,
              bool resummed = true);

// primitive of q_factor/z, with the logarithmic branch at resonance
cplx action_S(const AsymptoticData& d, cplx z, double argz, cplx lambda,
              bool resummed = true);

// the two gauge factors (G1, G2) bringing the connection to leading
// diagonal-model form; applied to solutions as G2 * G1 * y
std::pair<Mat, Mat> gauge_chain(const AsymptoticData& d, cplx z, double argz,
                                cplx lambda, bool resummed = true);

// gauged coefficient minus the diagonal model (computed analytically);
// decays like z^{-1-delta}
Mat residual_matrix(const AsymptoticData& d, cplx z, double argz, cplx lambda,
                    bool resummed = true);

// max-norm of residual_matrix relative to the diagonal model
double gauge_residual(const AsymptoticData& d, cplx z, double argz, cplx lambda,
                      bool resummed = true);

// no two distinct eigenvalues exchange dominance anywhere on [a, b]
bool good_interval(const AsymptoticData& d, double a, double b, int grid = 257);

// smallest radius at which the correction terms of q and the gauge residual
// pass the seeding thresholds
double default_seed_radius(const AsymptoticData& d, cplx lambda);

// radial path from r_from to r_to at the given angle, with detour arcs around
// any singular point closer than a quarter of its radius
PathSpec inward_path(const AsymptoticData& d, double arg, double r_from,
                     double r_to);

// basis of solutions seeded from the eigenvalue interval [a, b] (an interval
// of dominance directions), evaluated at the target point; columns follow the
// eigenvalue order of `mu`.  Each column is seeded on the ray where it is
// most recessive, with the first-order diagonal correction integrated out to
// infinity, and carried to the target angle on an arc at the target radius.
Mat sector_frame(const AsymptoticData& d, cplx lambda, double a, double b,
                 cplx z_target, double arg_target, double z_seed = 0.0,
                 const Tolerances& tol = Tolerances::defaults());

// the unique fastest-decaying solution along the positive real axis,
// evaluated at the target point
Vec subdominant_solution(const AsymptoticData& d, cplx lambda, cplx z_target,
                         double arg_target, double z_seed = 0.0,
                         const Tolerances& tol = Tolerances::defaults());

}  // namespace operlab
