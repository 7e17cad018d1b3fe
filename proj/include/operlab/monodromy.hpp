#pragma once

#include "operlab/asympt.hpp"
#include "operlab/frobenius.hpp"

namespace operlab {

// Connection data of one module at a fixed lambda: Q expands the
// distinguished asymptotic solutions in the power-series basis at the origin,
//   FrobeniusFrame(z_mid) * Q = AsymptoticFrame(z_mid),
// and T compares the distinguished frames of two consecutive sectors,
//   Frame_1(z_t) * T = Frame_2(z_t).
struct ConnectionMatrices {
  int node = 1;
  cplx lambda = 0.0;
  Mat Q;                    // (series state) x (asymptotic column)
  Mat T;                    // (asymptotic column) x (asymptotic column)
  double z_mid = 0.0;       // matching radius for Q
  double phi_overlap = 0.0; // matching angle for T (arg z)
  double cond = 0.0;        // condition number of the frame that was inverted
  double match_residual = 0.0;  // relative matching residual
};

// widest dominance-ordered eigenvalue interval just below arg z = 0
std::pair<double, double> sector_interval_below_zero(const AsymptoticData& d);

// solve frame * X = target with per-column scaling of both sides; reports the
// relative residual and the condition number of the scaled frame
Mat frame_change(const Mat& frame, const Mat& target, double& cond,
                 double& resid);

// Frame of exact solutions adapted to the eigenvalue interval [a, b]: the
// column for each eigenvalue is the fastest-decaying solution evaluated at
// jointly rotated arguments (z e^{2 pi i m}, e^{-2 pi i k m} lambda), with m
// chosen so that its guaranteed asymptotic range contains the matching angle
// and covers as much of the sector [a, pi + b] as possible, rescaled to the
// stored eigenvector normalization.
Mat lateral_frame(const AsymptoticData& d, cplx lambda, double a, double b,
                  double z_target, double arg_target,
                  const Tolerances& tol = Tolerances::defaults());

// Q part.  z_mid = 0 picks a radius automatically (inside the convergence
// disc of the series, reachable by inward integration).  series_M/series_N
// cap the automatic truncation-order search.
ConnectionMatrices central_connection(const ConnectionSpec& spec, const Module& mod,
                                      int node, cplx lambda, double z_mid = 0.0,
                                      const Tolerances& tol = Tolerances::defaults(),
                                      int series_M = 160, int series_N = 28);

// same, reusing precomputed lambda-independent data (asymptotic seed and the
// power-series basis); the series truncation is taken as given
ConnectionMatrices central_connection(const AsymptoticData& d,
                                      const FrobeniusBasis& fb, cplx lambda,
                                      double z_mid = 0.0,
                                      const Tolerances& tol = Tolerances::defaults());

// T part, matched on the overlap of the sector and its clockwise neighbour.
ConnectionMatrices stokes_matrix(const ConnectionSpec& spec, const Module& mod,
                                 int node, cplx lambda,
                                 const Tolerances& tol = Tolerances::defaults());

// entries of T forced to vanish by the dominance ordering at angle phi
// (arg z on the overlap): mask(a,b) = 1 when column b cannot contain an
// admixture of column a.  The diagonal is 0.
MatI stokes_forbidden_mask(const AsymptoticData& d, double phi);

// fundamental-matrix transport around spec.sites[site], counterclockwise,
// composed of n_steps chords; identity when the local monodromy is trivial
Mat monodromy_loop(const ConnectionSpec& spec, const Module& mod, int site,
                   cplx lambda, int n_steps = 64,
                   const Tolerances& tol = Tolerances::defaults());

// closed polygonal loop of n_steps chords around center, entered at
// center + radius (exposed for transport checks around the origin's images)
PathSpec polygon_loop(cplx center, double radius, int n_steps);

}  // namespace operlab
