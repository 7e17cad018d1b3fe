#pragma once

#include "operlab/connection.hpp"

namespace operlab {

// Power-series solution attached to one monodromy eigenvalue at z = 0, for
// the connection rotated by t:  chi(z;lambda) = z^{-gamma} sum_{m,n}
// c_{m,n} z^{m+kn} lambda^n with c_{0,0} an eigenvector of f + ell.
struct FrobeniusSolution {
  int state = 0;       // module basis state carrying the seed weight
  cplx gamma;          // eigenvalue of f + ell on the seed
  double t = 0.0;      // rotation angle of the connection
  double k = 0.5;
  int M = 0, N = 0;    // truncation orders in m and n
  double rho = 0.0;    // validity radius used for tail gating
  double residual = 0.0;  // max recurrence residual over stored coefficients
  std::vector<std::vector<Vec>> c;  // c[m][n]

  // truncated series value; argz fixes branches of z^{-gamma} and z^k
  Vec eval(cplx z, double argz, cplx lambda) const;
  // crude geometric tail estimate at |z|, |lambda|
  double tail_estimate(double absz, double abslam) const;
};

// All Frobenius solutions of one module (one per basis state), rotated by t.
struct FrobeniusBasis {
  double t = 0.0;
  std::vector<FrobeniusSolution> sols;  // indexed by module basis state
  // frame matrix with columns chi_s(z)
  Mat frame(cplx z, double argz, cplx lambda) const;
};

// genericity of (k, ell): f + ell diagonalizable with distinct-shift spectrum
// so that every recurrence matrix is invertible
struct GenericityReport {
  bool generic = true;
  int node = -1, state1 = -1, state2 = -1, m = 0, n = 0;
  double min_shift = 0.0;  // smallest |gamma'-gamma+m+kn| encountered
};

GenericityReport check_generic(const ConnectionSpec& spec,
                               const std::vector<const Module*>& fund,
                               double tol = 1e-8);

FrobeniusSolution build_frobenius(const ConnectionSpec& spec, const Module& mod,
                                  int state, double t, int M, int N);

FrobeniusBasis build_frobenius_basis(const ConnectionSpec& spec, const Module& mod,
                                     double t, int M, int N);

}  // namespace operlab
