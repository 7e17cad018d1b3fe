#pragma once

#include <functional>

#include "operlab/types.hpp"

namespace operlab {

using VecFun = std::function<Vec(const Vec&)>;

struct NewtonResult {
  Vec x;
  double residual = 0.0;  // final ||F(x)||_inf
  int iterations = 0;
  bool converged = false;
};

// Damped Newton iteration with Armijo backtracking on ||F||^2.  The Jacobian
// is formed by finite differences along the real axis of each complex
// unknown, which is exact in the limit for holomorphic residual maps.
NewtonResult newton_solve(const VecFun& F, Vec x0, const Tolerances& tol,
                          int max_iterations = 60);

// convenience: forward-difference Jacobian of a holomorphic map
Mat numeric_jacobian(const VecFun& F, const Vec& x, const Vec& Fx);

}  // namespace operlab
