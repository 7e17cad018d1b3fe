#include "operlab/newton.hpp"

#include <cmath>

namespace operlab {

Mat numeric_jacobian(const VecFun& F, const Vec& x, const Vec& Fx) {
  const auto n = x.size();
  const auto m = Fx.size();
  Mat J(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double h = 1e-7 * std::max(1.0, std::abs(x(j)));
    Vec xp = x;
    xp(j) += h;
    J.col(j) = (F(xp) - Fx) / h;
  }
  return J;
}

NewtonResult newton_solve(const VecFun& F, Vec x0, const Tolerances& tol,
                          int max_iterations) {
  NewtonResult res;
  res.x = std::move(x0);
  Vec Fx = F(res.x);
  double fn2 = Fx.squaredNorm();
  for (int it = 0; it < max_iterations; ++it) {
    res.iterations = it;
    res.residual = Fx.cwiseAbs().maxCoeff();
    if (res.residual < tol.newton_tol) {
      res.converged = true;
      return res;
    }
    Mat J = numeric_jacobian(F, res.x, Fx);
    Vec dx = J.colPivHouseholderQr().solve(-Fx);
    if (!dx.allFinite()) break;
    // Armijo backtracking on the squared residual norm
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 30; ++bt) {
      Vec xt = res.x + lambda * dx;
      Vec Ft = F(xt);
      double ft2 = Ft.squaredNorm();
      if (ft2 <= (1.0 - 1e-4 * lambda) * fn2) {
        res.x = std::move(xt);
        Fx = std::move(Ft);
        fn2 = ft2;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;  // stagnated
  }
  res.residual = Fx.cwiseAbs().maxCoeff();
  res.converged = res.residual < tol.newton_tol;
  return res;
}

}  // namespace operlab
