#ifndef OPERLAB_TYPES_HPP
#define OPERLAB_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <Eigen/Dense>

namespace operlab {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using MatI = Eigen::MatrixXi;
using VecI = Eigen::VectorXi;

inline constexpr double PI = 3.14159265358979323846;
inline const cplx I{0.0, 1.0};

// Global tolerance policy. One instance is threaded through all numeric
// kernels so that runs are reproducible and tolerances auditable.
struct Tolerances {
  double ode_rel = 1e-10;      // relative tolerance of the adaptive integrator
  double ode_abs = 1e-13;      // absolute floor of the adaptive integrator
  double eigen_gap = 1e-9;     // simplicity / dominance gap for eigenvalues
  double newton_tol = 1e-10;   // ||F|| target of the damped Newton solver
  double pivot = 1e-12;        // linear-solve pivot / rank threshold

  static Tolerances defaults() { return {}; }
  static Tolerances strict() {
    Tolerances t;
    t.ode_rel = 1e-12;
    t.ode_abs = 1e-15;
    t.newton_tol = 1e-12;
    return t;
  }
};

// Error taxonomy: every failure mode named by the operation contracts.
struct OperlabError : std::runtime_error {
  explicit OperlabError(const std::string& what) : std::runtime_error(what) {}
};
struct ValidationError : OperlabError {
  using OperlabError::OperlabError;
};
struct NumericError : OperlabError {
  using OperlabError::OperlabError;
};
struct CapExceeded : OperlabError {
  using OperlabError::OperlabError;
};

}  // namespace operlab

#endif
