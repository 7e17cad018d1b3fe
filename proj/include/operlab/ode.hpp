#pragma once

#include <functional>
#include <vector>

#include "operlab/types.hpp"

namespace operlab {

// Piecewise path in the punctured z-plane.  Segments are straight lines or
// circular arcs about the origin; the accumulated winding is tracked exactly
// so that multivalued coefficients (z^k with k non-integer) stay on the
// correct branch.
struct PathSpec {
  struct Segment {
    enum class Kind { Line, Arc } kind = Kind::Line;
    cplx from = 0.0, to = 0.0;   // endpoints (Line)
    double radius = 0.0;         // |z| (Arc)
    double arg_from = 0.0, arg_to = 0.0;  // unwrapped angles (Arc; arg_from also
                                          // carries the entry angle of a Line)
  };
  std::vector<Segment> segments;

  // continuous-argument endpoints: log z = log|z| + i arg with arg unwrapped
  static PathSpec ray(double arg, double r_from, double r_to);
  static PathSpec arc(double r, double arg_from, double arg_to);
  static PathSpec line(cplx from, cplx to);
  PathSpec& then_arc(double arg_to);      // arc at current radius
  PathSpec& then_ray(double r_to);        // ray at current angle
  cplx endpoint() const;
};

// right-hand side of Y' = F(logz, Y) parameterized by the unwrapped position:
// the solver passes z together with its continuous argument
using OdeRhs = std::function<Mat(cplx z, double argz, const Mat& Y)>;

// adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) along a path;
// integrates matrix solutions column by column in one sweep
Mat integrate_path(const OdeRhs& rhs, const PathSpec& path, Mat Y0, const Tolerances& tol);

}  // namespace operlab
