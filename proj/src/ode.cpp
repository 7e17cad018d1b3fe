#include "operlab/ode.hpp"

#include <cmath>

namespace operlab {

PathSpec PathSpec::ray(double arg, double r_from, double r_to) {
  PathSpec p;
  Segment s;
  s.kind = Segment::Kind::Line;
  s.from = std::polar(r_from, arg);
  s.to = std::polar(r_to, arg);
  s.arg_from = arg;
  p.segments.push_back(s);
  return p;
}

PathSpec PathSpec::arc(double r, double arg_from, double arg_to) {
  PathSpec p;
  Segment s;
  s.kind = Segment::Kind::Arc;
  s.radius = r;
  s.arg_from = arg_from;
  s.arg_to = arg_to;
  p.segments.push_back(s);
  return p;
}

PathSpec PathSpec::line(cplx from, cplx to) {
  PathSpec p;
  Segment s;
  s.kind = Segment::Kind::Line;
  s.from = from;
  s.to = to;
  s.arg_from = std::arg(from);
  p.segments.push_back(s);
  return p;
}

namespace {

cplx seg_end(const PathSpec::Segment& s) {
  return s.kind == PathSpec::Segment::Kind::Line ? s.to : std::polar(s.radius, s.arg_to);
}

double seg_end_arg(const PathSpec::Segment& s) {
  if (s.kind == PathSpec::Segment::Kind::Arc) return s.arg_to;
  // line: unwrap by continuity from the entry argument
  double a = std::arg(s.to);
  while (a - s.arg_from > PI) a -= 2.0 * PI;
  while (a - s.arg_from < -PI) a += 2.0 * PI;
  return a;
}

}  // namespace

PathSpec& PathSpec::then_arc(double arg_to) {
  if (segments.empty()) throw ValidationError("empty path");
  const Segment& prev = segments.back();
  cplx z = seg_end(prev);
  Segment s;
  s.kind = Segment::Kind::Arc;
  s.radius = std::abs(z);
  s.arg_from = seg_end_arg(prev);
  s.arg_to = arg_to;
  segments.push_back(s);
  return *this;
}

PathSpec& PathSpec::then_ray(double r_to) {
  if (segments.empty()) throw ValidationError("empty path");
  const Segment& prev = segments.back();
  cplx z = seg_end(prev);
  double a = seg_end_arg(prev);
  Segment s;
  s.kind = Segment::Kind::Line;
  s.from = z;
  s.to = std::polar(r_to, a);
  s.arg_from = a;
  segments.push_back(s);
  return *this;
}

cplx PathSpec::endpoint() const {
  if (segments.empty()) throw ValidationError("empty path");
  return seg_end(segments.back());
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                 e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                 e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

struct SegGeom {
  const PathSpec::Segment& seg;
  double arg_in;
  cplx z(double s) const {
    if (seg.kind == PathSpec::Segment::Kind::Arc)
      return std::polar(seg.radius, (1.0 - s) * seg.arg_from + s * seg.arg_to);
    return seg.from + s * (seg.to - seg.from);
  }
  cplx dz(double s) const {
    if (seg.kind == PathSpec::Segment::Kind::Arc)
      return (seg.arg_to - seg.arg_from) * I * z(s);
    return seg.to - seg.from;
  }
  double arg(double s) const {
    if (seg.kind == PathSpec::Segment::Kind::Arc)
      return (1.0 - s) * seg.arg_from + s * seg.arg_to;
    // unwrap by continuity from the entry argument along the chord
    double a = std::arg(z(s));
    double ref = arg_in;
    while (a - ref > PI) a -= 2.0 * PI;
    while (a - ref < -PI) a += 2.0 * PI;
    return a;
  }
};

}  // namespace

Mat integrate_path(const OdeRhs& rhs, const PathSpec& path, Mat Y, const Tolerances& tol) {
  for (const auto& seg : path.segments) {
    double s = 0.0, hstep = 1e-3;
    SegGeom g{seg, seg.arg_from};
    auto f = [&](double ss, const Mat& y) {
      return Mat(rhs(g.z(ss), g.arg(ss), y) * g.dz(ss));
    };
    Mat k1 = f(s, Y);
    int rejected_in_row = 0;
    while (s < 1.0) {
      hstep = std::min(hstep, 1.0 - s);
      Mat k2 = f(s + c2 * hstep, Y + hstep * (a21 * k1));
      Mat k3 = f(s + c3 * hstep, Y + hstep * (a31 * k1 + a32 * k2));
      Mat k4 = f(s + c4 * hstep, Y + hstep * (a41 * k1 + a42 * k2 + a43 * k3));
      Mat k5 = f(s + c5 * hstep, Y + hstep * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      Mat k6 = f(s + hstep, Y + hstep * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Mat y5 = Y + hstep * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Mat k7 = f(s + hstep, y5);
      Mat err = hstep * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double scale = tol.ode_abs + tol.ode_rel * std::max(Y.cwiseAbs().maxCoeff(),
                                                          y5.cwiseAbs().maxCoeff());
      double enorm = err.cwiseAbs().maxCoeff() / scale;
      if (enorm <= 1.0) {
        s += hstep;
        Y = y5;
        k1 = k7;  // first-same-as-last
        rejected_in_row = 0;
      } else if (++rejected_in_row > 60) {
        throw NumericError("integrator cannot reach requested accuracy");
      }
      double fac = 0.9 * std::pow(std::max(enorm, 1e-10), -0.2);
      hstep *= std::min(5.0, std::max(0.2, fac));
      if (hstep < 1e-14) throw NumericError("integrator step size underflow");
    }
  }
  return Y;
}

}  // namespace operlab
