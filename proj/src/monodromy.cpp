#include "operlab/monodromy.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "operlab/spectrum.hpp"

namespace operlab {

namespace {

double wrap_to(double a, double ref) {
  while (a - ref > PI) a -= 2.0 * PI;
  while (a - ref < -PI) a += 2.0 * PI;
  return a;
}

}  // namespace

// pick the widest of a few candidate dominance-ordered intervals just below 0
std::pair<double, double> sector_interval_below_zero(const AsymptoticData& d) {
  const double zs = d.zeta_star;
  for (double shrink : {0.05, 0.15, 0.30}) {
    double a = -zs * (1.0 - shrink), b = -zs * shrink * 0.4;
    if (good_interval(d, a, b)) return {a, b};
  }
  throw NumericError("no dominance-ordered interval found below arg z = 0");
}

// solve frame * X = target with per-column scaling of both sides; returns X
// and reports the relative residual and the frame condition number
Mat frame_change(const Mat& frame, const Mat& target, double& cond, double& resid) {
  Vec fscale(frame.cols());
  Mat fnorm = frame;
  for (int j = 0; j < frame.cols(); ++j) {
    fscale(j) = std::max(frame.col(j).cwiseAbs().maxCoeff(), 1e-300);
    fnorm.col(j) /= fscale(j);
  }
  Eigen::JacobiSVD<Mat> svd(fnorm, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  cond = sv(0) / std::max(sv(sv.size() - 1), 1e-300);
  Mat x(frame.cols(), target.cols());
  resid = 0.0;
  for (int j = 0; j < target.cols(); ++j) {
    double s = std::max(target.col(j).cwiseAbs().maxCoeff(), 1e-300);
    Vec xj = svd.solve(Vec(target.col(j) / s));
    resid = std::max(resid,
                     (fnorm * xj - target.col(j) / s).cwiseAbs().maxCoeff());
    x.col(j) = (xj.array() / fscale.array()).matrix() * s;
  }
  return x;
}

// Frame of exact solutions adapted to the eigenvalue interval [a, b]: the
// column for each eigenvalue is the basic fastest-decaying solution evaluated
// at jointly rotated arguments (z e^{2 pi i m}, e^{-2 pi i k m} lambda), with
// m chosen so that its guaranteed asymptotic range covers as much of the
// sector [a, pi + b] as possible, rescaled to the stored eigenvector
// normalization.  Requires the spectrum to be a single e^{2 pi i / h} orbit.
Mat lateral_frame(const AsymptoticData& d, cplx lambda, double a, double b,
                  double z_target, double arg_target, const Tolerances& tol) {
  const int n = static_cast<int>(d.mu.size());
  const cplx mu0 = d.mu[d.sub_index];
  const double half = PI + d.zeta_sub;
  Mat frame(n, n);
  const double u_t = arg_target / d.h;
  for (int j = 0; j < n; ++j) {
    int best_m = 0;
    double best_cover = -1.0;
    bool found = false;
    for (int m = -2 * d.h; m <= 2 * d.h; ++m) {
      if (std::abs(std::exp(2.0 * PI * I * double(m) / double(d.h)) * mu0 -
                   d.mu[j]) > 1e-8 * std::abs(mu0))
        continue;
      found = true;
      double lo = -half - 2.0 * PI * m / d.h, hi = half - 2.0 * PI * m / d.h;
      // evaluating far outside the guaranteed range needs a long-arc
      // continuation that amplifies roundoff; require the matching angle
      // inside the range
      if (u_t < lo + 1e-9 || u_t > hi - 1e-9) continue;
      double cover = std::min(hi, PI + b) - std::max(lo, a);
      if (cover > best_cover + 1e-12 ||
          (cover > best_cover - 1e-12 && std::abs(m) < std::abs(best_m))) {
        best_cover = cover;
        best_m = m;
      }
    }
    if (!found)
      throw NumericError("eigenvalue spectrum is not a single rotation orbit");
    if (best_cover < 0.0)
      throw NumericError("no rotation of the subdominant solution reaches the matching angle");
    const int m = best_m;
    cplx lam_m = std::exp(-2.0 * PI * I * d.spec.k * double(m)) * lambda;
    Vec col = subdominant_solution(d, lam_m, z_target,
                                   arg_target + 2.0 * PI * m, 0.0, tol);
    // leading vector of the rotated solution vs the stored eigenvector
    Vec v = rho_exp(d.spec.alg(), d.mod, 2.0 * PI * I * double(m) / double(d.h)) *
            d.P.col(d.sub_index);
    int imax = 0;
    d.P.col(j).cwiseAbs().maxCoeff(&imax);
    cplx c = v(imax) / d.P(imax, j);
    if ((v - c * d.P.col(j)).cwiseAbs().maxCoeff() > 1e-8 * std::abs(c))
      throw NumericError("rotated eigenvector is not parallel to the stored one");
    frame.col(j) = col / c;
  }
  return frame;
}

ConnectionMatrices central_connection(const ConnectionSpec& spec, const Module& mod,
                                      int node, cplx lambda, double z_mid,
                                      const Tolerances& tol, int series_M,
                                      int series_N) {
  AsymptoticData d = build_asymptotic(spec, mod, node);

  double z_probe = z_mid;
  if (z_probe <= 0.0) {
    double rho = 1e30;
    for (cplx p : d.bad) rho = std::min(rho, std::abs(p));
    z_probe = d.bad.empty() ? 2.0 : std::min(2.0, 0.45 * rho);
  }

  // grow the series truncation until the tail at the matching radius is
  // negligible against the matching tolerance
  int M = 40, N = 16;
  FrobeniusBasis fb;
  for (;;) {
    fb = build_frobenius_basis(spec, mod, d.kappa, M, N);
    double tail = 0.0;
    for (const auto& s : fb.sols)
      tail = std::max(tail, s.tail_estimate(z_probe, std::abs(lambda)));
    if (tail < 1e-11 || (M >= series_M && N >= series_N)) break;
    M = std::min(series_M, M + M / 2);
    N = std::min(series_N, N + N / 2);
  }

  ConnectionMatrices out = central_connection(d, fb, lambda, z_mid, tol);
  out.node = node;
  return out;
}

ConnectionMatrices central_connection(const AsymptoticData& d,
                                      const FrobeniusBasis& fb, cplx lambda,
                                      double z_mid, const Tolerances& tol) {
  if (z_mid <= 0.0) {
    double rho = 1e30;
    for (cplx p : d.bad) rho = std::min(rho, std::abs(p));
    z_mid = d.bad.empty() ? 2.0 : std::min(2.0, 0.45 * rho);
  }

  auto [a, b] = sector_interval_below_zero(d);
  Mat frob = fb.frame(z_mid, 0.0, lambda);
  Mat asy = lateral_frame(d, lambda, a, b, z_mid, 0.0, tol);

  ConnectionMatrices out;
  out.node = d.node;
  out.lambda = lambda;
  out.z_mid = z_mid;
  out.Q = frame_change(frob, asy, out.cond, out.match_residual);
  return out;
}

ConnectionMatrices stokes_matrix(const ConnectionSpec& spec, const Module& mod,
                                 int node, cplx lambda, const Tolerances& tol) {
  AsymptoticData d = build_asymptotic(spec, mod, node);
  auto [a, b] = sector_interval_below_zero(d);
  if (!good_interval(d, a - PI, b - PI))
    throw NumericError("shifted sector interval is not dominance-ordered");

  // overlap of the two z-sectors is [h a, h b]; match at its midpoint
  const double phi = 0.5 * d.h * (a + b);
  // match where the columns are still of comparable size: just outside the
  // disc where the resummed profile converges, clear of any singular radius
  double rt = std::max(1.7, 1.4 * std::pow(std::abs(lambda) + 1e-9,
                                           1.0 / (1.0 - spec.k)));
  for (bool moved = true; moved;) {
    moved = false;
    for (cplx p : d.bad)
      if (std::abs(rt - std::abs(p)) < 0.3 * std::abs(p)) {
        rt = 1.35 * std::abs(p);
        moved = true;
      }
  }

  Mat fpsi = lateral_frame(d, lambda, a, b, rt, phi, tol);
  Mat fxi = lateral_frame(d, lambda, a - PI, b - PI, rt, phi, tol);

  ConnectionMatrices out;
  out.node = node;
  out.lambda = lambda;
  out.phi_overlap = phi;
  out.T = frame_change(fxi, fpsi, out.cond, out.match_residual);
  return out;
}

MatI stokes_forbidden_mask(const AsymptoticData& d, double phi) {
  const int n = static_cast<int>(d.mu.size());
  const cplx dir = std::exp(I * (phi / d.h));
  MatI mask = MatI::Zero(n, n);
  double scale = 0.0;
  for (cplx m : d.mu) scale = std::max(scale, std::abs(m));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && std::real((d.mu[a] - d.mu[b]) * dir) < -1e-9 * scale)
        mask(a, b) = 1;
  return mask;
}

PathSpec polygon_loop(cplx center, double radius, int n_steps) {
  PathSpec p;
  double arg = std::arg(center + radius);
  for (int m = 0; m < n_steps; ++m) {
    PathSpec::Segment s;
    s.kind = PathSpec::Segment::Kind::Line;
    s.from = center + radius * std::exp(I * (2.0 * PI * m / n_steps));
    s.to = center + radius * std::exp(I * (2.0 * PI * (m + 1) / n_steps));
    s.arg_from = arg = wrap_to(std::arg(s.from), arg);
    p.segments.push_back(s);
  }
  return p;
}

Mat monodromy_loop(const ConnectionSpec& spec, const Module& mod, int site,
                   cplx lambda, int n_steps, const Tolerances& tol) {
  if (site < 0 || site >= static_cast<int>(spec.sites.size()))
    throw ValidationError("monodromy_loop: site index out of range");
  const int r = spec.alg().id.r;
  const cplx w = spec.sites[site].w;

  double clearance = std::abs(w);  // distance to the origin
  for (int j = 0; j < static_cast<int>(spec.sites.size()); ++j)
    for (int l = 0; l < r; ++l) {
      if (j == site && l == 0) continue;
      cplx other = spec.sites[j].w * std::exp(I * (2.0 * PI * l / r));
      clearance = std::min(clearance, std::abs(w - other));
    }
  const double radius = 0.4 * clearance;

  ConnectionEval ev(spec, mod);
  Mat y = integrate_path(ev.rhs(lambda, 0.0), polygon_loop(w, radius, n_steps),
                         Mat::Identity(mod.dim, mod.dim), tol);

  // Liouville consistency: det of the transport equals the exponential of
  // -2 pi i times the trace of the residue at the site
  Vec res = -spec.ch->theta_covee_elem();
  res += spec.sites[site].X;
  cplx det_expect = std::exp(-2.0 * PI * I * mod.act(*spec.ch, res).trace());
  if (std::abs(y.determinant() - det_expect) >
      1e-6 * std::max(1.0, std::abs(det_expect)))
    throw NumericError("monodromy transport determinant inconsistent with the residue trace");
  return y;
}

}  // namespace operlab
