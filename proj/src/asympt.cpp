#include "operlab/asympt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "operlab/spectrum.hpp"

namespace operlab {

namespace {

cplx pow_branch(cplx z, double argz, cplx e) {
  return std::exp(e * (std::log(std::abs(z)) + I * argz));
}

double wrap_pi(double x) {
  x = std::fmod(x + PI, 2 * PI);
  if (x < 0) x += 2 * PI;
  return x - PI;
}

// l-th MacLaurin coefficient of (1+w)^{1/h}, computed incrementally
struct BinomCoeffs {
  int h;
  mutable std::vector<double> c{1.0};
  double operator()(int l) const {
    while (int(c.size()) <= l) {
      int m = int(c.size());
      c.push_back(c.back() * (1.0 / h - (m - 1)) / m);
    }
    return c[l];
  }
};

Mat exp_nilpotent(const Mat& N) {
  const int d = int(N.rows());
  Mat out = Mat::Identity(d, d), term = Mat::Identity(d, d);
  for (int k = 1; k <= d; ++k) {
    term = term * N / double(k);
    if (term.cwiseAbs().maxCoeff() < 1e-300) break;
    out += term;
  }
  return out;
}

}  // namespace

AsymptoticData build_asymptotic(const ConnectionSpec& spec, const Module& mod,
                                int node) {
  AsymptoticData d;
  d.spec = spec;
  d.mod = mod;
  d.node = node;
  const Chevalley& ch = *spec.ch;
  const AlgebraData& alg = ch.alg;
  d.kappa = alg.kappa_folded(node);

  // grade of v_theta under the folded Weyl covector, plus one
  Vec rho = alg.rho_covee_coeffs();
  Vec br = ch.ad(ch.cartan_elem(rho)) * ch.v_theta;
  int s = 0;
  for (int q = 1; q < ch.dim(); ++q)
    if (std::abs(ch.v_theta(q)) > std::abs(ch.v_theta(s))) s = q;
  d.h = int(std::lround((br(s) / ch.v_theta(s)).real())) + 1;

  d.Lambda = cyclic_matrix(ch, mod, d.kappa);
  Eigen::ComplexEigenSolver<Mat> es(d.Lambda);
  if (es.info() != Eigen::Success)
    throw NumericError("cyclic-element eigen decomposition failed");
  const int n = mod.dim;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    cplx ea = es.eigenvalues()(a), eb = es.eigenvalues()(b);
    if (std::abs(ea.real() - eb.real()) > 1e-12) return ea.real() > eb.real();
    return ea.imag() > eb.imag();
  });
  d.mu.resize(n);
  d.P.resize(n, n);
  for (int c = 0; c < n; ++c) {
    d.mu[c] = es.eigenvalues()(order[c]);
    Vec v = es.eigenvectors().col(order[c]);
    int top = 0;
    for (int q = 1; q < n; ++q)
      if (std::abs(v(q)) > std::abs(v(top))) top = q;
    v *= std::abs(v(top)) / v(top);
    d.P.col(c) = v / v.norm();
  }
  d.Pinv = d.P.inverse();
  d.sub_index = 0;

  // constant term left after the diagonalizing gauge; removed by bracketing
  // an upper-triangular element against f
  Vec target = ch.cartan_elem(spec.ell_coeffs) +
               (1.0 / d.h) * ch.cartan_elem(rho) -
               cplx(double(spec.sites.size()) * alg.id.r) * ch.theta_covee_elem();
  const int nr = alg.n;
  Mat cols(ch.dim(), nr);
  for (int i = 0; i < nr; ++i)
    cols.col(i) = ch.bracket(ch.e_fold(i), ch.f_principal());
  Vec x = cols.colPivHouseholderQr().solve(Vec(-target));
  if ((cols * x + target).norm() > 1e-9 * std::max(1.0, target.norm()))
    throw NumericError("constant gauge residual is not a bracket with f");
  d.ntilde = Vec::Zero(ch.dim());
  for (int i = 0; i < nr; ++i) d.ntilde += x(i) * ch.e_fold(i);

  double ik = 1.0 / ((1.0 - spec.k) * d.h);
  d.delta0 = (1.0 - spec.k) * (std::floor(ik) + 1.0 - ik);
  d.delta = std::min(1.0 / d.h, d.delta0);
  d.delta_exact = std::min(1.0 / d.h, 1.0 - spec.k);

  // dominance geometry
  auto [plus, minus] = dominance_angles(d.mu, d.mu[d.sub_index]);
  d.zeta_sub = std::min(plus, minus);
  double zs = PI;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      cplx diff = d.mu[a] - d.mu[b];
      if (std::abs(diff) < 1e-10) continue;
      double phi = wrap_pi(PI / 2 - std::arg(diff));  // crossing direction
      while (phi > -1e-9) phi -= PI;
      zs = std::min(zs, -phi);
    }
  d.zeta_star = zs;

  for (const auto& site : spec.sites)
    for (int l = 0; l < alg.id.r; ++l)
      d.bad.push_back(std::exp(-2.0 * PI * I * d.kappa) *
                      std::exp(2.0 * PI * I * double(l) / double(alg.id.r)) *
                      site.w);
  return d;
}

namespace {

// shared series evaluation: sum_{l>=1} c_l x^l weight(l), with x the decaying
// combination c lambda z^{k-1}
cplx correction_sum(const AsymptoticData& d, cplx z, double argz, cplx lambda,
                    bool resummed, const std::function<cplx(int)>& weight) {
  BinomCoeffs c{d.h};
  const double k = d.spec.k;
  const int L = int(std::floor(1.0 / ((1.0 - k) * d.h)));
  cplx x = std::exp(-2.0 * PI * I * d.kappa) * lambda *
           pow_branch(z, argz, k - 1.0);
  if (resummed && std::abs(x) > 0.97)
    throw NumericError("scalar profile series out of its convergence disc");
  cplx acc = 0.0, xp = 1.0;
  const int lmax = resummed ? 800 : L;
  for (int l = 1; l <= lmax; ++l) {
    xp *= x;
    cplx term = c(l) * xp * weight(l);
    acc += term;
    if (resummed && l > L && std::abs(term) < 1e-18) break;
  }
  return acc;
}

}  // namespace

cplx q_factor(const AsymptoticData& d, cplx z, double argz, cplx lambda,
              bool resummed) {
  cplx corr =
      correction_sum(d, z, argz, lambda, resummed, [](int) { return cplx(1.0); });
  return pow_branch(z, argz, 1.0 / d.h) * (1.0 + corr);
}

cplx action_S(const AsymptoticData& d, cplx z, double argz, cplx lambda,
              bool resummed) {
  const double k = d.spec.k;
  const double ik = 1.0 / ((1.0 - k) * d.h);
  const bool resonant = std::abs(ik - std::round(ik)) < 1e-12;
  const int m = resonant ? int(std::lround(ik)) : -1;
  cplx corr = correction_sum(d, z, argz, lambda, resummed, [&](int l) {
    if (l == m) return cplx(0.0);
    return cplx(1.0 / (1.0 - d.h * l * (1.0 - k)));
  });
  cplx out = double(d.h) * pow_branch(z, argz, 1.0 / d.h) * (1.0 + corr);
  if (m >= 1) {
    BinomCoeffs c{d.h};
    out += c(m) * std::exp(-2.0 * PI * I * double(m) * d.kappa) *
           std::pow(lambda, m) * (std::log(std::abs(z)) + I * argz);
  }
  return out;
}

namespace {

// log of q_factor on the branch following argz
cplx log_q(const AsymptoticData& d, cplx z, double argz, cplx lambda,
           bool resummed) {
  cplx q = q_factor(d, z, argz, lambda, resummed);
  return (std::log(std::abs(z)) + I * argz) / double(d.h) +
         std::log(q / pow_branch(z, argz, 1.0 / d.h));
}

// logarithmic derivative q'/q
cplx dlog_q(const AsymptoticData& d, cplx z, double argz, cplx lambda,
            bool resummed) {
  const double k = d.spec.k;
  cplx num = correction_sum(d, z, argz, lambda, resummed,
                            [&](int l) { return cplx(double(l) * (k - 1.0)); });
  cplx den = 1.0 + correction_sum(d, z, argz, lambda, resummed,
                                  [](int) { return cplx(1.0); });
  return (1.0 / double(d.h) + num / den) / z;
}

}  // namespace

std::pair<Mat, Mat> gauge_chain(const AsymptoticData& d, cplx z, double argz,
                                cplx lambda, bool resummed) {
  cplx lq = log_q(d, z, argz, lambda, resummed);
  Mat G1 = rho_exp(d.spec.ch->alg, d.mod, -lq);
  Mat G2 = exp_nilpotent(std::exp(-lq) * d.mod.act(*d.spec.ch, d.ntilde));
  return {G1, G2};
}

Mat residual_matrix(const AsymptoticData& d, cplx z, double argz, cplx lambda,
                    bool resummed) {
  ConnectionEval ev(d.spec, d.mod);
  auto [G1, G2] = gauge_chain(d, z, argz, lambda, resummed);
  Mat G = G2 * G1;
  Mat A = ev.coefficient(z, argz, lambda, d.kappa);
  // G' G^{-1} assembled analytically: G1 is diagonal in q^{-rho}, G2 the
  // exponential of a scalar multiple of a fixed nilpotent matrix
  cplx dlq = dlog_q(d, z, argz, lambda, resummed);
  Mat Rho = rho_exp(d.spec.ch->alg, d.mod, 1.0);  // exp(<rho, weight>)
  Mat rho_diag = Mat::Zero(d.mod.dim, d.mod.dim);
  for (int i = 0; i < d.mod.dim; ++i) rho_diag(i, i) = std::log(Rho(i, i).real());
  cplx q = q_factor(d, z, argz, lambda, resummed);
  Mat N = d.mod.act(*d.spec.ch, d.ntilde);
  Mat dGG = (-dlq / q) * N + G2 * (-dlq * rho_diag) * G2.inverse();
  Mat gauged = G * A * G.inverse() - dGG;
  return gauged - (q / z) * d.Lambda;
}

double gauge_residual(const AsymptoticData& d, cplx z, double argz, cplx lambda,
                      bool resummed) {
  Mat R = residual_matrix(d, z, argz, lambda, resummed);
  double model = (q_factor(d, z, argz, lambda, resummed) / z * d.Lambda)
                     .cwiseAbs()
                     .maxCoeff();
  return R.cwiseAbs().maxCoeff() / model;
}

bool good_interval(const AsymptoticData& d, double a, double b, int grid) {
  const int n = int(d.mu.size());
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q) {
      cplx diff = d.mu[p] - d.mu[q];
      if (std::abs(diff) < 1e-10) continue;
      double prev = 0.0;
      for (int g = 0; g < grid; ++g) {
        double phi = a + (b - a) * g / (grid - 1);
        double v = (diff * std::exp(I * phi)).real();
        if (std::abs(v) < 1e-9 * std::abs(diff)) return false;
        if (g > 0 && v * prev < 0) return false;
        prev = v;
      }
    }
  return true;
}

double default_seed_radius(const AsymptoticData& d, cplx lambda) {
  const double k = d.spec.k;
  double base = 30.0;
  for (const auto& s : d.spec.sites) base = std::max(base, 5.0 * std::abs(s.w));
  for (double r = base; r < 1e7; r *= 1.5) {
    double corr = std::abs(lambda) * std::pow(r, k - 1.0) / d.h;
    if (corr >= 0.05) continue;
    if (gauge_residual(d, r, 0.0, lambda) < 1e-3) return r;
  }
  throw NumericError("no admissible seed radius found");
}

PathSpec inward_path(const AsymptoticData& d, double arg, double r_from,
                     double r_to) {
  struct Obstacle {
    double radius, dangle;
  };
  std::vector<Obstacle> obs;
  for (cplx p : d.bad) {
    double rp = std::abs(p);
    if (rp < 0.95 * r_to || rp > 1.05 * r_from) continue;
    double da = wrap_pi(std::arg(p) - wrap_pi(arg));
    if (rp * std::abs(std::sin(da)) < 0.25 * rp && std::cos(da) > 0)
      obs.push_back({rp, da});
  }
  std::sort(obs.begin(), obs.end(),
            [](const Obstacle& a, const Obstacle& b) { return a.radius > b.radius; });
  if (obs.empty()) return PathSpec::ray(arg, r_from, r_to);
  PathSpec path = PathSpec::ray(arg, r_from, r_from);  // replaced below
  bool first = true;
  double r_cur = r_from;
  auto ray_to = [&](double r) {
    if (std::abs(r - r_cur) < 1e-14 * r_cur) return;
    if (first) {
      path = PathSpec::ray(arg, r_cur, r);
      first = false;
    } else {
      path.then_ray(r);
    }
    r_cur = r;
  };
  for (const auto& o : obs) {
    double sgn = o.dangle >= 0 ? -1.0 : 1.0;  // rotate away from the obstacle
    double detour = arg + sgn * 0.6;
    double r_low = std::max(0.7 * o.radius, r_to);
    ray_to(std::min(r_cur, 1.4 * o.radius));
    if (first) {
      path = PathSpec::arc(r_cur, arg, detour);
      first = false;
    } else {
      path.then_arc(detour);
    }
    path.then_ray(r_low);
    path.then_arc(arg);
    r_cur = r_low;
    if (r_cur <= r_to * (1.0 + 1e-14)) break;
  }
  ray_to(r_to);
  return path;
}

namespace {

// angle (continuous, in the z-plane) maximizing how strongly column j
// recedes below every other eigenvalue, searched over [lo, hi]
double best_recessive_angle(const AsymptoticData& d, int j, double lo,
                            double hi) {
  const int grid = 720;
  double best = lo, best_val = -1e300;
  for (int g = 0; g <= grid; ++g) {
    double phi = lo + (hi - lo) * g / grid;
    double val = 1e300;
    for (size_t i = 0; i < d.mu.size(); ++i) {
      if (std::abs(d.mu[i] - d.mu[j]) < 1e-12) continue;
      val = std::min(val,
                     ((d.mu[j] - d.mu[i]) * std::exp(I * phi / double(d.h))).real());
    }
    if (val > best_val) {
      best_val = val;
      best = phi;
    }
  }
  return best;
}

// first-order diagonal correction: integral of the (j,j) entry of the gauged
// perturbation in the eigenbasis, along the ray from z_seed e^{i phi} to
// infinity
cplx levinson_integral(const AsymptoticData& d, int j, double phi,
                       double z_seed, cplx lambda) {
  auto f = [&](double y) {
    cplx s = std::polar(z_seed * std::exp(y), wrap_pi(phi));
    Mat R = residual_matrix(d, s, phi, lambda, true);
    return (d.Pinv.row(j) * R * d.P.col(j))(0, 0) * s;  // r_jj(s) ds/dy, ds/dy = s
  };
  // cut the domain where the integrand reaches the cancellation floor of the
  // residual assembly (it decays in exact arithmetic, so growth marks noise)
  double Y = 40.0 / std::max(0.05, d.delta_exact);
  {
    double f0 = std::max(std::abs(f(0.0)), 1e-8), prev = f0;
    for (double y = 2.0; y <= Y; y += 2.0) {
      double cur = std::abs(f(y));
      if (cur < 1e-12 * f0 || (y > 6.0 && cur > 1.5 * prev)) {
        Y = y;
        break;
      }
      prev = cur;
    }
  }
  int n = 64;
  auto composite = [&](int panels) {
    double hstep = Y / panels;
    cplx acc = f(0.0) + f(Y);
    for (int p = 1; p < panels; ++p) acc += (p % 2 ? 4.0 : 2.0) * f(p * hstep);
    return acc * hstep / 3.0;
  };
  cplx prev = composite(n);
  for (int it = 0; it < 5; ++it) {
    n *= 2;
    cplx cur = composite(n);
    if (std::abs(cur - prev) < 1e-12 * std::max(1.0, std::abs(cur)))
      return cur;
    prev = cur;
  }
  return prev;
}

// integrate one column from its seeding ray to the target, in the
// exponent-normalized variable v = y * exp(+mu S)
Vec carried_column(const AsymptoticData& d, int j, cplx lambda, double phi_seed,
                   cplx z_target, double arg_target, double z_seed,
                   const Tolerances& tol) {
  ConnectionEval ev(d.spec, d.mod);
  auto base = ev.rhs(lambda, d.kappa);
  cplx mu = d.mu[j];
  OdeRhs rhs = [&, mu](cplx z, double argz, const Mat& Y) {
    return Mat(base(z, argz, Y) + mu * (q_factor(d, z, argz, lambda, true) / z) * Y);
  };
  cplx zs = std::polar(z_seed, wrap_pi(phi_seed));
  auto [G1, G2] = gauge_chain(d, zs, phi_seed, lambda, true);
  cplx corr = levinson_integral(d, j, phi_seed, z_seed, lambda);
  Mat v0 = (G2 * G1).inverse() * d.P.col(j) * std::exp(corr);

  const double rt = std::abs(z_target);
  auto check_arc = [&] {
    // swing to the target angle at the target radius, checking clearance
    for (cplx p : d.bad) {
      double lo = std::min(phi_seed, arg_target), hi = std::max(phi_seed, arg_target);
      double ap = std::arg(p);
      bool in_span = false;
      for (double sh = ap - 8 * PI; sh <= hi + PI; sh += 2 * PI)
        if (sh >= lo - 0.2 && sh <= hi + 0.2) in_span = true;
      if (in_span && std::abs(std::abs(p) - rt) < 0.25 * std::abs(p))
        throw NumericError("target arc passes too close to a singular point");
    }
  };
  const bool want_arc = std::abs(arg_target - phi_seed) > 1e-12;

  // the normalized variable is only usable where the corrector profile
  // converges; hand over to the original variable before entering its disc
  const double k = d.spec.k;
  double z_sw = rt;
  if (std::abs(lambda) * std::pow(rt, k - 1.0) > 0.8)
    z_sw = std::min(z_seed,
                    std::pow(std::abs(lambda) / 0.8, 1.0 / (1.0 - k)));
  if (z_sw > rt * (1.0 + 1e-9)) {
    Mat v = integrate_path(rhs, inward_path(d, phi_seed, z_seed, z_sw), v0, tol);
    v.col(0) *= std::exp(
        -mu * action_S(d, std::polar(z_sw, wrap_pi(phi_seed)), phi_seed,
                       lambda, true));
    OdeRhs plain = [&](cplx z, double argz, const Mat& Y) {
      return base(z, argz, Y);
    };
    PathSpec tail = inward_path(d, phi_seed, z_sw, rt);
    if (want_arc) {
      check_arc();
      tail.then_arc(arg_target);
    }
    v = integrate_path(plain, tail, v, tol);
    return Vec(v.col(0));
  }

  PathSpec path = inward_path(d, phi_seed, z_seed, rt);
  if (want_arc) {
    check_arc();
    path.then_arc(arg_target);
  }
  Mat v = integrate_path(rhs, path, v0, tol);
  return Vec(v.col(0) * std::exp(-mu * action_S(d, z_target, arg_target, lambda, true)));
}

}  // namespace

Mat sector_frame(const AsymptoticData& d, cplx lambda, double a, double b,
                 cplx z_target, double arg_target, double z_seed,
                 const Tolerances& tol) {
  if (!good_interval(d, a, b))
    throw ValidationError("eigenvalue interval admits a dominance crossing");
  const double lo = a * d.h, hi = d.h * (PI + b);
  if (arg_target < lo - 1e-12 || arg_target > hi + 1e-12)
    throw ValidationError("target angle outside the frame sector");
  if (z_seed <= 0.0) z_seed = default_seed_radius(d, lambda);
  const double margin = 0.02 * (hi - lo);
  Mat F(d.mod.dim, d.mod.dim);
  for (int j = 0; j < d.mod.dim; ++j) {
    double phi = best_recessive_angle(d, j, lo + margin, hi - margin);
    F.col(j) = carried_column(d, j, lambda, phi, z_target, arg_target, z_seed, tol);
  }
  return F;
}

Vec subdominant_solution(const AsymptoticData& d, cplx lambda, cplx z_target,
                         double arg_target, double z_seed,
                         const Tolerances& tol) {
  // allow continuation up to one extra turn past the asymptotic sector; the
  // value is still that of the same exact solution
  if (std::abs(arg_target) > d.h * (PI + d.zeta_sub) + 2.0 * PI + 1e-12)
    throw ValidationError("target angle outside the enlarged sector");
  if (z_seed <= 0.0) z_seed = default_seed_radius(d, lambda);
  double phi = best_recessive_angle(d, d.sub_index, -0.45 * d.h * d.zeta_sub,
                                    0.45 * d.h * d.zeta_sub);
  return carried_column(d, d.sub_index, lambda, phi, z_target, arg_target,
                        z_seed, tol);
}

}  // namespace operlab
