#include "operlab/qq.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "operlab/spectrum.hpp"

namespace operlab {

namespace {

// simply-laced Dynkin labels as an integer vector difference helper
VecI sub_labels(const VecI& a, const VecI& b) {
  VecI out = a;
  for (int i = 0; i < out.size(); ++i) out(i) -= b(i);
  return out;
}

// unique module basis state carrying the given weight
int state_of_weight(const Module& mod, const VecI& labels) {
  int found = -1;
  for (int s = 0; s < mod.dim; ++s)
    if (mod.weights[s] == labels) {
      if (found >= 0)
        throw ValidationError("weight label appears with multiplicity > 1");
      found = s;
    }
  if (found < 0) throw ValidationError("weight label absent from the module");
  return found;
}

// series solution evaluated after the joint rotation by t
Vec chi_rotated(const QFunctionTable& table, int node, int state, double t,
                double z_ref, cplx lambda) {
  const auto& sol = table.nodes[node].fb.sols[state];
  cplx z = z_ref * std::exp(2.0 * PI * I * t);
  return sol.eval(z, 2.0 * PI * t, std::exp(-2.0 * PI * I * table.k() * t) * lambda);
}

// per-target rotation indices (B_ij - 1 - 2l) / denom, in the order produced
// by fusion_target_nodes (each tilde node's copies are consecutive)
std::vector<double> target_rotations(const std::vector<int>& targets,
                                     double denom) {
  std::vector<double> ts;
  for (size_t p = 0; p < targets.size();) {
    size_t q = p;
    while (q < targets.size() && targets[q] == targets[p]) ++q;
    const int B = static_cast<int>(q - p);
    for (int l = 0; l < B; ++l) ts.push_back(double(B - 1 - 2 * l) / denom);
    p = q;
  }
  return ts;
}

std::pair<long long, long long> lambda_key(cplx lambda) {
  return {std::llround(std::real(lambda) * 1e12),
          std::llround(std::imag(lambda) * 1e12)};
}

cplx least_squares_scalar(const Vec& rhs, const Vec& lhs) {
  cplx den = rhs.squaredNorm();
  if (std::abs(den) == 0.0)
    throw NumericError("normalization reference vector vanishes");
  return (rhs.adjoint() * lhs)(0) / den;
}

// both sides of the wedge-to-tensor identity at node i, without the
// per-node normalization constants
std::pair<Vec, Vec> psi_pair(const ConnectionSpec& spec, int node,
                             const std::vector<Module>& mods,
                             const std::vector<AsymptoticData>& asy, double az,
                             double argz, cplx lambda, const Tolerances& tol) {
  const AlgebraData& alg = spec.alg();
  WedgeSpace ws = build_wedge(mods[node]);
  std::vector<int> targets = fusion_target_nodes(alg, node);
  std::vector<const Module*> tmods;
  for (int j : targets) tmods.push_back(&mods[j]);
  TensorSpace ts = build_tensor(tmods);
  FusionMap fm = build_fusion(*spec.ch, node, mods[node], ws, ts, tmods);

  auto rotated = [&](int j, double t) {
    return subdominant_solution(asy[j],
                                std::exp(-2.0 * PI * I * spec.k * t) * lambda,
                                az, argz + 2.0 * PI * t, 0.0, tol);
  };
  Vec lhs = fm.matrix * ws.wedge(rotated(node, -0.5), rotated(node, 0.5));

  std::vector<double> rot = target_rotations(targets, 1.0);
  std::vector<Vec> factors;
  for (size_t p = 0; p < targets.size(); ++p)
    factors.push_back(rotated(targets[p], rot[p]));
  return {lhs, ts.pure(factors)};
}

}  // namespace

std::vector<cplx> solution_normalizers(const ConnectionSpec& spec,
                                       const std::vector<Module>& mods,
                                       const std::vector<AsymptoticData>& asy,
                                       const Tolerances& tol) {
  const AlgebraData& alg = spec.alg();
  if (alg.id.r != 1)
    throw ValidationError(
        "solution-level wedge identity implemented for untwisted algebras only");

  double far = 0.0;
  for (const auto& d : asy)
    for (cplx p : d.bad) far = std::max(far, std::abs(p));
  const double z_cal = std::max(8.0, 2.5 * far + 2.0);
  const cplx lam_cal(0.21, 0.08);

  Vec logg(alg.n);
  for (int i = 0; i < alg.n; ++i) {
    auto [lhs, rhs] = psi_pair(spec, i, mods, asy, z_cal, 0.0, lam_cal, tol);
    cplx g = least_squares_scalar(rhs, lhs);
    if ((lhs - g * rhs).norm() > 1e-4 * std::max(lhs.norm(), 1e-300))
      throw NumericError("one-point ratio of the wedge identity is not scalar");
    logg(i) = std::log(g);
  }
  Mat C = alg.cartan_folded.cast<double>().cast<cplx>();
  Vec x = C.partialPivLu().solve(Vec(-logg));
  std::vector<cplx> out(alg.n);
  for (int i = 0; i < alg.n; ++i) out[i] = std::exp(x(i));
  return out;
}

cplx QFunctionTable::qpow(double p) const {
  return std::exp(I * PI * spec.k * p);
}

std::pair<cplx, cplx> q_values(QFunctionTable& table, int node, cplx lambda,
                               const Tolerances& tol) {
  auto& nd = table.nodes[node];
  auto key = lambda_key(lambda);
  auto it = nd.cache.find(key);
  if (it == nd.cache.end()) {
    if (std::abs(lambda) > table.lambda_cap * (1.0 + 1e-12))
      throw CapExceeded("spectral parameter exceeds the table cap");
    ConnectionMatrices cc =
        central_connection(nd.asy, nd.fb, lambda, table.z_mid, tol);
    cplx raw = cc.Q(nd.state, nd.asy.sub_index);
    cplx raw_low = cc.Q(nd.state_low, nd.asy.sub_index);
    it = nd.cache.emplace(key, std::make_pair(raw, raw_low)).first;
  }
  return {nd.psi_scale * it->second.first,
          nd.psi_scale * nd.scale_low * it->second.second};
}

cplx qq_residual(QFunctionTable& table, int s, cplx lambda,
                 const Tolerances& tol) {
  const AlgebraData& alg = table.spec.alg();
  const double r = alg.id.r;
  cplx prod = 1.0;
  for (int j = 0; j < alg.n; ++j) {
    const int B = (j == s ? 0 : -alg.cartan_folded(s, j));
    for (int l = 0; l < B; ++l) {
      cplx lam = table.qpow(double(B - 1 - 2 * l) / r) * lambda;
      prod *= q_values(table, j, lam, tol).first;
    }
  }
  const double Ds = alg.D(s);
  const cplx ph = std::exp(I * PI * Ds * table.nodes[s].root_pair);
  auto [qp, qlp] = q_values(table, s, table.qpow(Ds) * lambda, tol);
  auto [qm, qlm] = q_values(table, s, table.qpow(-Ds) * lambda, tol);
  return prod - (ph * qp * qlm - qlp * qm / ph);
}

double qq_relative_residual(QFunctionTable& table, int s, cplx lambda,
                            const Tolerances& tol) {
  const AlgebraData& alg = table.spec.alg();
  const double r = alg.id.r;
  cplx prod = 1.0;
  for (int j = 0; j < alg.n; ++j) {
    const int B = (j == s ? 0 : -alg.cartan_folded(s, j));
    for (int l = 0; l < B; ++l)
      prod *= q_values(table, j, table.qpow(double(B - 1 - 2 * l) / r) * lambda,
                       tol)
                  .first;
  }
  const double Ds = alg.D(s);
  const cplx ph = std::exp(I * PI * Ds * table.nodes[s].root_pair);
  auto [qp, qlp] = q_values(table, s, table.qpow(Ds) * lambda, tol);
  auto [qm, qlm] = q_values(table, s, table.qpow(-Ds) * lambda, tol);
  const cplx quad = ph * qp * qlm - qlp * qm / ph;
  double scale = std::max({std::abs(prod), std::abs(ph * qp * qlm),
                           std::abs(qlp * qm / ph)});
  return std::abs(prod - quad) / std::max(scale, 1e-300);
}

cplx bethe_residual(QFunctionTable& table, cplx lambda_star, int s,
                    const Tolerances& tol) {
  const AlgebraData& alg = table.spec.alg();
  const double r = alg.id.r;
  const double Ds = alg.D(s);
  // product side of the quantum-Wronskian relation, shifted by q^{±Ds}
  cplx num = 1.0, den = 1.0;
  for (int j = 0; j < alg.n; ++j) {
    const int B = (j == s) ? 0 : -static_cast<int>(alg.cartan_folded(s, j));
    for (int l = 0; l < B; ++l) {
      const double p = (B - 1 - 2 * l) / r;
      num *= q_values(table, j, table.qpow(p + Ds) * lambda_star, tol).first;
      den *= q_values(table, j, table.qpow(p - Ds) * lambda_star, tol).first;
    }
  }
  // the two shifted relations at a zero of Q^{(s)}, divided
  cplx lhs = std::exp(2.0 * I * PI * Ds * table.nodes[s].root_pair) *
             q_values(table, s, table.qpow(2.0 * Ds) * lambda_star, tol).first *
             den;
  cplx rhs = q_values(table, s, table.qpow(-2.0 * Ds) * lambda_star, tol).first *
             num;
  if (std::abs(rhs) < 1e-12 * std::max(1.0, std::abs(lhs)))
    throw NumericError("denominator of the zero-locus product vanishes");
  return lhs / rhs + 1.0;
}

QFunctionTable build_q_table(const ConnectionSpec& spec,
                             const std::vector<int>& weyl_word,
                             const Tolerances& tol, double lambda_cap,
                             cplx lambda_ref) {
  spec.validate();
  const AlgebraData& alg = spec.alg();

  QFunctionTable table;
  table.spec = spec;
  table.weyl_word = weyl_word;
  table.nodes.resize(alg.n);

  // modules, asymptotic seeds and the shared matching radius
  double z_mid = 2.0;
  for (int i = 0; i < alg.n; ++i) {
    auto& nd = table.nodes[i];
    const int rep = alg.orbit_rep[i];
    VecI hw = fundamental_weight_tilde(alg, rep);
    nd.mod = build_module(*spec.ch, hw);
    nd.asy = build_asymptotic(spec, nd.mod, i);
    for (cplx p : nd.asy.bad)
      z_mid = std::min(z_mid, 0.45 * std::abs(p));

    VecI root(alg.id.rank_tilde);
    for (int c = 0; c < root.size(); ++c) root(c) = alg.rs_tilde.cartan(rep, c);
    VecI top = weyl_apply(alg, weyl_word, hw);
    VecI low = weyl_apply(alg, weyl_word, sub_labels(hw, root));
    nd.state = state_of_weight(nd.mod, top);
    nd.state_low = state_of_weight(nd.mod, low);
    nd.theta = alg.pair_folded_coroots(spec.ell_coeffs, top);
    nd.root_pair =
        nd.theta - alg.pair_folded_coroots(spec.ell_coeffs, low);
  }
  table.z_mid = z_mid;

  // series bases, truncated for the largest matching radius the lambda cap
  // can demand (see q_values)
  const double z_tail = std::max(
      z_mid, std::pow(lambda_cap / 0.85, 1.0 / (1.0 - spec.k)));
  for (auto& nd : table.nodes) {
    int M = 40, N = 16;
    for (;;) {
      nd.fb = build_frobenius_basis(spec, nd.mod, nd.asy.kappa, M, N);
      double tail = 0.0;
      for (const auto& s : nd.fb.sols)
        tail = std::max(tail, s.tail_estimate(z_tail, lambda_cap));
      if (tail < 1e-11 || (M >= 160 && N >= 40)) break;
      M = std::min(160, M + M / 2);
      N = std::min(40, N + N / 2);
    }
  }

  if (alg.id.r == 1) {
    // per-node constants of the decaying solutions, from the wedge identity
    {
      std::vector<Module> mods;
      std::vector<AsymptoticData> asy;
      for (const auto& nd : table.nodes) {
        mods.push_back(nd.mod);
        asy.push_back(nd.asy);
      }
      std::vector<cplx> c = solution_normalizers(spec, mods, asy, tol);
      for (int i = 0; i < alg.n; ++i) table.nodes[i].psi_scale = c[i];
    }

    // fix the lowered-state normalization from the quadratic identity between
    // series solutions at a small reference point, where the series dominate
    const double z_ref = 0.5 * z_mid;
    for (int i = 0; i < alg.n; ++i) {
      auto& nd = table.nodes[i];
      WedgeSpace ws = build_wedge(nd.mod);
      std::vector<int> targets = fusion_target_nodes(alg, i);
      std::vector<const Module*> tmods;
      for (int j : targets) tmods.push_back(&table.nodes[j].mod);
      TensorSpace ts = build_tensor(tmods);
      FusionMap fm = build_fusion(*spec.ch, i, nd.mod, ws, ts, tmods);

      std::vector<double> rot = target_rotations(targets, 2.0);
      std::vector<Vec> factors;
      for (size_t p = 0; p < targets.size(); ++p)
        factors.push_back(chi_rotated(table, targets[p],
                                      table.nodes[targets[p]].state, rot[p],
                                      z_ref, lambda_ref));
      Vec rhs_raw = ts.pure(factors);

      Vec va = chi_rotated(table, i, nd.state, -0.5, z_ref, lambda_ref);
      Vec vb = chi_rotated(table, i, nd.state_low, 0.5, z_ref, lambda_ref);
      Vec lhs1 = fm.matrix * ws.wedge(va, vb);
      Vec va2 = chi_rotated(table, i, nd.state_low, -0.5, z_ref, lambda_ref);
      Vec vb2 = chi_rotated(table, i, nd.state, 0.5, z_ref, lambda_ref);
      Vec lhs2 = fm.matrix * ws.wedge(va2, vb2);

      const cplx ph = std::exp(I * PI * nd.root_pair);
      Vec rhs1 = ph * rhs_raw;
      Vec rhs2 = -rhs_raw / ph;
      cplx c1 = least_squares_scalar(rhs1, lhs1);
      cplx c2 = least_squares_scalar(rhs2, lhs2);
      double fit1 = (lhs1 - c1 * rhs1).norm() / std::max(lhs1.norm(), 1e-300);
      double fit2 = (lhs2 - c2 * rhs2).norm() / std::max(lhs2.norm(), 1e-300);
      nd.scale_low = c1;
      nd.fit_residual = std::max(
          {fit1, fit2, std::abs(c2 - c1) / std::max(std::abs(c1), 1e-300)});
    }
  } else {
    // no series-side quadratic machinery for the twisted algebras: impose the
    // functional equation itself at the reference point
    for (int s = 0; s < alg.n; ++s) {
      auto& nd = table.nodes[s];
      nd.scale_low = 1.0;
      cplx prod = 1.0;
      for (int j = 0; j < alg.n; ++j) {
        const int B = (j == s ? 0 : -alg.cartan_folded(s, j));
        for (int l = 0; l < B; ++l)
          prod *= q_values(table, j,
                           table.qpow(double(B - 1 - 2 * l) / alg.id.r) *
                               lambda_ref,
                           tol)
                      .first;
      }
      const double Ds = alg.D(s);
      const cplx ph = std::exp(I * PI * Ds * nd.root_pair);
      auto [qp, qlp] = q_values(table, s, table.qpow(Ds) * lambda_ref, tol);
      auto [qm, qlm] = q_values(table, s, table.qpow(-Ds) * lambda_ref, tol);
      cplx quad_raw = ph * qp * qlm - qlp * qm / ph;
      if (std::abs(quad_raw) < 1e-300)
        throw NumericError("degenerate normalization reference point");
      nd.scale_low = prod / quad_raw;
      nd.fit_residual = 0.0;
    }
  }
  return table;
}

namespace {

// unwrapped phase increment of Q along one boundary edge, refined where the
// phase jumps too fast between samples
double edge_phase(QFunctionTable& table, int node, cplx a, cplx b,
                  const Tolerances& tol, double& absmax, int depth = 0) {
  cplx qa = q_values(table, node, a, tol).first;
  cplx qb = q_values(table, node, b, tol).first;
  absmax = std::max({absmax, std::abs(qa), std::abs(qb)});
  double d = std::arg(qb / qa);
  if (std::abs(d) < 0.8 || depth >= 14) return d;
  cplx m = 0.5 * (a + b);
  double left = edge_phase(table, node, a, m, tol, absmax, depth + 1);
  double right = edge_phase(table, node, m, b, tol, absmax, depth + 1);
  return left + right;
}

// winding number of Q around the rectangle boundary; not rounded, so the
// caller can detect a cut passing too close to a zero
double winding(QFunctionTable& table, int node, double x0, double x1, double y0,
               double y1, const Tolerances& tol, double& absmax) {
  const cplx c00(x0, y0), c10(x1, y0), c11(x1, y1), c01(x0, y1);
  const int n0 = 6;
  double total = 0.0;
  auto walk = [&](cplx a, cplx b) {
    for (int m = 0; m < n0; ++m)
      total += edge_phase(table, node, a + (b - a) * (double(m) / n0),
                          a + (b - a) * (double(m + 1) / n0), tol, absmax);
  };
  walk(c00, c10);
  walk(c10, c11);
  walk(c11, c01);
  walk(c01, c00);
  return total / (2.0 * PI);
}

// Newton iteration with the step clamped to the rectangle, so a steep
// envelope cannot drag the iterate towards a zero outside it
cplx polish_zero(QFunctionTable& table, int node, double x0, double x1,
                 double y0, double y1, double scale, const Tolerances& tol) {
  cplx lam(0.5 * (x0 + x1), 0.5 * (y0 + y1));
  const double max_step = 0.6 * std::max(x1 - x0, y1 - y0);
  for (int it = 0; it < 40; ++it) {
    cplx f = q_values(table, node, lam, tol).first;
    if (std::abs(f) < 1e-12 * scale) break;
    const double hstep = 1e-6 * std::max(1.0, std::abs(lam));
    cplx fp = q_values(table, node, lam + hstep, tol).first;
    cplx fm = q_values(table, node, lam - hstep, tol).first;
    cplx der = (fp - fm) / (2.0 * hstep);
    if (std::abs(der) < 1e-300)
      throw NumericError("vanishing derivative while polishing a zero");
    cplx step = f / der;
    if (std::abs(step) > max_step) step *= max_step / std::abs(step);
    lam -= step;
    lam = cplx(std::clamp(std::real(lam), x0, x1),
               std::clamp(std::imag(lam), y0, y1));
    if (std::abs(step) < 1e-11 * std::max(1.0, std::abs(lam))) break;
  }
  if (std::abs(q_values(table, node, lam, tol).first) > 1e-8 * scale)
    throw NumericError("polished point is not a zero at the requested scale");
  return lam;
}

void collect_zeros(QFunctionTable& table, int node, double x0, double x1,
                   double y0, double y1, const Tolerances& tol,
                   std::vector<cplx>& out, int depth = 0) {
  double absmax = 0.0;
  double wraw = winding(table, node, x0, x1, y0, y1, tol, absmax);
  int wnum = static_cast<int>(std::lround(wraw));
  if (std::abs(wraw - wnum) > 0.2)
    throw NumericError("winding number did not converge on a rectangle");
  if (wnum == 0) return;
  const double wx = x1 - x0, wy = y1 - y0;
  if (wnum == 1 && wx < 0.16 && wy < 0.16) {
    cplx z = polish_zero(table, node, x0, x1, y0, y1, absmax, tol);
    for (cplx prev : out)
      if (std::abs(prev - z) < 1e-8 * std::max(1.0, std::abs(z)))
        throw NumericError("winding count and polished root count disagree");
    out.push_back(z);
    return;
  }
  if (depth >= 40)
    throw NumericError("rectangle subdivision failed to isolate a zero");
  // slightly asymmetric cuts, retried when a cut lands too close to a zero
  for (double frac : {0.53, 0.41, 0.66}) {
    double nx0 = x0, nx1 = x1, ny0 = y0, ny1 = y1;
    if (wx >= wy) {
      nx1 = x0 + frac * wx;
      nx0 = nx1;
    } else {
      ny1 = y0 + frac * wy;
      ny0 = ny1;
    }
    try {
      std::vector<cplx> sub;
      collect_zeros(table, node, x0, wx >= wy ? nx1 : x1, y0,
                    wx >= wy ? y1 : ny1, tol, sub, depth + 1);
      collect_zeros(table, node, wx >= wy ? nx0 : x0, x1,
                    wx >= wy ? y0 : ny0, y1, tol, sub, depth + 1);
      for (cplx z : sub) out.push_back(z);
      return;
    } catch (const NumericError&) {
      // retry with the next cut fraction
    }
  }
  throw NumericError("winding count and polished roots disagree on every cut");
}

}  // namespace

std::vector<cplx> find_zeros(QFunctionTable& table, int node, cplx lo, cplx hi,
                             int max_count, const Tolerances& tol) {
  std::vector<cplx> out;
  if (std::real(hi) > std::real(lo) && std::imag(hi) > std::imag(lo))
    collect_zeros(table, node, std::real(lo), std::real(hi), std::imag(lo),
                  std::imag(hi), tol, out);
  std::sort(out.begin(), out.end(),
            [](cplx a, cplx b) { return std::real(a) < std::real(b); });
  if (static_cast<int>(out.size()) > max_count) out.resize(max_count);
  return out;
}

std::vector<cplx> find_zeros(const ConnectionSpec& spec, int node, cplx lo,
                             cplx hi, int max_count, const Tolerances& tol) {
  double cap = std::max({std::abs(lo), std::abs(hi), 1.0}) + 1.0;
  QFunctionTable table = build_q_table(spec, {}, tol, cap);
  return find_zeros(table, node, lo, hi, max_count, tol);
}

double psi_system_residual(const ConnectionSpec& spec, int node, cplx z,
                           cplx lambda, const Tolerances& tol) {
  spec.validate();
  const AlgebraData& alg = spec.alg();
  if (alg.id.r != 1)
    throw ValidationError(
        "solution-level wedge identity implemented for untwisted algebras only");

  std::vector<Module> mods(alg.n);
  std::vector<AsymptoticData> asy(alg.n);
  for (int j = 0; j < alg.n; ++j) {
    mods[j] = build_module(*spec.ch, fundamental_weight_tilde(alg, j));
    asy[j] = build_asymptotic(spec, mods[j], j);
  }
  std::vector<cplx> c = solution_normalizers(spec, mods, asy, tol);

  auto [lhs, rhs] =
      psi_pair(spec, node, mods, asy, std::abs(z), std::arg(z), lambda, tol);
  lhs *= c[node] * c[node];
  for (int j : fusion_target_nodes(alg, node)) rhs *= c[j];

  double scale = std::max({lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff(),
                           1e-300});
  return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

}  // namespace operlab
