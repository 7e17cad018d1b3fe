#include "operlab/spectrum.hpp"

#include <algorithm>

namespace operlab {

std::pair<cplx, Vec> maximal_eigen(const Mat& M, double gap) {
  Eigen::ComplexEigenSolver<Mat> es(M);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue computation failed");
  const Vec& ev = es.eigenvalues();
  int best = -1;
  for (int k = 0; k < ev.size(); ++k)
    if (best < 0 || ev(k).real() > ev(best).real()) best = k;
  cplx mu = ev(best);
  double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (std::abs(mu.imag()) > gap * scale)
    throw NumericError("dominant eigenvalue is not real");
  for (int k = 0; k < ev.size(); ++k)
    if (k != best && mu.real() - ev(k).real() < gap * scale)
      throw NumericError("dominant eigenvalue is not simple/strict");
  Vec v = es.eigenvectors().col(best);
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  v *= std::abs(v(imax)) / v(imax);
  v /= v.norm();
  return {mu, v};
}

Mat cyclic_matrix(const Chevalley& ch, const Module& m, double t) {
  return m.act(ch, ch.f_principal()) + std::exp(2.0 * PI * I * t) * m.act(ch, ch.v_theta);
}

Mat rho_exp(const AlgebraData& alg, const Module& m, cplx s) {
  Vec rho = alg.rho_covee_coeffs();
  Mat M = Mat::Zero(m.dim, m.dim);
  for (int k = 0; k < m.dim; ++k)
    M(k, k) = std::exp(s * alg.pair_folded_coroots(rho, m.weights[k]));
  return M;
}

void normalize_v_theta(Chevalley& ch, double gap) {
  const AlgebraData& alg = ch.alg;
  int node = alg.orbit_rep[0];
  VecI hw = VecI::Zero(ch.N);
  hw(node) = 1;
  Module m = build_module(ch, hw);
  Mat M = cyclic_matrix(ch, m, alg.kappa[node]);
  Eigen::ComplexEigenSolver<Mat> es(M);
  Vec ev = es.eigenvalues();
  // candidate eigenvalues ordered by modulus; the spectrum divides through by
  // the chosen one, so it must then be real, simple and strictly dominant
  std::vector<int> order(ev.size());
  for (int k = 0; k < ev.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(std::abs(ev(a)) - std::abs(ev(b))) > 1e-12) return std::abs(ev(a)) > std::abs(ev(b));
    return std::abs(std::arg(ev(a))) < std::abs(std::arg(ev(b)));
  });
  for (int k : order) {
    if (std::abs(ev(k)) < 1e-12) continue;
    bool ok = true;
    for (int l = 0; l < ev.size(); ++l) {
      if (l == k) continue;
      cplx rel = ev(l) / ev(k);
      if (1.0 - rel.real() < gap) ok = false;
    }
    if (!ok) continue;
    cplx s = std::pow(ev(k), -double(alg.h));
    rescale_v_theta(ch, s);
    // confirm the normalized eigenvalue is exactly the distinguished one
    auto [mu, psi] = maximal_eigen(cyclic_matrix(ch, m, alg.kappa[node]), gap);
    (void)psi;
    if (std::abs(mu - 1.0) > 1e-8) throw NumericError("eigenvalue normalization drifted");
    return;
  }
  throw NumericError("no admissible normalization of the cyclic eigenvalue");
}

Mat SpectralData::R(int folded_i) const {
  const AlgebraData& alg = ch.alg;
  int node = alg.orbit_rep[folded_i];
  if (alg.orbit_size[folded_i] != 1) return Mat::Identity(fund[node].dim, fund[node].dim);
  // the automorphism action shifting the rotation angle by -1/r: the inverse
  // of the stored intertwiner (they agree when the order is two)
  return twist[node].partialPivLu().inverse();
}

SpectralData build_spectral(const AlgebraId& id, double gap) {
  SpectralData sd;
  sd.ch = build_chevalley(build_algebra(id));
  normalize_v_theta(sd.ch, gap);
  const AlgebraData& alg = sd.ch.alg;
  const int N = sd.ch.N;

  sd.fund.reserve(N);
  for (int i = 0; i < N; ++i) {
    VecI hw = VecI::Zero(N);
    hw(i) = 1;
    sd.fund.push_back(build_module(sd.ch, hw));
  }
  sd.twist.resize(N);
  for (int i = 0; i < N; ++i)
    sd.twist[i] = twist_intertwiner(sd.ch, sd.fund[i], sd.fund[alg.sigma[i]]);

  sd.mu.assign(N, 0.0);
  sd.psi.assign(N, Vec());
  for (int fi = 0; fi < alg.n; ++fi) {
    int rep = alg.orbit_rep[fi];
    auto [mu, psi] = maximal_eigen(cyclic_matrix(sd.ch, sd.fund[rep], alg.kappa[rep]), gap);
    sd.mu[rep] = mu;
    sd.psi[rep] = psi;
    int node = rep;
    for (int l = 1; l < alg.orbit_size[fi]; ++l) {
      int tgt = alg.sigma[node];
      sd.mu[tgt] = mu;
      sd.psi[tgt] = sd.twist[node] * sd.psi[node];
      node = tgt;
    }
  }
  return sd;
}

Vec psi_wedge(const SpectralData& sd, int folded_i, const WedgeSpace& w) {
  const AlgebraData& alg = sd.ch.alg;
  int rep = alg.orbit_rep[folded_i];
  double Di = alg.D(folded_i);
  cplx arg = PI * I * Di / double(alg.h);
  Vec left = sd.R(folded_i) * (rho_exp(alg, sd.fund[rep], arg) * sd.psi[rep]);
  Vec right = rho_exp(alg, sd.fund[rep], -arg) * sd.psi[rep];
  return w.wedge(left, right);
}

Vec psi_tensor(const SpectralData& sd, int folded_i, const TensorSpace& t,
               const std::vector<int>& target_nodes) {
  const AlgebraData& alg = sd.ch.alg;
  int rep = alg.orbit_rep[folded_i];
  double Di = alg.D(folded_i);
  std::vector<Vec> factors;
  for (int m : target_nodes) {
    int fj = alg.fold_index[m];
    int repj = alg.orbit_rep[fj];
    int l = 0, node = repj;
    while (node != m) {
      node = alg.sigma[node];
      ++l;
    }
    // psi[m] belongs to the rotation angle kappa_j + l/r; shift it to the
    // common angle kappa_i - D_i/2 by the representative of the angle
    // difference closest to zero (angles only matter modulo one)
    double delta = alg.kappa[rep] - Di / 2.0 - alg.kappa[repj] - double(l) / double(alg.id.r);
    delta -= std::round(delta);
    cplx arg = 2.0 * PI * I * delta / double(alg.h);
    factors.push_back(rho_exp(alg, sd.fund[m], arg) * sd.psi[m]);
  }
  return t.pure(factors);
}

std::pair<double, double> dominance_angles(const std::vector<cplx>& eigs, cplx mu) {
  // rotating by e^{i phi}: dominance fails first where Re(e^{i phi}(mu - mu'))
  // crosses zero, i.e. phi = pi/2 - arg(mu - mu') modulo pi
  double plus = PI, minus = PI;
  for (cplx m : eigs) {
    cplx d = mu - m;
    if (std::abs(d) < 1e-12) continue;
    double base = PI / 2.0 - std::arg(d);
    double p = std::fmod(base, PI);
    if (p <= 1e-14) p += PI;
    plus = std::min(plus, p);
    double q = std::fmod(-base, PI);
    if (q <= 1e-14) q += PI;
    minus = std::min(minus, q);
  }
  return {plus, minus};
}

std::pair<double, double> dominance_angles(const Mat& M, double gap) {
  Eigen::ComplexEigenSolver<Mat> es(M);
  auto [mu, psi] = maximal_eigen(M, gap);
  (void)psi;
  std::vector<cplx> eigs(es.eigenvalues().data(),
                         es.eigenvalues().data() + es.eigenvalues().size());
  return dominance_angles(eigs, mu);
}

}  // namespace operlab
