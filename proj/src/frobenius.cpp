#include "operlab/frobenius.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace operlab {

namespace {

cplx pow_branch(cplx z, double argz, cplx e) {
  return std::exp(e * (std::log(std::abs(z)) + I * argz));
}

// eigenvector seeds of f + ell: for each basis state s with eigenvalue
// gamma_s = (weight of s)(ell), a kernel vector of (f + ell - gamma_s)
// normalized to have entry 1 on state s.  Degenerate eigenvalues are handled
// jointly through one kernel computation per distinct value.
std::vector<Vec> eigen_seeds(const Mat& FL, const Vec& gammas, double tol) {
  const int d = int(FL.rows());
  std::vector<Vec> seeds(d);
  std::vector<bool> done(d, false);
  for (int s = 0; s < d; ++s) {
    if (done[s]) continue;
    std::vector<int> group;
    for (int s2 = s; s2 < d; ++s2)
      if (!done[s2] && std::abs(gammas(s2) - gammas(s)) < tol) group.push_back(s2);
    Mat A = FL - gammas(s) * Mat::Identity(d, d);
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
    const int g = int(group.size());
    Mat K = svd.matrixV().rightCols(g);  // kernel basis
    // assign one kernel vector to each group state by pivoting on its entry
    Mat sub(g, g);
    for (int a = 0; a < g; ++a)
      for (int b = 0; b < g; ++b) sub(a, b) = K(group[a], b);
    Mat coeff = sub.partialPivLu().solve(Mat::Identity(g, g));
    for (int a = 0; a < g; ++a) {
      Vec v = K * coeff.col(a);  // entry 1 on state group[a], 0 on the others
      seeds[group[a]] = v;
      done[group[a]] = true;
    }
  }
  return seeds;
}

}  // namespace

GenericityReport check_generic(const ConnectionSpec& spec,
                               const std::vector<const Module*>& fund, double tol) {
  GenericityReport rep;
  rep.min_shift = 1e300;
  const AlgebraData& alg = spec.ch->alg;
  for (size_t i = 0; i < fund.size(); ++i) {
    const Module& mod = *fund[i];
    std::vector<cplx> gam(mod.dim);
    for (int s = 0; s < mod.dim; ++s)
      gam[s] = weight_of_ell(alg, mod, spec.ell_coeffs, s);
    double B = 1.0;
    for (int a = 0; a < mod.dim; ++a)
      for (int b = 0; b < mod.dim; ++b) B = std::max(B, std::abs(gam[a] - gam[b]) + 1.0);
    for (int a = 0; a < mod.dim; ++a)
      for (int b = 0; b < mod.dim; ++b) {
        for (int m = 0; m <= int(B) + 1; ++m)
          for (int n = 0; m + spec.k * n <= B + 1.0; ++n) {
            if (m == 0 && n == 0 && std::abs(gam[a] - gam[b]) < tol) continue;
            double d = std::abs(gam[b] - gam[a] + double(m) + spec.k * n);
            if (d < rep.min_shift) rep.min_shift = d;
            if (d < tol) {
              rep.generic = false;
              rep.node = int(i);
              rep.state1 = a;
              rep.state2 = b;
              rep.m = m;
              rep.n = n;
              return rep;
            }
          }
      }
    // diagonalizability proxy: the eigenvector matrix of f + ell must be
    // well-conditioned
    ConnectionEval ev(spec, mod);
    Mat FL = ev.f_mat() + ev.ell_mat();
    Vec gv(mod.dim);
    for (int s = 0; s < mod.dim; ++s) gv(s) = gam[s];
    auto seeds = eigen_seeds(FL, gv, tol);
    Mat P(mod.dim, mod.dim);
    for (int s = 0; s < mod.dim; ++s) P.col(s) = seeds[s];
    Eigen::JacobiSVD<Mat> svd(P);
    double cond = svd.singularValues()(0) / svd.singularValues()(mod.dim - 1);
    if (!(cond < 1e8)) {
      rep.generic = false;
      rep.node = int(i);
      return rep;
    }
  }
  return rep;
}

FrobeniusSolution build_frobenius(const ConnectionSpec& spec, const Module& mod,
                                  int state, double t, int M, int N) {
  FrobeniusBasis basis = build_frobenius_basis(spec, mod, t, M, N);
  return basis.sols.at(state);
}

FrobeniusBasis build_frobenius_basis(const ConnectionSpec& spec, const Module& mod,
                                     double t, int M, int N) {
  const Chevalley& ch = *spec.ch;
  const AlgebraData& alg = ch.alg;
  ConnectionEval ev(spec, mod);
  const int d = mod.dim;
  const Mat FL = ev.f_mat() + ev.ell_mat();
  Vec gammas(d);
  for (int s = 0; s < d; ++s) gammas(s) = weight_of_ell(alg, mod, spec.ell_coeffs, s);
  auto seeds = eigen_seeds(FL, gammas, 1e-8);

  // rotated Taylor data: A_l(t) = e^{2 pi i l t} A_l
  auto A0 = laurent_at_zero(spec, M);
  std::vector<Mat> A(M);
  for (int l = 1; l <= M; ++l)
    A[l - 1] = std::exp(2.0 * PI * I * double(l) * t) * mod.act(ch, A0[l - 1]);
  const Mat V = ev.vtheta_mat();

  double rho = 1e30;
  for (const auto& s : spec.sites) rho = std::min(rho, 0.8 * std::abs(s.w));

  FrobeniusBasis out;
  out.t = t;
  out.sols.resize(d);
  for (int s = 0; s < d; ++s) {
    FrobeniusSolution sol;
    sol.state = s;
    sol.gamma = gammas(s);
    sol.t = t;
    sol.k = spec.k;
    sol.M = M;
    sol.N = N;
    sol.rho = rho;
    sol.c.assign(M + 1, std::vector<Vec>(N + 1, Vec::Zero(d)));
    sol.c[0][0] = seeds[s];
    double resid = 0.0;
    for (int m = 0; m <= M; ++m)
      for (int n = 0; n <= N; ++n) {
        if (m == 0 && n == 0) continue;
        Vec rhs = Vec::Zero(d);
        if (n > 0) rhs -= V * sol.c[m][n - 1];
        for (int l = 1; l <= m; ++l) rhs -= A[l - 1] * sol.c[m - l][n];
        Mat lhs = FL + (cplx(double(m)) + spec.k * double(n) - sol.gamma) * Mat::Identity(d, d);
        sol.c[m][n] = lhs.partialPivLu().solve(rhs);
        double scale = std::max(1.0, rhs.cwiseAbs().maxCoeff());
        resid = std::max(resid, (lhs * sol.c[m][n] - rhs).cwiseAbs().maxCoeff() / scale);
      }
    sol.residual = resid;
    out.sols[s] = std::move(sol);
  }
  return out;
}

Vec FrobeniusSolution::eval(cplx z, double argz, cplx lambda) const {
  if (std::abs(z) >= rho)
    throw NumericError("Frobenius evaluation outside the validity radius");
  Vec acc = Vec::Zero(c[0][0].size());
  for (int m = 0; m <= M; ++m)
    for (int n = 0; n <= N; ++n) {
      if (c[m][n].cwiseAbs().maxCoeff() == 0.0) continue;
      acc += c[m][n] * pow_branch(z, argz, double(m) + k * n) * std::pow(lambda, n);
    }
  return Vec(pow_branch(z, argz, -gamma) * acc);
}

double FrobeniusSolution::tail_estimate(double absz, double abslam) const {
  double last = 0.0, prev = 0.0;
  for (int n = 0; n <= N; ++n) {
    last += c[M][n].cwiseAbs().maxCoeff() * std::pow(absz, M + k * n) * std::pow(abslam, n);
    if (M > 0)
      prev += c[M - 1][n].cwiseAbs().maxCoeff() * std::pow(absz, M - 1 + k * n) *
              std::pow(abslam, n);
  }
  double ratio = prev > 0 ? std::min(0.95, last / prev) : 0.5;
  return last * ratio / (1.0 - ratio);
}

Mat FrobeniusBasis::frame(cplx z, double argz, cplx lambda) const {
  const int d = int(sols.size());
  Mat out(sols[0].c[0][0].size(), d);
  for (int s = 0; s < d; ++s) out.col(s) = sols[s].eval(z, argz, lambda);
  return out;
}

}  // namespace operlab
