#include "operlab/chevalley.hpp"

#include <algorithm>

namespace operlab {

namespace {

// one structure-constant bracket of two basis elements, appended into out
void bracket_basis(const Chevalley& ch, int j, int k, Vec& out, cplx weight) {
  if (weight == cplx(0.0)) return;
  const int N = ch.N, P = ch.P;
  auto kind = [&](int idx) { return idx < N ? 0 : (idx < N + P ? 1 : 2); };
  int kj = kind(j), kk = kind(k);
  if (kj == 0 && kk == 0) return;
  if (kj == 0 || kk == 0) {
    // [H_i, E_gamma] = <alpha_i^vee, gamma> E_gamma
    int hi = kj == 0 ? j : k;
    int ei = kj == 0 ? k : j;
    int ridx = kind(ei) == 1 ? ei - N : ei - N - P;
    int s = kind(ei) == 1 ? 1 : -1;
    int pairing = s * ch.alg.rs_tilde.pairing(hi, ch.alg.rs_tilde.pos[ridx]);
    cplx c = weight * double(pairing) * (kj == 0 ? 1.0 : -1.0);
    out(ei) += c;
    return;
  }
  int rj = kj == 1 ? j - N : j - N - P;
  int rk = kk == 1 ? k - N : k - N - P;
  int sj = kj == 1 ? 1 : -1;
  int sk = kk == 1 ? 1 : -1;
  VecI a = sj * ch.alg.rs_tilde.pos[rj];
  VecI b = sk * ch.alg.rs_tilde.pos[rk];
  VecI sum = a + b;
  if (sum.isZero()) {
    // [E_a, E_{-a}] = eps(a, -a) H_a = -H_a, with H_a linear in a
    for (int i = 0; i < N; ++i) out(i) -= weight * double(a(i));
    return;
  }
  int sidx = ch.find_root_signed(sum);
  if (sidx == 0) return;
  cplx c = weight * double(ch.eps(a, b));
  out(sidx > 0 ? ch.idx_E(sidx - 1, false) : ch.idx_E(-sidx - 1, true)) += c;
}

}  // namespace

Vec Chevalley::basis_H(int i) const {
  Vec v = Vec::Zero(dim());
  v(idx_H(i)) = 1.0;
  return v;
}

Vec Chevalley::basis_E(int root_idx, bool negative) const {
  Vec v = Vec::Zero(dim());
  v(idx_E(root_idx, negative)) = 1.0;
  return v;
}

int Chevalley::find_root_signed(const VecI& v) const {
  auto it = root_lookup.find(std::vector<int>(v.data(), v.data() + v.size()));
  return it == root_lookup.end() ? 0 : it->second;
}

int Chevalley::eps(const VecI& a, const VecI& b) const {
  // parity form: t(i,i) = 1; t(i,j) = 1 for an edge with i < j, 0 otherwise
  const MatI& C = alg.rs_tilde.cartan;
  long parity = 0;
  for (int i = 0; i < N; ++i) {
    if (a(i) == 0) continue;
    for (int j = 0; j < N; ++j) {
      if (b(j) == 0) continue;
      int t = (i == j) ? 1 : ((i < j && C(i, j) != 0) ? 1 : 0);
      parity += long(a(i)) * b(j) * t;
    }
  }
  return (parity % 2 == 0) ? 1 : -1;
}

Vec Chevalley::bracket(const Vec& x, const Vec& y) const {
  Vec out = Vec::Zero(dim());
  for (int j = 0; j < dim(); ++j) {
    if (x(j) == cplx(0.0)) continue;
    for (int k = 0; k < dim(); ++k) bracket_basis(*this, j, k, out, x(j) * y(k));
  }
  return out;
}

Mat Chevalley::ad(const Vec& x) const {
  Mat M = Mat::Zero(dim(), dim());
  for (int k = 0; k < dim(); ++k) {
    Vec col = Vec::Zero(dim());
    for (int j = 0; j < dim(); ++j)
      if (x(j) != cplx(0.0)) bracket_basis(*this, j, k, col, x(j));
    M.col(k) = col;
  }
  return M;
}

cplx Chevalley::form(const Vec& x, const Vec& y) const { return (x.transpose() * gram * y)(0); }

Mat Chevalley::grade_projector(int j) const {
  const int r = alg.id.r;
  cplx omega = std::exp(2.0 * PI * I / double(r));
  Mat Pj = Mat::Zero(dim(), dim());
  Mat power = Mat::Identity(dim(), dim());
  for (int l = 0; l < r; ++l) {
    Pj += std::pow(omega, -double(j * l)) * power;
    power = sigma_hat * power;
  }
  return Pj / double(r);
}

Vec Chevalley::e_fold(int i) const {
  Vec v = Vec::Zero(dim());
  int node = alg.orbit_rep[i];
  for (int l = 0; l < alg.orbit_size[i]; ++l) {
    VecI simple = VecI::Zero(N);
    simple(node) = 1;
    v(idx_E(find_root_signed(simple) - 1, false)) += 1.0;
    node = alg.sigma[node];
  }
  return v;
}

Vec Chevalley::f_fold(int i) const {
  // the lowering generator is -E_{-alpha_i}, so that [e_i, f_i] = h_i
  Vec v = Vec::Zero(dim());
  int node = alg.orbit_rep[i];
  for (int l = 0; l < alg.orbit_size[i]; ++l) {
    VecI simple = VecI::Zero(N);
    simple(node) = 1;
    v(idx_E(find_root_signed(simple) - 1, true)) -= 1.0;
    node = alg.sigma[node];
  }
  return v;
}

Vec Chevalley::h_fold(int i) const {
  Vec v = Vec::Zero(dim());
  int node = alg.orbit_rep[i];
  for (int l = 0; l < alg.orbit_size[i]; ++l) {
    v(idx_H(node)) += 1.0;
    node = alg.sigma[node];
  }
  return v;
}

Vec Chevalley::f_principal() const {
  Vec v = Vec::Zero(dim());
  for (int i = 0; i < alg.n; ++i) v += f_fold(i);
  return v;
}

Vec Chevalley::cartan_elem(const Vec& coeffs) const {
  Vec v = Vec::Zero(dim());
  for (int i = 0; i < alg.n; ++i) v += coeffs(i) * h_fold(i);
  return v;
}

Vec Chevalley::theta_covee_elem() const {
  Vec c(alg.n);
  for (int i = 0; i < alg.n; ++i) c(i) = double(alg.theta_covee(i));
  return cartan_elem(c);
}

namespace {

VecI sigma_on_lattice(const AlgebraData& alg, const VecI& v) {
  VecI out = VecI::Zero(v.size());
  for (int i = 0; i < v.size(); ++i) out(alg.sigma[i]) += v(i);
  return out;
}

// kernel of the stacked action of the given operators on the column space of B
Vec common_kernel_vector(const std::vector<Mat>& ops, const Mat& B, double tol) {
  Mat K(static_cast<int>(ops.size()) * B.rows(), B.cols());
  for (size_t m = 0; m < ops.size(); ++m)
    K.middleRows(static_cast<int>(m) * B.rows(), B.rows()) = ops[m] * B;
  Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeFullV);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > tol * svd.singularValues()(0)) ++rank;
  if (svd.matrixV().cols() - rank != 1)
    throw NumericError("expected one-dimensional common kernel");
  return B * svd.matrixV().col(svd.matrixV().cols() - 1);
}

}  // namespace

Chevalley build_chevalley(const AlgebraData& alg) {
  Chevalley ch;
  ch.alg = alg;
  ch.N = alg.id.rank_tilde;
  ch.P = alg.rs_tilde.npos();
  const int dim = ch.dim();

  for (int k = 0; k < ch.P; ++k) {
    const VecI& root = alg.rs_tilde.pos[k];
    std::vector<int> key(root.data(), root.data() + ch.N);
    ch.root_lookup[key] = k + 1;
    for (auto& v : key) v = -v;
    ch.root_lookup[key] = -(k + 1);
  }

  // invariant form
  ch.gram = Mat::Zero(dim, dim);
  for (int i = 0; i < ch.N; ++i)
    for (int j = 0; j < ch.N; ++j) ch.gram(i, j) = double(alg.rs_tilde.cartan(i, j));
  // invariance with [E_a, E_{-a}] = -H_a forces (E_gamma | E_{-gamma}) = -1
  for (int k = 0; k < ch.P; ++k) {
    ch.gram(ch.idx_E(k, false), ch.idx_E(k, true)) = -1.0;
    ch.gram(ch.idx_E(k, true), ch.idx_E(k, false)) = -1.0;
  }

  // canonical decompositions, by increasing height
  ch.decomp.assign(ch.P, {-1, -1});
  for (int k = 0; k < ch.P; ++k) {
    if (alg.rs_tilde.heights[k] == 1) continue;
    for (int i = 0; i < ch.N; ++i) {
      VecI rest = alg.rs_tilde.pos[k];
      rest(i) -= 1;
      int s = 0;
      {
        auto it = ch.root_lookup.find(std::vector<int>(rest.data(), rest.data() + ch.N));
        s = it == ch.root_lookup.end() ? 0 : it->second;
      }
      if (s > 0) {
        ch.decomp[k] = {i, s - 1};
        break;
      }
    }
    if (ch.decomp[k].first < 0) throw NumericError("failed to split a positive root");
  }

  // automorphism signs on positive roots, recursively in height; every valid
  // split must give the same sign
  ch.sign_pos.assign(ch.P, 1);
  for (int k = 0; k < ch.P; ++k) {
    if (alg.rs_tilde.heights[k] == 1) continue;
    int found = 0, value = 1;
    for (int i = 0; i < ch.N; ++i) {
      VecI rest = alg.rs_tilde.pos[k];
      rest(i) -= 1;
      int s = ch.find_root_signed(rest);
      if (s <= 0) continue;
      const VecI& gp = alg.rs_tilde.pos[s - 1];
      VecI simple = VecI::Zero(ch.N);
      simple(i) = 1;
      int v = ch.sign_pos[s - 1] * ch.eps(simple, gp) *
              ch.eps(sigma_on_lattice(alg, simple), sigma_on_lattice(alg, gp));
      if (found == 0) value = v;
      else if (v != value)
        throw NumericError("automorphism sign is not well defined");
      found = 1;
    }
    ch.sign_pos[k] = value;
  }

  ch.sigma_hat = Mat::Zero(dim, dim);
  for (int i = 0; i < ch.N; ++i) ch.sigma_hat(ch.idx_H(alg.sigma[i]), ch.idx_H(i)) = 1.0;
  for (int k = 0; k < ch.P; ++k) {
    int target = ch.find_root_signed(sigma_on_lattice(alg, alg.rs_tilde.pos[k])) - 1;
    ch.sigma_hat(ch.idx_E(target, false), ch.idx_E(k, false)) = double(ch.sign_pos[k]);
    ch.sigma_hat(ch.idx_E(target, true), ch.idx_E(k, true)) = double(ch.sign_pos[k]);
  }

  // distinguished vectors for the connection
  if (alg.id.r == 1) {
    ch.v_theta = ch.basis_E(ch.P - 1, false);  // highest root is last in height order
    ch.v_minus_theta = -ch.basis_E(ch.P - 1, true);
  } else {
    std::vector<Mat> e_ops, f_ops;
    for (int i = 0; i < alg.n; ++i) {
      e_ops.push_back(ch.ad(ch.e_fold(i)));
      f_ops.push_back(ch.ad(ch.f_fold(i)));
    }
    auto eigenbasis = [&](int grade) {
      Mat Pj = ch.grade_projector(grade);
      Eigen::ColPivHouseholderQR<Mat> qr(Pj);
      qr.setThreshold(1e-10);
      int rk = static_cast<int>(qr.rank());
      Mat Q = Mat(qr.householderQ());
      return Mat(Q.leftCols(rk));
    };
    Vec v = common_kernel_vector(e_ops, eigenbasis(1), 1e-10);
    Vec w = common_kernel_vector(f_ops, eigenbasis(alg.id.r - 1), 1e-10);
    // deterministic pre-normalization: largest entry of v equal to 1
    int imax = 0;
    for (int i = 1; i < dim; ++i)
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    v /= v(imax);
    // clean tiny numerical dust
    for (int i = 0; i < dim; ++i)
      if (std::abs(v(i)) < 1e-12) v(i) = 0.0;
    cplx pairing = ch.form(v, w);
    if (std::abs(pairing) < 1e-12) throw NumericError("degenerate pairing of twist vectors");
    w /= pairing;
    for (int i = 0; i < dim; ++i)
      if (std::abs(w(i)) < 1e-12) w(i) = 0.0;
    ch.v_theta = v;
    ch.v_minus_theta = w;
  }

  // root vectors of the fixed-point subalgebra, by folded height
  ch.ring_pos.assign(alg.rs_folded.npos(), Vec());
  ch.ring_neg.assign(alg.rs_folded.npos(), Vec());
  for (int k = 0; k < alg.rs_folded.npos(); ++k) {
    if (alg.rs_folded.heights[k] == 1) {
      for (int i = 0; i < alg.n; ++i) {
        VecI simple = VecI::Zero(alg.n);
        simple(i) = 1;
        if (alg.rs_folded.pos[k] == simple) {
          ch.ring_pos[k] = ch.e_fold(i);
          ch.ring_neg[k] = ch.f_fold(i);
        }
      }
      continue;
    }
    bool done = false;
    for (int i = 0; i < alg.n && !done; ++i) {
      VecI rest = alg.rs_folded.pos[k];
      rest(i) -= 1;
      int s = alg.rs_folded.index_of(rest);
      if (s < 0 || rest.minCoeff() < 0 || ch.ring_pos[s].size() == 0) continue;
      Vec cand = ch.bracket(ch.e_fold(i), ch.ring_pos[s]);
      if (cand.cwiseAbs().maxCoeff() < 1e-12) continue;
      ch.ring_pos[k] = cand;
      ch.ring_neg[k] = ch.bracket(ch.f_fold(i), ch.ring_neg[s]);
      done = true;
    }
    if (!done) throw NumericError("failed to build a folded root vector");
  }
  return ch;
}

void rescale_v_theta(Chevalley& ch, cplx s) {
  ch.v_theta *= s;
  ch.v_minus_theta /= s;
  ch.v_theta_normalized = true;
}

}  // namespace operlab
