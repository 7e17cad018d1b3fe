#include "operlab/module.hpp"

#include <algorithm>
#include <map>

namespace operlab {

namespace {

using SparseCol = std::map<int, cplx>;

Vec densify(const SparseCol& c, int n) {
  Vec v = Vec::Zero(n);
  for (auto& [i, x] : c) v(i) = x;
  return v;
}

}  // namespace

Mat Module::H(int i) const {
  Mat M = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) M(k, k) = double(weights[k](i));
  return M;
}

Mat Module::cartan_diag(const AlgebraData& alg, const Vec& folded_coeffs) const {
  Mat M = Mat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) M(k, k) = alg.pair_folded_coroots(folded_coeffs, weights[k]);
  return M;
}

Mat Module::root_vector(const Chevalley& ch, int root_idx, bool negative) const {
  const VecI& root = ch.alg.rs_tilde.pos[root_idx];
  if (ch.alg.rs_tilde.heights[root_idx] == 1) {
    int i = 0;
    while (root(i) == 0) ++i;
    return negative ? Mat(-F[i]) : E[i];
  }
  auto [i, kp] = ch.decomp[root_idx];
  VecI simple = VecI::Zero(ch.N);
  simple(i) = 1;
  double c = double(ch.eps(simple, ch.alg.rs_tilde.pos[kp]));
  Mat A = negative ? Mat(-F[i]) : E[i];
  Mat B = root_vector(ch, kp, negative);
  return (A * B - B * A) / c;
}

Mat Module::act(const Chevalley& ch, const Vec& x) const {
  Mat M = Mat::Zero(dim, dim);
  for (int i = 0; i < ch.N; ++i)
    if (x(ch.idx_H(i)) != cplx(0.0)) M += x(ch.idx_H(i)) * H(i);
  for (int k = 0; k < ch.P; ++k) {
    if (x(ch.idx_E(k, false)) != cplx(0.0)) M += x(ch.idx_E(k, false)) * root_vector(ch, k, false);
    if (x(ch.idx_E(k, true)) != cplx(0.0)) M += x(ch.idx_E(k, true)) * root_vector(ch, k, true);
  }
  return M;
}

Module build_module(const Chevalley& ch, const VecI& hw, int dim_cap) {
  const int N = ch.N;
  const MatI& C = ch.alg.rs_tilde.cartan;
  Module m;
  m.hw = hw;
  m.N = N;

  std::vector<VecI> weights = {hw};
  std::vector<std::pair<int, int>> defining = {{-1, -1}};
  std::vector<std::vector<SparseCol>> Fcol(N), Ecol(N);
  for (int j = 0; j < N; ++j) {
    Fcol[j].resize(1);
    Ecol[j].resize(1);
  }
  std::map<std::vector<int>, std::vector<int>> by_weight;
  auto key_of = [N](const VecI& w) { return std::vector<int>(w.data(), w.data() + N); };
  by_weight[key_of(hw)] = {0};

  std::vector<int> frontier = {0};
  while (!frontier.empty()) {
    // group candidates F_j u over the previous layer by their target weight
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> cands;
    for (int u : frontier)
      for (int j = 0; j < N; ++j) {
        VecI w = weights[u];
        for (int mm = 0; mm < N; ++mm) w(mm) -= C(mm, j);
        cands[key_of(w)].push_back({j, u});
      }
    std::vector<int> next;
    for (auto& [wkey, list] : cands) {
      const int nc = static_cast<int>(list.size());
      // raising images of each candidate, by the commutation rule
      // E_m F_j u = F_j E_m u + delta_{mj} <alpha_j^vee, weight(u)> u
      std::vector<Vec> images(nc);
      const int cur = static_cast<int>(weights.size());
      for (int c = 0; c < nc; ++c) {
        auto [j, u] = list[c];
        Vec img = Vec::Zero(N * cur);
        for (int mm = 0; mm < N; ++mm) {
          for (auto& [idx, x] : Ecol[mm][u])
            for (auto& [idx2, y] : Fcol[j][idx]) img(mm * cur + idx2) += x * y;
          if (mm == j) img(mm * cur + u) += double(weights[u](j));
        }
        images[c] = img;
      }
      Mat K(N * cur, nc);
      for (int c = 0; c < nc; ++c) K.col(c) = images[c];
      Eigen::ColPivHouseholderQR<Mat> qr(K);
      // rank against the absolute working scale: exact-zero candidates only
      // vanish up to rounding of O(1) intermediate quantities
      double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
      int rank = 0;
      for (int c = 0; c < std::min<int>(nc, static_cast<int>(K.rows())); ++c)
        if (std::abs(qr.matrixR()(c, c)) > 1e-8 * scale) ++rank;
      if (rank == 0) {
        for (auto [j, u] : list) Fcol[j][u].clear();
        continue;
      }
      std::vector<int> pivots(qr.colsPermutation().indices().data(),
                              qr.colsPermutation().indices().data() + nc);
      pivots.resize(rank);
      std::sort(pivots.begin(), pivots.end());
      Mat Kp(N * cur, rank);
      for (int c = 0; c < rank; ++c) Kp.col(c) = K.col(pivots[c]);
      // coordinates of every candidate in the chosen basis
      Mat X = Kp.colPivHouseholderQr().solve(K);
      double resid = (Kp * X - K).cwiseAbs().maxCoeff() / std::max(1.0, K.cwiseAbs().maxCoeff());
      if (resid > 1e-8) throw NumericError("weight-space basis selection lost accuracy");

      std::vector<int> new_idx(rank);
      VecI wvec(N);
      for (int i = 0; i < N; ++i) wvec(i) = wkey[i];
      for (int c = 0; c < rank; ++c) {
        int b = static_cast<int>(weights.size());
        if (b >= dim_cap) throw CapExceeded("representation dimension cap exceeded");
        new_idx[c] = b;
        weights.push_back(wvec);
        defining.push_back(list[pivots[c]]);
        for (int j = 0; j < N; ++j) {
          Fcol[j].emplace_back();
          Ecol[j].emplace_back();
        }
        by_weight[wkey].push_back(b);
        next.push_back(b);
        // raising action on the new vector, read off its candidate image
        for (int mm = 0; mm < N; ++mm)
          for (int idx = 0; idx < cur; ++idx) {
            cplx x = images[pivots[c]](mm * cur + idx);
            if (std::abs(x) > 1e-13) Ecol[mm][b][idx] = x;
          }
      }
      for (int c = 0; c < nc; ++c) {
        auto [j, u] = list[c];
        SparseCol col;
        for (int p = 0; p < rank; ++p)
          if (std::abs(X(p, c)) > 1e-13) col[new_idx[p]] = X(p, c);
        Fcol[j][u] = col;
      }
    }
    frontier = next;
  }

  m.dim = static_cast<int>(weights.size());
  m.weights = weights;
  m.defining = defining;
  m.E.assign(N, Mat::Zero(m.dim, m.dim));
  m.F.assign(N, Mat::Zero(m.dim, m.dim));
  for (int j = 0; j < N; ++j)
    for (int u = 0; u < m.dim; ++u) {
      for (auto& [i, x] : Fcol[j][u]) m.F[j](i, u) = x;
      for (auto& [i, x] : Ecol[j][u]) m.E[j](i, u) = x;
    }

  // contravariant form: <F_j u, c> = <u, E_j c>, seeded by <v0, v0> = 1
  m.gramc = Mat::Zero(m.dim, m.dim);
  m.gramc(0, 0) = 1.0;
  for (int b = 1; b < m.dim; ++b) {
    auto [j, u] = m.defining[b];
    for (int c : by_weight[key_of(m.weights[b])]) {
      if (c > b) continue;
      Vec ejc = m.E[j].col(c);
      cplx val = 0.0;
      for (int t = 0; t < m.dim; ++t)
        if (ejc(t) != cplx(0.0)) val += m.gramc(u, t) * ejc(t);
      m.gramc(b, c) = val;
      m.gramc(c, b) = val;
    }
  }
  return m;
}

Mat twist_intertwiner(const Chevalley& ch, const Module& source, const Module& target) {
  if (source.dim != target.dim) throw ValidationError("twist intertwiner needs equal dimensions");
  Mat T = Mat::Zero(source.dim, source.dim);
  T.col(0)(0) = 1.0;
  for (int b = 1; b < source.dim; ++b) {
    auto [j, u] = source.defining[b];
    T.col(b) = target.F[ch.alg.sigma[j]] * T.col(u);
  }
  return T;
}

Vec WedgeSpace::wedge(const Vec& a, const Vec& b) const {
  Vec v = Vec::Zero(dim);
  for (int k = 0; k < dim; ++k) {
    auto [p, q] = pairs[k];
    v(k) = a(p) * b(q) - a(q) * b(p);
  }
  return v;
}

Mat WedgeSpace::lift(const Mat& X) const {
  Mat Y = Mat::Zero(dim, dim);
  auto slot = [&](int a, int b) {  // signed index of e_a ^ e_b
    if (a == b) return std::pair<int, int>{-1, 0};
    int s = 1;
    if (a > b) {
      std::swap(a, b);
      s = -1;
    }
    int n = static_cast<int>(base->dim);
    // index of (a, b) with a < b in lexicographic pair order
    int idx = a * n - a * (a + 1) / 2 + (b - a - 1);
    return std::pair<int, int>{idx, s};
  };
  for (int k = 0; k < dim; ++k) {
    auto [p, q] = pairs[k];
    for (int mrow = 0; mrow < base->dim; ++mrow) {
      if (X(mrow, p) != cplx(0.0)) {
        auto [idx, s] = slot(mrow, q);
        if (idx >= 0) Y(idx, k) += double(s) * X(mrow, p);
      }
      if (X(mrow, q) != cplx(0.0)) {
        auto [idx, s] = slot(p, mrow);
        if (idx >= 0) Y(idx, k) += double(s) * X(mrow, q);
      }
    }
  }
  return Y;
}

WedgeSpace build_wedge(const Module& m) {
  WedgeSpace w;
  w.base = &m;
  for (int p = 0; p < m.dim; ++p)
    for (int q = p + 1; q < m.dim; ++q) w.pairs.push_back({p, q});
  w.dim = static_cast<int>(w.pairs.size());
  w.gramc = Mat::Zero(w.dim, w.dim);
  for (int k = 0; k < w.dim; ++k)
    for (int l = 0; l < w.dim; ++l) {
      auto [p, q] = w.pairs[k];
      auto [p2, q2] = w.pairs[l];
      w.gramc(k, l) = m.gramc(p, p2) * m.gramc(q, q2) - m.gramc(p, q2) * m.gramc(q, p2);
    }
  return w;
}

Mat TensorSpace::lift(int slot, const Mat& X) const {
  Mat Y = Mat::Identity(1, 1);
  for (size_t s = 0; s < factors.size(); ++s) {
    const Mat& blk = (static_cast<int>(s) == slot)
                         ? X
                         : Mat(Mat::Identity(factors[s]->dim, factors[s]->dim));
    Mat Z(Y.rows() * blk.rows(), Y.cols() * blk.cols());
    for (int i = 0; i < Y.rows(); ++i)
      for (int j = 0; j < Y.cols(); ++j) Z.block(i * blk.rows(), j * blk.cols(), blk.rows(), blk.cols()) = Y(i, j) * blk;
    Y = Z;
  }
  return Y;
}

Mat TensorSpace::lift_all(const std::vector<Mat>& Xs) const {
  Mat Y = Mat::Zero(dim, dim);
  for (size_t s = 0; s < factors.size(); ++s) Y += lift(static_cast<int>(s), Xs[s]);
  return Y;
}

Vec TensorSpace::pure(const std::vector<Vec>& vs) const {
  Vec y = Vec::Ones(1);
  for (size_t s = 0; s < vs.size(); ++s) {
    Vec z(y.size() * vs[s].size());
    for (int i = 0; i < y.size(); ++i)
      for (int j = 0; j < vs[s].size(); ++j) z(i * vs[s].size() + j) = y(i) * vs[s](j);
    y = z;
  }
  return y;
}

TensorSpace build_tensor(const std::vector<const Module*>& factors) {
  TensorSpace t;
  t.factors = factors;
  t.dim = 1;
  for (auto* f : factors) t.dim *= f->dim;
  t.gramc = Mat::Identity(1, 1);
  for (auto* f : factors) {
    Mat Z(t.gramc.rows() * f->dim, t.gramc.cols() * f->dim);
    for (int i = 0; i < t.gramc.rows(); ++i)
      for (int j = 0; j < t.gramc.cols(); ++j)
        Z.block(i * f->dim, j * f->dim, f->dim, f->dim) = t.gramc(i, j) * f->gramc;
    t.gramc = Z;
  }
  return t;
}

std::vector<int> fusion_target_nodes(const AlgebraData& alg, int node_tilde) {
  std::vector<int> nodes;
  const MatI& C = alg.rs_tilde.cartan;
  for (int j = 0; j < alg.id.rank_tilde; ++j)
    for (int rep = 0; rep < -C(node_tilde, j); ++rep) nodes.push_back(j);
  return nodes;
}

FusionMap build_fusion(const Chevalley& ch, int node_tilde, const Module& mod_i,
                       const WedgeSpace& wedge_i, const TensorSpace& target,
                       const std::vector<const Module*>& target_mods) {
  FusionMap fm;
  fm.node = node_tilde;
  fm.target_nodes = fusion_target_nodes(ch.alg, node_tilde);
  if (target_mods.size() != fm.target_nodes.size())
    throw ValidationError("fusion target factor mismatch");

  const int N = ch.N;
  std::vector<Mat> Fw(N), Ft(N);
  for (int mm = 0; mm < N; ++mm) {
    Fw[mm] = wedge_i.lift(mod_i.F[mm]);
    std::vector<Mat> slots;
    for (auto* f : target_mods) slots.push_back(f->F[mm]);
    Ft[mm] = target.lift_all(slots);
  }

  Vec top = Vec::Zero(mod_i.dim);
  top(0) = 1.0;
  Vec u0 = wedge_i.wedge(top, mod_i.F[node_tilde].col(0));
  std::vector<Vec> tops;
  for (auto* f : target_mods) {
    Vec t = Vec::Zero(f->dim);
    t(0) = 1.0;
    tops.push_back(t);
  }
  Vec w0 = target.pure(tops);

  // cyclic span of u0 under the lowering operators, mirrored on w0
  std::vector<Vec> span_w = {u0}, span_t = {w0};
  Mat ortho(wedge_i.dim, 1);
  ortho.col(0) = u0.normalized();
  size_t head = 0;
  while (head < span_w.size()) {
    Vec cur_w = span_w[head], cur_t = span_t[head];
    ++head;
    for (int mm = 0; mm < N; ++mm) {
      Vec cand = Fw[mm] * cur_w;
      Vec resid = cand - ortho * (ortho.adjoint() * cand);
      if (resid.norm() > 1e-9 * std::max(1.0, cand.norm())) {
        span_w.push_back(cand);
        span_t.push_back(Ft[mm] * cur_t);
        ortho.conservativeResize(Eigen::NoChange, ortho.cols() + 1);
        ortho.col(ortho.cols() - 1) = resid.normalized();
      }
    }
  }

  const int s = static_cast<int>(span_w.size());
  Mat Sw(wedge_i.dim, s), St(target.dim, s);
  for (int c = 0; c < s; ++c) {
    Sw.col(c) = span_w[c];
    St.col(c) = span_t[c];
  }
  // projection along the orthogonal complement of the span with respect to
  // the contravariant form, then transport to the tensor side
  Mat Gss = Sw.transpose() * wedge_i.gramc * Sw;
  fm.matrix = St * Gss.partialPivLu().solve(Mat(Sw.transpose() * wedge_i.gramc));
  return fm;
}

}  // namespace operlab
