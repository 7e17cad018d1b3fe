#include "operlab/rootsys.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace operlab {

AlgebraId parse_algebra_id(const std::string& s) {
  if (s.empty()) throw ValidationError("empty algebra selector");
  AlgebraId id;
  id.series = s[0];
  if (id.series != 'A' && id.series != 'D' && id.series != 'E')
    throw ValidationError("algebra selector must start with A, D or E: " + s);
  size_t caret = s.find('^');
  std::string rank_part = s.substr(1, caret == std::string::npos ? caret : caret - 1);
  try {
    id.rank_tilde = std::stoi(rank_part);
    id.r = caret == std::string::npos ? 1 : std::stoi(s.substr(caret + 1));
  } catch (const std::exception&) {
    throw ValidationError("malformed algebra selector: " + s);
  }
  return id;
}

std::string to_string(const AlgebraId& id) {
  std::string s(1, id.series);
  s += std::to_string(id.rank_tilde);
  if (id.r != 1) s += "^" + std::to_string(id.r);
  return s;
}

int RootSystem::index_of(const VecI& root) const {
  for (int k = 0; k < npos(); ++k)
    if (pos[k] == root) return k;
  return -1;
}

int RootSystem::pairing(int i, const VecI& beta) const {
  int v = 0;
  for (int j = 0; j < rank(); ++j) v += cartan(i, j) * beta(j);
  return v;
}

int RootSystem::inner(const VecI& beta, const VecI& gamma) const {
  // (alpha_i, alpha_j) = d_i C_{ij}, d normalized so min d = 1 and short length^2 = 2
  int v = 0;
  for (int i = 0; i < rank(); ++i)
    for (int j = 0; j < rank(); ++j) v += beta(i) * sym(i) * cartan(i, j) * gamma(j);
  return v;
}

VecI RootSystem::coroot(const VecI& root) const {
  // beta^vee = (2/(beta,beta)) sum_i m_i d_i alpha_i^vee
  int len2 = inner(root, root);
  VecI c(rank());
  for (int i = 0; i < rank(); ++i) {
    int num = 2 * root(i) * sym(i);
    if (num % len2 != 0) throw NumericError("coroot coefficients not integral");
    c(i) = num / len2;
  }
  return c;
}

bool RootSystem::is_short(int idx) const {
  int min_len = inner(pos[0], pos[0]);
  for (const auto& b : pos) min_len = std::min(min_len, inner(b, b));
  return inner(pos[idx], pos[idx]) == min_len;
}

std::vector<int> RootSystem::exponents() const {
  // number of positive roots of height >= m is decreasing in m; the exponents
  // are the conjugate partition of the height histogram
  std::map<int, int> hist;
  for (int hgt : heights) hist[hgt]++;
  int max_h = hist.rbegin()->first;
  std::vector<int> exps;
  for (int m = 1; m <= max_h; ++m) {
    int count_ge = 0;
    for (auto& [hh, c] : hist)
      if (hh >= m) count_ge += c;
    // count_ge copies of rows reach height m; each contributes while its column lasts
    (void)count_ge;
  }
  // columns of the partition N_1 >= N_2 >= ... (N_m = #roots of height m)
  std::vector<int> N(max_h + 1, 0);
  for (auto& [hh, c] : hist) N[hh] = c;
  for (int col = 1;; ++col) {
    int len = 0;
    for (int m = 1; m <= max_h; ++m)
      if (N[m] >= col) len = m;
      else break;
    if (len == 0) break;
    exps.push_back(len);
  }
  std::sort(exps.begin(), exps.end());
  return exps;
}

RootSystem build_root_system(const MatI& cartan) {
  RootSystem rs;
  rs.cartan = cartan;
  int n = static_cast<int>(cartan.rows());

  // symmetrizer: d_i C_{ij} = d_j C_{ji}, minimal positive integers
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  d(0) = 1.0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (cartan(i, j) == 0 || d(i) == 0.0 || d(j) != 0.0) continue;
        d(j) = d(i) * double(cartan(i, j)) / double(cartan(j, i));
        changed = true;
      }
  }
  // scale to minimal integers
  for (int scale = 1; scale <= 12; ++scale) {
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      double v = d(i) * scale;
      if (std::abs(v - std::round(v)) > 1e-9 || std::round(v) < 1) ok = false;
    }
    if (ok) {
      rs.sym = VecI(n);
      for (int i = 0; i < n; ++i) rs.sym(i) = int(std::round(d(i) * scale));
      break;
    }
  }
  if (rs.sym.size() == 0) throw NumericError("failed to symmetrize Cartan matrix");
  int dmin = rs.sym.minCoeff();
  for (int i = 0; i < n; ++i) rs.sym(i) /= dmin;

  // closure under root strings
  std::set<std::vector<int>> seen;
  std::vector<VecI> roots;
  for (int i = 0; i < n; ++i) {
    VecI a = VecI::Zero(n);
    a(i) = 1;
    roots.push_back(a);
    seen.insert(std::vector<int>(a.data(), a.data() + n));
  }
  auto contains = [&](const VecI& v) {
    return seen.count(std::vector<int>(v.data(), v.data() + n)) > 0;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    for (size_t k = 0; k < roots.size(); ++k) {
      VecI beta = roots[k];
      for (int i = 0; i < n; ++i) {
        // alpha_i-string through beta: p = max down-steps, q = p - <alpha_i^vee, beta>
        int p = 0;
        VecI down = beta;
        while (true) {
          down(i) -= 1;
          bool nonneg = true, zero = true;
          for (int j = 0; j < n; ++j) {
            if (down(j) < 0) nonneg = false;
            if (down(j) != 0) zero = false;
          }
          if (zero || (nonneg && contains(down))) ++p;
          else break;
        }
        int pairing_ib = 0;
        for (int j = 0; j < n; ++j) pairing_ib += cartan(i, j) * beta(j);
        int q = p - pairing_ib;
        VecI up = beta;
        for (int m = 1; m <= q; ++m) {
          up(i) += 1;
          if (!contains(up)) {
            roots.push_back(up);
            seen.insert(std::vector<int>(up.data(), up.data() + n));
            grew = true;
          }
        }
      }
    }
  }
  // height-lex order
  std::sort(roots.begin(), roots.end(), [n](const VecI& a, const VecI& b) {
    int ha = a.sum(), hb = b.sum();
    if (ha != hb) return ha < hb;
    for (int i = 0; i < n; ++i)
      if (a(i) != b(i)) return a(i) < b(i);
    return false;
  });
  rs.pos = roots;
  for (const auto& b : roots) rs.heights.push_back(b.sum());
  return rs;
}

MatI simply_laced_cartan(char series, int n) {
  std::vector<std::pair<int, int>> edges;  // 0-based
  if (series == 'A') {
    if (n < 1) throw ValidationError("A series needs rank >= 1");
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  } else if (series == 'D') {
    if (n < 3) throw ValidationError("D series needs rank >= 3");
    // chain 1..n-2 with both of n-1, n attached to n-2 (1-based); for n = 3
    // this is the three-node star 2-1-3
    for (int i = 0; i + 1 < n - 2; ++i) edges.push_back({i, i + 1});
    edges.push_back({n - 3, n - 2});
    edges.push_back({n - 3, n - 1});
  } else if (series == 'E') {
    if (n < 6 || n > 8) throw ValidationError("E series needs rank 6..8");
    // chain 1-3-4-5-...-n with node 2 attached to node 4 (1-based labels)
    edges.push_back({0, 2});
    for (int i = 2; i + 1 < n; ++i) edges.push_back({i, i + 1});
    edges.push_back({1, 3});
  } else {
    throw ValidationError("unknown series");
  }
  MatI C = 2 * MatI::Identity(n, n);
  for (auto [a, b] : edges) {
    C(a, b) = -1;
    C(b, a) = -1;
  }
  return C;
}

std::vector<int> diagram_automorphism(const AlgebraId& id) {
  int n = id.rank_tilde;
  std::vector<int> s(n);
  std::iota(s.begin(), s.end(), 0);
  if (id.r == 1) return s;
  if (id.series == 'A' && id.r == 2) {
    if (n % 2 == 0) throw ValidationError("order-2 automorphism supported for odd-rank A only");
    for (int i = 0; i < n; ++i) s[i] = n - 1 - i;
    return s;
  }
  if (id.series == 'D' && id.r == 2) {
    std::swap(s[n - 2], s[n - 1]);
    return s;
  }
  if (id.series == 'D' && id.r == 3) {
    if (n != 4) throw ValidationError("order-3 automorphism requires D4");
    s = {2, 1, 3, 0};  // 1 -> 3 -> 4 -> 1, fixing node 2
    return s;
  }
  if (id.series == 'E' && id.r == 2) {
    if (n != 6) throw ValidationError("order-2 automorphism in E requires E6");
    s = {5, 1, 4, 3, 2, 0};  // 1<->6, 3<->5, fixing 2 and 4
    return s;
  }
  throw ValidationError("unsupported diagram automorphism for " + to_string(id));
}

namespace {

// exact integer null vector of a singular integer matrix with 1-dim kernel,
// normalized so the entry `pivot` equals 1
VecI integer_nullvector(const MatI& M, int pivot) {
  int m = static_cast<int>(M.rows());
  Eigen::MatrixXd A = M.cast<double>();
  // solve A x = 0 with x(pivot) = 1: move column `pivot` to the rhs
  Eigen::MatrixXd B(m, m - 1);
  int c = 0;
  for (int j = 0; j < m; ++j)
    if (j != pivot) B.col(c++) = A.col(j);
  Eigen::VectorXd rhs = -A.col(pivot);
  Eigen::VectorXd x = B.colPivHouseholderQr().solve(rhs);
  VecI out(m);
  out(pivot) = 1;
  c = 0;
  for (int j = 0; j < m; ++j) {
    if (j == pivot) continue;
    double v = x(c++);
    if (std::abs(v - std::round(v)) > 1e-7)
      throw NumericError("null vector of affine Cartan matrix is not integral");
    out(j) = int(std::round(v));
  }
  // exact verification
  if ((M * out).cwiseAbs().maxCoeff() != 0)
    throw NumericError("integer null vector verification failed");
  return out;
}

void check_supported(const AlgebraId& id) {
  const char s = id.series;
  const int n = id.rank_tilde, r = id.r;
  bool ok = false;
  if (r == 1 && s == 'A' && n >= 1) ok = true;
  if (r == 1 && s == 'D' && n >= 3) ok = true;
  if (r == 1 && s == 'E' && n >= 6 && n <= 8) ok = true;
  if (r == 2 && s == 'A' && n >= 3 && n % 2 == 1) ok = true;
  if (r == 2 && s == 'D' && n >= 3) ok = true;
  if (r == 3 && s == 'D' && n == 4) ok = true;
  if (r == 2 && s == 'E' && n == 6) ok = true;
  if (!ok) throw ValidationError("unsupported algebra: " + to_string(id));
}

}  // namespace

int AlgebraData::theta_pairing_tilde(const VecI& beta_tilde) const {
  // <theta^vee, beta> = sum_i c_i sum_l <alpha^vee_{sigma^l rep_i}, beta>
  int v = 0;
  for (int i = 0; i < n; ++i) {
    int node = orbit_rep[i];
    for (int l = 0; l < orbit_size[i]; ++l) {
      v += theta_covee(i) * rs_tilde.pairing(node, beta_tilde);
      node = sigma[node];
    }
  }
  return v;
}

cplx AlgebraData::pair_folded_coroots(const Vec& c, const VecI& dynkin_tilde) const {
  cplx v = 0.0;
  for (int i = 0; i < n; ++i) {
    int node = orbit_rep[i];
    for (int l = 0; l < orbit_size[i]; ++l) {
      v += c(i) * double(dynkin_tilde(node));
      node = sigma[node];
    }
  }
  return v;
}

Vec AlgebraData::coroot_coeffs_from_pairings(const Vec& values) const {
  // <sum_i c_i alpha^vee_i, alpha_j> = sum_i c_i C_{ij} = values_j
  Mat Ct = cartan_folded.cast<double>().transpose().cast<cplx>();
  return Ct.colPivHouseholderQr().solve(values);
}

Vec AlgebraData::rho_covee_coeffs() const {
  return coroot_coeffs_from_pairings(Vec::Ones(n));
}

AlgebraData build_algebra(const AlgebraId& id) {
  check_supported(id);
  AlgebraData a;
  a.id = id;
  int N = id.rank_tilde;
  MatI Ct = simply_laced_cartan(id.series, N);
  a.rs_tilde = build_root_system(Ct);
  a.sigma = diagram_automorphism(id);
  // verify sigma is a diagram automorphism
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      if (Ct(a.sigma[i], a.sigma[j]) != Ct(i, j))
        throw ValidationError("permutation is not a diagram automorphism");

  // orbits, representatives in increasing node order
  a.fold_index.assign(N, -1);
  for (int i = 0; i < N; ++i) {
    if (a.fold_index[i] >= 0) continue;
    int rep = i, size = 0, node = i;
    do {
      a.fold_index[node] = static_cast<int>(a.orbit_rep.size());
      node = a.sigma[node];
      ++size;
    } while (node != i);
    a.orbit_rep.push_back(rep);
    a.orbit_size.push_back(size);
  }
  a.n = static_cast<int>(a.orbit_rep.size());

  // folded Cartan matrix: C_{ij} = sum_l Ct_{sigma^l(rep_i), rep_j}
  a.cartan_folded = MatI::Zero(a.n, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) {
      int node = a.orbit_rep[i];
      for (int l = 0; l < a.orbit_size[i]; ++l) {
        a.cartan_folded(i, j) += Ct(node, a.orbit_rep[j]);
        node = a.sigma[node];
      }
    }
  a.rs_folded = build_root_system(a.cartan_folded);

  // theta: highest root (r = 1) or highest short root (r > 1) of the folded system
  {
    int best = -1;
    for (int k = 0; k < a.rs_folded.npos(); ++k) {
      if (id.r > 1 && !a.rs_folded.is_short(k)) continue;
      if (best < 0 || a.rs_folded.heights[k] > a.rs_folded.heights[best]) best = k;
    }
    a.theta = a.rs_folded.pos[best];
    a.theta_covee = a.rs_folded.coroot(a.theta);
  }

  // affine Cartan matrix: alpha_0^vee = K - theta^vee, alpha_0 = delta - theta
  a.cartan_affine = MatI::Zero(a.n + 1, a.n + 1);
  a.cartan_affine(0, 0) = 2;
  for (int j = 0; j < a.n; ++j) {
    int t = 0;
    for (int i = 0; i < a.n; ++i) t += a.theta_covee(i) * a.cartan_folded(i, j);
    a.cartan_affine(0, j + 1) = -t;
    a.cartan_affine(j + 1, 0) = -a.rs_folded.pairing(j, a.theta);
  }
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) a.cartan_affine(i + 1, j + 1) = a.cartan_folded(i, j);

  a.kac = integer_nullvector(a.cartan_affine, 0);
  a.kac_dual = integer_nullvector(MatI(a.cartan_affine.transpose()), 0);
  a.h = a.kac.sum();
  a.h_dual = a.kac_dual.sum();
  a.exponents = a.rs_folded.exponents();

  // bipartition of the simply-laced diagram, p(node 1) = 0
  a.p_tilde.assign(N, -1);
  a.p_tilde[0] = 0;
  {
    std::vector<int> queue = {0};
    while (!queue.empty()) {
      int v = queue.back();
      queue.pop_back();
      for (int w = 0; w < N; ++w)
        if (w != v && Ct(v, w) != 0) {
          if (a.p_tilde[w] < 0) {
            a.p_tilde[w] = 1 - a.p_tilde[v];
            queue.push_back(w);
          } else if (a.p_tilde[w] == a.p_tilde[v]) {
            throw NumericError("diagram is not bipartite");
          }
        }
    }
  }

  // kappa per node
  a.kappa.assign(N, 0.0);
  for (int i = 0; i < N; ++i) {
    double p = a.p_tilde[i];
    if (id.r == 1 || (id.series == 'A') || (id.series == 'D' && id.r == 3)) {
      a.kappa[i] = p / 2.0;
    } else if (id.series == 'D' && id.r == 2) {
      int nb = N - 1;  // folded rank parameter: simply-laced rank = nb + 1
      if (i < nb - 1) a.kappa[i] = p / 4.0;
      else a.kappa[i] = (nb % 2 == 0) ? 0.5 : -0.25;
    } else if (id.series == 'E' && id.r == 2) {
      a.kappa[i] = (i == 3) ? 0.25 : p / 2.0;  // node 4 is 0-based index 3
    }
  }

  // theta^vee gradation data on the folded system
  for (int k = 0; k < a.rs_folded.npos(); ++k) {
    int g = 0;
    for (int i = 0; i < a.n; ++i) g += a.theta_covee(i) * a.rs_folded.pairing(i, a.rs_folded.pos[k]);
    a.theta_grade.push_back(g);
    if (g >= 1) {
      a.delta_u.push_back(k);
      if (a.rs_folded.is_short(k)) a.delta_u_short.push_back(k);
    }
  }
  a.dim_u = static_cast<int>(a.delta_u.size()) + (id.r > 1 ? 1 : 0);

  // spectrum of ad theta^vee on the simply-laced algebra
  {
    std::set<int> spec = {0};
    for (const auto& b : a.rs_tilde.pos) {
      int v = a.theta_pairing_tilde(b);
      spec.insert(v);
      spec.insert(-v);
    }
    a.spec_theta_covee.assign(spec.begin(), spec.end());
  }
  return a;
}

VecI weyl_reflect_tilde(const AlgebraData& alg, int node_tilde, const VecI& dynkin) {
  const MatI& C = alg.rs_tilde.cartan;
  int n = static_cast<int>(C.rows());
  if (node_tilde < 0 || node_tilde >= n) throw ValidationError("reflection index out of range");
  VecI out = dynkin;
  int mi = dynkin(node_tilde);
  for (int j = 0; j < n; ++j) out(j) -= mi * C(j, node_tilde);
  return out;
}

VecI weyl_reflect_folded(const AlgebraData& alg, int folded_index, const VecI& dynkin) {
  if (folded_index < 0 || folded_index >= alg.n)
    throw ValidationError("folded reflection index out of range");
  VecI out = dynkin;
  int node = alg.orbit_rep[folded_index];
  for (int l = 0; l < alg.orbit_size[folded_index]; ++l) {
    out = weyl_reflect_tilde(alg, node, out);
    node = alg.sigma[node];
  }
  return out;
}

VecI weyl_apply(const AlgebraData& alg, const std::vector<int>& word_folded, const VecI& dynkin) {
  VecI out = dynkin;
  for (auto it = word_folded.rbegin(); it != word_folded.rend(); ++it)
    out = weyl_reflect_folded(alg, *it, out);
  return out;
}

VecI fundamental_weight_tilde(const AlgebraData& alg, int node_tilde) {
  VecI w = VecI::Zero(alg.id.rank_tilde);
  w(node_tilde) = 1;
  return w;
}

}  // namespace operlab
