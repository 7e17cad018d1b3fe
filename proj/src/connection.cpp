#include "operlab/connection.hpp"

#include <array>
#include <cmath>

#include "json.hpp"

namespace operlab {

namespace {

// truncated power series in u up to u^3, enough for the x^2 Laurent term
using Ser = std::array<cplx, 4>;

Ser ser_const(cplx c) { return {c, 0.0, 0.0, 0.0}; }

Ser ser_mul(const Ser& a, const Ser& b) {
  Ser out{};
  for (int p = 0; p < 4; ++p)
    for (int q = 0; p + q < 4; ++q) out[p + q] += a[p] * b[q];
  return out;
}

Ser ser_div(const Ser& a, const Ser& b) {
  if (std::abs(b[0]) < 1e-300) throw NumericError("series division by zero");
  Ser out{};
  for (int p = 0; p < 4; ++p) {
    cplx acc = a[p];
    for (int q = 0; q < p; ++q) acc -= out[q] * b[p - q];
    out[p] = acc / b[0];
  }
  return out;
}

// (1 + u)^p for arbitrary real exponent
Ser ser_binom(double p) {
  Ser out{1.0, 0.0, 0.0, 0.0};
  double c = 1.0;
  for (int q = 1; q < 4; ++q) {
    c *= (p - (q - 1)) / q;
    out[q] = c;
  }
  return out;
}

double int_binom(int n, int k) {
  double c = 1.0;
  for (int q = 1; q <= k; ++q) c *= double(n - (q - 1)) / q;
  return c;
}

}  // namespace

Vec ell_from_pairings(const AlgebraData& alg, const Vec& pairings) {
  return alg.coroot_coeffs_from_pairings(pairings);
}

Mat ell_matrix(const AlgebraData& alg, const Module& mod, const Vec& ell_coeffs) {
  return mod.cartan_diag(alg, ell_coeffs);
}

cplx weight_of_ell(const AlgebraData& alg, const Module& mod, const Vec& ell_coeffs,
                   int state) {
  return alg.pair_folded_coroots(ell_coeffs, mod.weights[state]);
}

void ConnectionSpec::validate() const {
  if (!ch) throw ValidationError("connection has no algebra attached");
  if (!(k > 0.0 && k < 1.0)) throw ValidationError("k must lie in (0,1)");
  const int r = ch->alg.id.r;
  for (size_t a = 0; a < sites.size(); ++a) {
    if (std::abs(sites[a].w) == 0.0) throw ValidationError("singularity at zero");
    for (size_t b = 0; b < a; ++b)
      if (std::abs(std::pow(sites[a].w, r) - std::pow(sites[b].w, r)) < 1e-12)
        throw ValidationError("coincident singularities (w_i^r = w_j^r)");
  }
  for (const auto& s : sites) {
    if (s.X.size() != ch->dim()) throw ValidationError("bad X coefficient size");
    if (!extended) {
      // X must lie in the invariant positive nilpotent part
      if ((ch->sigma_hat * s.X - s.X).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + s.X.norm()))
        throw ValidationError("X is not invariant under the diagram automorphism");
    } else {
      if (int(s.Xm.size()) != r) throw ValidationError("extended mode needs r grade parts");
      Vec sum = Vec::Zero(ch->dim());
      for (int m = 0; m < r; ++m) {
        const Vec& xm = s.Xm[m];
        if (xm.size() != ch->dim()) throw ValidationError("bad Xm coefficient size");
        if ((ch->grade_projector(m) * xm - xm).cwiseAbs().maxCoeff() >
            1e-9 * (1.0 + xm.norm()))
          throw ValidationError("Xm is not in the requested twist eigenspace");
        sum += xm;
      }
      if ((sum - s.X).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + sum.norm()))
        throw ValidationError("X does not equal the sum of its grade parts");
    }
    // positivity: no Cartan or lowering components
    for (int i = 0; i < ch->N; ++i)
      if (std::abs(s.X(ch->idx_H(i))) > 1e-12)
        throw ValidationError("X has a Cartan component");
    for (int p = 0; p < ch->P; ++p)
      if (std::abs(s.X(ch->idx_E(p, true))) > 1e-12)
        throw ValidationError("X has a lowering component");
  }
}

// deterministic grade-m vector of weight alpha (a short positive root of the
// folded system): project the representative root vector onto the twist
// eigenspace and scale the largest entry to one
Vec grade_root_vector(const Chevalley& ch, int folded_pos_idx, int m) {
  const AlgebraData& alg = ch.alg;
  if (m == 0) return ch.ring_pos[folded_pos_idx];
  // weight-alpha subspace: tilde roots that restrict to alpha; use the one
  // with the smallest index, then project
  const VecI& alpha = alg.rs_folded.pos[folded_pos_idx];
  for (int p = 0; p < alg.rs_tilde.npos(); ++p) {
    // restriction: fold the tilde root's coefficients onto orbits
    VecI folded = VecI::Zero(alg.n);
    for (int i = 0; i < alg.rs_tilde.rank(); ++i)
      folded(alg.fold_index[i]) += alg.rs_tilde.pos[p](i);
    if ((folded - alpha).cwiseAbs().maxCoeff() != 0) continue;
    Vec cand = ch.grade_projector(m) * ch.basis_E(p, false);
    double mx = cand.cwiseAbs().maxCoeff();
    if (mx < 1e-9) continue;
    int arg = 0;
    cand.cwiseAbs().maxCoeff(&arg);
    return Vec(cand / cand(arg));
  }
  throw ValidationError("no grade-m vector for the requested root");
}

ConnectionSpec parse_connection_json(const std::string& json_text,
                                     std::shared_ptr<const Chevalley> ch) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  ConnectionSpec spec;
  if (!j.contains("algebra") || !j.contains("k") || !j.contains("ell"))
    throw ValidationError("connection JSON needs algebra, k, ell");
  AlgebraId id = parse_algebra_id(j["algebra"].get<std::string>());
  if (ch) {
    if (!(ch->alg.id == id)) throw ValidationError("algebra mismatch with prebuilt data");
    spec.ch = std::move(ch);
  } else {
    spec.ch = std::make_shared<Chevalley>(build_chevalley(build_algebra(id)));
  }
  const AlgebraData& alg = spec.ch->alg;
  spec.k = j["k"].get<double>();
  spec.ell_pairings = Vec::Zero(alg.n);
  {
    const auto& e = j["ell"];
    if (int(e.size()) != alg.n) throw ValidationError("ell has wrong length");
    for (int i = 0; i < alg.n; ++i) {
      if (e[i].is_array())
        spec.ell_pairings(i) = cplx(e[i][0].get<double>(), e[i][1].get<double>());
      else
        spec.ell_pairings(i) = e[i].get<double>();
    }
  }
  spec.ell_coeffs = ell_from_pairings(alg, spec.ell_pairings);
  spec.extended = j.value("extended", false);
  auto parse_coeffs = [&](const nlohmann::json& obj, int grade) {
    Vec out = Vec::Zero(spec.ch->dim());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::string& key = it.key();
      if (key.rfind("alpha_", 0) != 0) throw ValidationError("bad root key: " + key);
      int idx = std::stoi(key.substr(6));
      if (idx < 0 || idx >= alg.rs_folded.npos())
        throw ValidationError("root index out of range: " + key);
      cplx c = it->is_array() ? cplx((*it)[0].get<double>(), (*it)[1].get<double>())
                              : cplx(it->get<double>(), 0.0);
      out += c * grade_root_vector(*spec.ch, idx, grade);
    }
    return out;
  };
  if (j.contains("singularities")) {
    for (const auto& s : j["singularities"]) {
      Singularity site;
      site.w = cplx(s["w"][0].get<double>(), s["w"][1].get<double>());
      if (!spec.extended) {
        site.X = parse_coeffs(s.value("X", nlohmann::json::object()), 0);
      } else {
        site.X = Vec::Zero(spec.ch->dim());
        for (int m = 0; m < alg.id.r; ++m) {
          nlohmann::json part = s.value("X" + std::to_string(m), nlohmann::json::object());
          if (m == 0 && s.contains("X")) part = s["X"];
          site.Xm.push_back(parse_coeffs(part, m));
          site.X += site.Xm.back();
        }
      }
      spec.sites.push_back(std::move(site));
    }
  }
  spec.validate();
  return spec;
}

ConnectionEval::ConnectionEval(const ConnectionSpec& spec, const Module& mod)
    : spec_(spec), mod_(mod) {
  const Chevalley& ch = *spec.ch;
  F_ = mod.act(ch, ch.f_principal());
  L_ = ell_matrix(ch.alg, mod, spec.ell_coeffs);
  V_ = mod.act(ch, ch.v_theta);
  Th_ = mod.act(ch, ch.theta_covee_elem());
  for (const auto& s : spec.sites) {
    if (!spec.extended) {
      X_.push_back(mod.act(ch, s.X));
    } else {
      // keep grade parts separate: they carry different powers of z
      for (const auto& xm : s.Xm) X_.push_back(mod.act(ch, xm));
    }
  }
}

Mat ConnectionEval::coefficient(cplx z, double argz, cplx lambda, double t) const {
  const int r = spec_.ch->alg.id.r;
  const cplx ph = std::exp(2.0 * PI * I * t);
  const cplx phr = std::exp(2.0 * PI * I * double(r) * t);
  const cplx zk = std::exp(spec_.k * (std::log(std::abs(z)) + I * argz));
  const cplx zr = std::pow(z, r);
  Mat A = F_ + L_ + (ph * z + zk * lambda) * V_;
  for (size_t j = 0; j < spec_.sites.size(); ++j) {
    const cplx wr = std::pow(spec_.sites[j].w, r);
    const cplx den = phr * zr - wr;
    if (std::abs(den) < 1e-12 * std::max(std::abs(zr), std::abs(wr)))
      throw NumericError("connection coefficient evaluated at a pole");
    const cplx factor = double(r) * phr * zr / den;
    A -= factor * Th_;
    if (!spec_.extended) {
      A += factor * X_[j];
    } else {
      for (int m = 0; m < r; ++m)
        A += factor * std::pow(ph * z / spec_.sites[j].w, m) * X_[j * r + m];
    }
  }
  return Mat(A / z);
}

OdeRhs ConnectionEval::rhs(cplx lambda, double t) const {
  return [this, lambda, t](cplx z, double argz, const Mat& Y) {
    return Mat(-coefficient(z, argz, lambda, t) * Y);
  };
}

std::vector<Vec> laurent_at_zero(const ConnectionSpec& spec, int max_order) {
  const Chevalley& ch = *spec.ch;
  const int r = ch.alg.id.r;
  std::vector<Vec> A(max_order, Vec::Zero(ch.dim()));
  A[0] += ch.v_theta;
  const Vec th = ch.theta_covee_elem();
  for (const auto& site : spec.sites) {
    for (int s = 1; r * s <= max_order + (spec.extended ? r - 1 : 0); ++s) {
      const cplx geo = -double(r) * std::pow(site.w, -r * s);
      if (!spec.extended) {
        if (r * s <= max_order) A[r * s - 1] += geo * (site.X - th);
      } else {
        if (r * s <= max_order) A[r * s - 1] += geo * (-th);
        for (int m = 0; m < r; ++m) {
          const int ord = r * s + m;
          if (ord >= 1 && ord <= max_order)
            A[ord - 1] += geo * std::pow(site.w, -m) * site.Xm[m];
        }
      }
    }
  }
  return A;
}

LaurentLocal laurent_at_singularity(const ConnectionSpec& spec, int j) {
  const Chevalley& ch = *spec.ch;
  const int r = ch.alg.id.r;
  if (j < 0 || j >= int(spec.sites.size())) throw ValidationError("site index out of range");
  const cplx w = spec.sites[j].w;

  LaurentLocal out;
  out.w = w;
  const int D = int(ch.dim());
  Vec zero = Vec::Zero(D);
  std::array<Vec, 3> cst{zero, zero, zero};  // x^0, x^1, x^2 constant parts
  std::array<Vec, 3> lin{zero, zero, zero};  // lambda-linear parts
  Vec residue = Vec::Zero(D);

  // (f + ell)/z
  {
    Vec fe = ch.f_principal() + ch.cartan_elem(spec.ell_coeffs);
    for (int p = 0; p < 3; ++p)
      cst[p] += (((p % 2) ? -1.0 : 1.0) / std::pow(w, p + 1)) * fe;
  }
  // (1 + lambda z^{k-1}) v_theta
  {
    cst[0] += ch.v_theta;
    Ser bk = ser_binom(spec.k - 1.0);
    const cplx wk1 = std::pow(w, spec.k - 1.0);
    for (int p = 0; p < 3; ++p) lin[p] += (wk1 * bk[p] / std::pow(w, p)) * ch.v_theta;
  }
  const Vec th = ch.theta_covee_elem();
  for (size_t i = 0; i < spec.sites.size(); ++i) {
    // grade decomposition of the residue datum with its (z/w_i)^m factors
    std::vector<std::pair<Ser, Vec>> parts;  // (series factor in u, element)
    if (!spec.extended) {
      parts.emplace_back(ser_const(1.0), Vec(spec.sites[i].X - th));
    } else {
      parts.emplace_back(ser_const(1.0), Vec(-th));
      for (int m = 0; m < r; ++m)
        parts.emplace_back(
            ser_mul(ser_const(std::pow(w / spec.sites[i].w, m)), ser_binom(double(m))),
            spec.sites[i].Xm[m]);
    }
    if (int(i) == j) {
      // r z^{r-1}/(z^r - w^r) = g(u)/x with z = w(1+u)
      Ser den{};  // ((1+u)^r - 1)/(r u)
      for (int p = 0; p < 4; ++p) den[p] = int_binom(r, p + 1) / double(r);
      Ser g = ser_div(ser_binom(double(r - 1)), den);
      for (const auto& [fac, elem] : parts) {
        Ser gf = ser_mul(g, fac);
        residue += gf[0] * elem;
        for (int p = 0; p < 3; ++p) cst[p] += (gf[p + 1] / std::pow(w, p + 1)) * elem;
      }
    } else {
      const cplx wir = std::pow(spec.sites[i].w, r), wjr = std::pow(w, r);
      const cplx c0 = wjr / (wjr - wir);
      Ser den{};  // 1 + c0 ((1+u)^r - 1)
      Ser bin_r = ser_binom(double(r));
      den[0] = 1.0;
      for (int p = 1; p < 4; ++p) den[p] = c0 * bin_r[p];
      Ser s = ser_div(ser_mul(ser_const(double(r) * c0 / w), ser_binom(double(r - 1))), den);
      for (const auto& [fac, elem] : parts) {
        Ser sf = ser_mul(s, fac);
        for (int p = 0; p < 3; ++p) cst[p] += (sf[p] / std::pow(w, p)) * elem;
      }
    }
  }
  out.eta = residue + th;  // residue = -theta_covee + eta
  out.a_const = cst[0];
  out.a_lin = lin[0];
  out.b_const = cst[1];
  out.b_lin = lin[1];
  out.c_const = cst[2];
  out.c_lin = lin[2];
  return out;
}

}  // namespace operlab
