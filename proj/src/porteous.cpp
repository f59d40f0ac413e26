#include "degloc/porteous.hpp"

#include <algorithm>

#include "degloc/bundles.hpp"
#include "degloc/errors.hpp"

namespace degloc {

PorteousResult degeneracy_pushforward_X(int e0, int e1, int r, const ChernSeries& E, int dimX) {
  if (r < 1 || r > e0) schema_error("degeneracy locus needs 1 <= r <= rank E0");
  if (e1 - e0 + r < 0) math_error("negative expected codimension");
  return {delta_det(r, e1 - e0 + r, E), dimX - r * (e1 - e0 + r)};
}

namespace {

Expr U_split(int r, const std::string& h) {
  std::vector<Expr> lines;
  for (int i = 1; i <= r; ++i) lines.push_back(ktwist(trivial(1), gr_gen(h, r, i), -1));
  return lines.size() == 1 ? lines[0] : ksum(lines);
}

Expr Udual_tensor(const Expr& G, int r, const std::string& h) {
  std::vector<Expr> parts;
  for (int i = 1; i <= r; ++i) parts.push_back(ktwist(G, gr_gen(h, r, i), 1));
  return parts.size() == 1 ? parts[0] : ksum(parts);
}

long chi_of(const SurfaceData& S, const LatticeVec& beta, const Xi& xi) {
  LatticeVec c(S.rho, 0);
  c = vec_add(c, vec_scale(beta, xi.l));
  c = vec_add(c, vec_scale(S.K, xi.k));
  if (!xi.D.empty()) c = vec_add(c, xi.D);
  return riemann_roch_chi(S, c);
}

Xi xi_L(long li = 0) {
  Xi x;
  x.l = 1;
  x.li = li;
  return x;
}

SWAtom sw_atom(const SurfaceData& S, const LatticeVec& beta, long j) {
  SWAtom a;
  a.j = j;
  a.chiO = S.chiO;
  a.q = S.q;
  a.pg = S.pg;
  a.vd = vd_beta(S, beta);
  a.beta = beta;
  a.K = S.K;
  return a;
}

void put_common(Formula& f, long n1, long n2, const SurfaceData& S, const LatticeVec& beta) {
  f.meta["n1"] = n1;
  f.meta["n2"] = n2;
  f.meta["vd"] = vd_beta(S, beta);
  f.meta["chiO"] = S.chiO;
  f.meta["q"] = S.q;
  f.meta["pg"] = S.pg;
  f.vecs["beta"] = beta;
}

}  // namespace

Formula degeneracy_pushforward_GrB(int e0, int e1, int b, int r, bool esurj, const std::string& h) {
  if (r < 1 || r > b) schema_error("Grassmann bundle needs 1 <= r <= rank B");
  if (e0 < 0 || e1 < 0) schema_error("negative bundle rank");
  long c = b + e1 - e0;
  if (c < 0) math_error("negative expected codimension");
  Expr E = kdiff(sym("E0", e0), sym("E1", e1));
  Expr B = sym("B", b);
  Formula f;
  f.id = "grassmann_degeneracy";
  f.expr = delta(r, c, ksum({B, kneg(U_split(r, h)), kneg(E)}));
  if (esurj) f.alt = chern(r * c, Udual_tensor(kdiff(B, E), r, h));
  f.meta = {{"r", r}, {"e0", e0}, {"e1", e1}, {"b", b}, {"codim", r * c}};
  return f;
}

Formula comparison_factor(const Expr& G, int r, const std::string& h) {
  if (!G->is_k()) schema_error("comparison factor needs a K-class");
  if (G->rank < 0) schema_error("comparison factor needs rank(E - F) >= 0");
  if (r < 1) schema_error("comparison factor needs r >= 1");
  Formula f;
  f.id = "comparison";
  f.expr = chern(static_cast<long>(r) * G->rank, Udual_tensor(G, r, h));
  f.meta = {{"r", r}, {"g", G->rank}};
  return f;
}

Expr L_rhom(const SurfaceData& S, const LatticeVec& beta, long a, long b, long n_a, long n_b, Xi xi, bool tf) {
  if (!xi.D.empty()) S.check_vec(xi.D);
  long chi = chi_of(S, beta, xi);
  RhomLeaf r;
  // an ideal of zero points is O
  r.a = n_a == 0 ? 0 : a;
  r.b = n_b == 0 ? 0 : b;
  r.xi = std::move(xi);
  r.tf = tf;
  long rank = chi - n_a - n_b - (tf ? chi : 0);
  return rhom(r, static_cast<int>(rank));
}

Expr B_sections(const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A, long li) {
  std::vector<long> p = {li};
  p.insert(p.end(), A.begin(), A.end());
  return sym("B", static_cast<int>(riemann_roch_chi(S, vec_add(beta, A))), p);
}

Expr CO_class(const SurfaceData& S, const LatticeVec& beta, long n1, long n2, const std::string& h) {
  Expr co = kdiff(L_rhom(S, beta, 0, 0, 0, 0, xi_L()), L_rhom(S, beta, 1, 2, n1, n2, xi_L()));
  return ktwist(co, h, 1);
}

Formula points_and_curve_formula(long n1, long n2, const SurfaceData& S, const LatticeVec& beta) {
  if (S.q != 0 || S.pg != 0) schema_error("the points-and-curve formula needs q = pg = 0");
  Formula f;
  f.id = "points_and_curve";
  put_common(f, n1, n2, S, beta);
  Expr Om1 = ktwist(trivial(1), "h", -1);
  f.expr = chern(n1 + n2, ksum({kneg(Om1), kneg(L_rhom(S, beta, 1, 2, n1, n2, xi_L()))}));
  f.meta["vdim"] = n1 + n2 + riemann_roch_chi(S, beta) - 1;
  return f;
}

Formula nested_reduced_formula(long n1, long n2, const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A,
                               bool h2_vanishing_all) {
  if (!h2_vanishing_all) schema_error("reduced pushforward formula needs H^2(L) = 0 for all L in the class");
  if (n1 < 0 || n2 < 0) schema_error("negative number of points");
  long d = twist_dim_d(S, beta, A);
  Expr B = B_sections(S, beta, A);
  Expr R = L_rhom(S, beta, 1, 2, n1, n2, xi_L());
  Formula f;
  f.id = "reduced_pushforward";
  put_common(f, n1, n2, S, beta);
  f.vecs["A"] = A;
  f.expr = chern(n1 + n2 + d, kdiff(ktwist(B, "h", 1), ktwist(R, "h", 1)));
  f.meta["d"] = d;
  f.meta["b"] = B->rank;
  f.meta["chiL"] = riemann_roch_chi(S, beta);
  f.meta["vdim_red"] = riemann_roch_chi(S, beta) + n1 + n2 + S.q - 1;
  return f;
}

Formula nested_vir_comparison(long n1, long n2, const SurfaceData& S, const LatticeVec& beta) {
  Formula f;
  f.id = "comparison";
  put_common(f, n1, n2, S, beta);
  Expr co = CO_class(S, beta, n1, n2);
  if (co->rank != n1 + n2) math_error("CO class has rank " + std::to_string(co->rank));
  f.expr = cap("hilb_x_S_beta", chern(n1 + n2, co));
  f.meta["rankCO"] = co->rank;
  bool zero = std::all_of(beta.begin(), beta.end(), [](long v) { return v == 0; });
  if (zero) f.note = "beta = 0: CO = R pi_* O - Rhom(I1, I2), normalised with the R pi_* O term";
  return f;
}

Formula ell_step_formula(const std::vector<long>& n, const std::vector<LatticeVec>& beta, const SurfaceData& S,
                         const LatticeVec& A) {
  size_t l = n.size();
  if (l < 2) schema_error("l-step formula needs l >= 2");
  if (beta.size() + 1 != l) schema_error("length mismatch: need l points entries and l - 1 classes");
  int steps = static_cast<int>(l - 1);
  std::vector<Expr> red, vir;
  Formula f;
  f.id = "ell_step";
  for (int i = 0; i < steps; ++i) {
    std::string h = gr_gen("h", steps, i + 1);
    long li = i;
    Expr B = B_sections(S, beta[i], A, li);
    Expr R = L_rhom(S, beta[i], i + 1, i + 2, n[i], n[i + 1], xi_L(li));
    long b = B->rank;
    long expo = b + n[i] + n[i + 1] - S.chiO - vd_beta(S, beta[i]);
    long d = twist_dim_d(S, beta[i], A);
    if (expo != n[i] + n[i + 1] + d) math_error("l-step exponent disagrees with Riemann-Roch");
    red.push_back(chern(expo, kdiff(ktwist(B, h, 1), ktwist(R, h, 1))));
    Expr co = ktwist(kdiff(L_rhom(S, beta[i], 0, 0, 0, 0, xi_L(li)), R), h, 1);
    vir.push_back(chern(n[i] + n[i + 1], co));
    f.vecs["beta" + std::to_string(i + 1)] = beta[i];
    f.meta["d" + std::to_string(i + 1)] = d;
  }
  f.expr = red.size() == 1 ? red[0] : mul(red);
  f.alt = vir.size() == 1 ? vir[0] : mul(vir);
  f.vecs["n"] = n;
  f.vecs["A"] = A;
  return f;
}

Formula vir_from_reduced_formula(long n1, long n2, const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A) {
  Formula red = nested_reduced_formula(n1, n2, S, beta, A, true);
  Formula cf = comparison_factor(ktwist(trivial(static_cast<int>(S.pg)), "h", -1), 1);
  Formula f = red;
  f.id = "vir_from_reduced";
  f.expr = mul({cf.expr, red.expr});
  f.meta["pg"] = S.pg;
  return f;
}

SWCase parse_sw_case(const std::string& s) {
  if (s == "pg_positive") return SWCase::PgPositive;
  if (s == "pg_zero") return SWCase::PgZeroGeneral;
  if (s == "pg_zero_noneffective") return SWCase::PgZeroNoneffective;
  schema_error("unknown SW case '" + s + "' (pg_positive, pg_zero, pg_zero_noneffective)");
}

const char* sw_case_name(SWCase c) {
  switch (c) {
    case SWCase::PgPositive: return "pg_positive";
    case SWCase::PgZeroGeneral: return "pg_zero";
    case SWCase::PgZeroNoneffective: return "pg_zero_noneffective";
  }
  return "";
}

Formula sw_coupled_pushforward(SWCase c, long i, long n1, long n2, const SurfaceData& S, const LatticeVec& beta,
                               bool dual_effective) {
  if (i < 0) schema_error("negative power of h");
  long n = n1 + n2, vd = vd_beta(S, beta);
  Formula f;
  f.id = sw_case_name(c);
  put_common(f, n1, n2, S, beta);
  f.meta["i"] = i;
  f.meta["s"] = n - S.chiO - vd;
  Expr R = L_rhom(S, beta, 1, 2, n1, n2, xi_L());
  switch (c) {
    case SWCase::PgPositive:
      if (S.pg <= 0) schema_error("inconsistent flags: pg_positive case on a surface with pg = 0");
      f.expr = i > 0 ? zero() : cap("pt_L", mul({sw(sw_atom(S, beta, 0)), chern(n, kneg(R))}));
      break;
    case SWCase::PgZeroGeneral: {
      if (S.pg != 0) schema_error("inconsistent flags: pg = 0 case on a surface with pg > 0");
      Expr co = kdiff(L_rhom(S, beta, 0, 0, 0, 0, xi_L()), R);
      std::vector<Expr> terms;
      for (long j = 0; j <= n; ++j) terms.push_back(mul({chern(n - j, co), sw(sw_atom(S, beta, i + j))}));
      f.expr = add(terms);
      break;
    }
    case SWCase::PgZeroNoneffective: {
      if (S.pg != 0) schema_error("inconsistent flags: pg = 0 case on a surface with pg > 0");
      if (dual_effective) schema_error("inconsistent flags: the non-effective branch needs K - beta not effective");
      long d = n + S.q - vd;
      f.meta["d"] = d;
      f.expr = chern(d + i, kneg(R));
      break;
    }
  }
  return f;
}

DualityResult duality_rewrite(const Formula& f, const SurfaceData& S) {
  if (f.id != "pg_positive" && f.id != "pg_zero_noneffective") schema_error("unrecognized shape for the duality rewrite: '" + f.id + "'");
  auto need = [&](const char* k) {
    auto it = f.meta.find(k);
    if (it == f.meta.end()) schema_error(std::string("duality rewrite needs metadata '") + k + "'");
    return it->second;
  };
  long n1 = need("n1"), n2 = need("n2"), i = need("i");
  auto bit = f.vecs.find("beta");
  if (bit == f.vecs.end()) schema_error("duality rewrite needs the class beta");
  LatticeVec beta = bit->second, bdual = S.dual(beta);
  Expr e = transform(f.expr, [&](const Expr& x) -> std::optional<Expr> {
    if (auto r = as_rhom(*x)) {
      RhomLeaf d = *r;
      // pull back along (I1, I2, L) -> (I2, I1, K - L)
      d.a = r->b;
      d.b = r->a;
      d.xi.l = -r->xi.l;
      d.xi.k = r->xi.k + r->xi.l;
      return rhom(d, x->rank);
    }
    if (x->kind == NodeKind::SW) {
      SWAtom a = sw_data(*x);
      for (size_t k = 0; k < a.beta.size(); ++k) a.beta[k] = a.K[k] - a.beta[k];
      return sw(a);
    }
    return std::nullopt;
  });
  DualityResult r;
  r.rewritten = f;
  r.rewritten.expr = e;
  r.rewritten.meta["n1"] = n2;
  r.rewritten.meta["n2"] = n1;
  r.rewritten.vecs["beta"] = bdual;
  long n = n1 + n2, vd = vd_beta(S, beta);
  r.s = n - S.chiO - vd;
  long expo = f.id == "pg_positive" ? r.s + i : need("d") + i;
  r.sign = (expo % 2 == 0) ? 1 : -1;
  return r;
}

}  // namespace degloc
