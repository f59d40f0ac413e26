#include "degloc/vw.hpp"

#include <algorithm>

#include "degloc/errors.hpp"
#include "degloc/porteous.hpp"

namespace degloc {

namespace {

Rational pow2(long e) {
  mpz_class p = 1;
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

Rational rpow(const Rational& x, long e) {
  Rational r = 1;
  for (long i = 0; i < e; ++i) r *= x;
  return r;
}

[[noreturn]] void universality_error(const std::string& s) { throw Error(ErrorKind::Universality, s); }

}  // namespace

// SWTable

void SWTable::set(const LatticeVec& beta, long j, const Rational& v) {
  S_.check_vec(beta);
  if (j < 0) schema_error("negative SW index");
  long vd = vd_beta(S_, beta);
  if (v != 0 && !higher_) {
    if (j != 0) schema_error("higher SW values need higher-SW mode");
    if (vd != 0) schema_error("SW entry with vd != 0 must vanish (beta vd = " + std::to_string(vd) + ")");
  }
  vals_[{beta, j}] = v;
}

std::optional<Rational> SWTable::get(const LatticeVec& beta, long j) const {
  auto it = vals_.find({beta, j});
  if (it == vals_.end()) return std::nullopt;
  return it->second;
}

std::optional<Rational> SWTable::lookup(const SWAtom& a) const {
  if (auto v = get(a.beta, a.j)) return v;
  // the ordinary invariant is 0 off vd = 0
  if (a.j == 0 && vd_beta(S_, a.beta) != 0) return Rational(0);
  return std::nullopt;
}

SWTable sw_table_from_file(const SurfaceFile& f, bool higher_mode) {
  SWTable t(f.data, higher_mode);
  for (auto& e : f.sw) {
    t.set(e.beta, 0, e.sw);
    if (higher_mode)
      for (size_t j = 0; j < e.higher.size(); ++j) t.set(e.beta, static_cast<long>(j), e.higher[j]);
  }
  return t;
}

Rational toric_sw(const ToricSurface& T, const LatticeVec& beta, long j, const IntegrateOptions& opt) {
  const auto& S = T.data;
  S.check_vec(beta);
  if (S.q != 0 || S.pg != 0) schema_error("toric SW needs q = pg = 0");
  long vd = vd_beta(S, beta);
  if (j < 0 || vd < 0 || j > vd) return 0;
  auto secs = T.global_sections(T.rep(beta));
  if (secs.empty()) return 0;  // |L| is empty
  long b = static_cast<long>(secs.size());
  // [S_beta]^vir = c_top(H^1(L)(1) - H^2(L)(1)) on P(H^0(L))
  std::vector<long> bp(S.rho + 1, 0);
  Expr B = sym("B", static_cast<int>(b), bp);
  Expr RL = L_rhom(S, beta, 0, 0, 0, 0, Xi{1, 0, {}, 0, 0});
  Expr ob = kdiff(ktwist(B, "h", 1), ktwist(RL, "h", 1));
  if (ob->rank != b - 1 - vd) math_error("obstruction rank disagrees with vd");
  EquivSpace X;
  X.T = &T;
  X.betas = {beta};
  X.pb = PBData{0, LatticeVec(S.rho, 0)};
  return equivariant_integrate(mul({chern(ob->rank, ob), hpow("h", j)}), X, opt).value;
}

SWTable toric_sw_table(const ToricSurface& T, const std::vector<LatticeVec>& betas, const IntegrateOptions& opt) {
  SWTable t(T.data, true);
  for (auto& b : betas) {
    long vd = vd_beta(T.data, b);
    for (long j = 0; j <= std::max(0L, vd); ++j) t.set(b, j, toric_sw(T, b, j, opt));
  }
  return t;
}

// integrand

Expr monopole_integrand(long n1, long n2, const SurfaceData& S, const LatticeVec& beta) {
  if (n1 < 0 || n2 < 0) schema_error("negative number of points");
  S.check_vec(beta);
  long n = n1 + n2;
  Expr R = L_rhom(S, beta, 1, 2, n1, n2, Xi{1, 0, {}, 0, 0});
  Expr num1 = L_rhom(S, beta, 2, 1, n2, n1, Xi{-1, 1, {}, 1, 0});
  Expr num2 = L_rhom(S, beta, 1, 2, n1, n2, Xi{1, -1, {}, -1, 0});
  Expr den1 = L_rhom(S, beta, 1, 1, n1, n1, Xi{0, 1, {}, 1, 0}, true);
  Expr den2 = L_rhom(S, beta, 2, 2, n2, n2, Xi{0, 1, {}, 1, 0});
  Expr den3 = L_rhom(S, beta, 2, 1, n2, n1, Xi{-1, 2, {}, 2, 0});
  return mul({chern(n, kneg(R)), euler(num1), euler(num2), euler(kneg(den1)), euler(kneg(den2)), euler(kneg(den3))});
}

long integrand_degree(const Expr& A) {
  switch (A->kind) {
    case NodeKind::Chern: return A->p.at(0);
    case NodeKind::Euler: return A->kids[0]->rank;
    case NodeKind::Mul: {
      long d = 0;
      for (auto& k : A->kids) d += integrand_degree(k);
      return d;
    }
    case NodeKind::HPow: return A->p.at(0);
    case NodeKind::Scalar: return 0;
    default: schema_error(std::string("no degree for node ") + kind_name(A->kind));
  }
}

Rational monopole_n0(const SurfaceData& S, const LatticeVec& beta) {
  long a = riemann_roch_chi(S, vec_add(beta, vec_scale(S.K, -1)));
  long b = riemann_roch_chi(S, vec_add(vec_scale(S.K, 2), vec_scale(beta, -1)));
  Rational v = pow2(-b);
  return a % 2 ? -v : v;
}

Rational point_integral(const ToricSurface& T, const LatticeVec& beta, long n1, long n2, const IntegrateOptions& opt) {
  EquivSpace X;
  X.T = &T;
  X.n1 = static_cast<int>(n1);
  X.n2 = static_cast<int>(n2);
  X.betas = {beta};
  return equivariant_integrate(monopole_integrand(n1, n2, T.data, beta), X, opt).value;
}

Rational point_contribution(const ToricSurface& T, const LatticeVec& beta, long n, const IntegrateOptions& opt) {
  Rational s = 0;
  for (long n1 = 0; n1 <= n; ++n1) s += point_integral(T, beta, n1, n - n1, opt);
  return s;
}

MonopoleResult monopole_contribution(const ToricSurface& T, const SWTable& sw, const LatticeVec& beta, long n, bool refined,
                                     const IntegrateOptions& opt) {
  const auto& S = T.data;
  S.check_vec(beta);
  if (n < 0) schema_error("negative n");
  MonopoleResult r;
  r.beta = beta;
  r.n = n;
  r.refined = refined;
  long vd = vd_beta(S, beta);
  r.t_power = refined ? vd : 0;
  r.meta = {{"surface", S.name}, {"vd", vd}, {"q", S.q}, {"seed", opt.seed}, {"c0", opt.c0}};
  if (vd != 0) {
    r.value = 0;
    r.meta["note"] = "SW_beta = 0 for vd != 0";
    return r;
  }
  auto s = sw.get(beta, 0);
  if (!s) schema_error("missing SW entry for beta");
  r.meta["sw"] = s->get_str();
  Rational total = 0;
  for (long n1 = 0; n1 <= n; ++n1) {
    Rational v = point_integral(T, beta, n1, n - n1, opt);
    if (refined) {
      // homogeneous of degree vd in t: compare against a second value of t
      IntegrateOptions o2 = opt;
      o2.c0 = opt.c0 + 1;
      Rational w = point_integral(T, beta, n1, n - n1, o2);
      if (w * rpow(Rational(opt.c0), vd) != v * rpow(Rational(o2.c0), vd)) math_error("integral is not homogeneous in t");
    }
    r.parts.push_back({{n1, n - n1}, v});
    total += v;
  }
  r.value = *s * total * pow2(2 * S.q);
  return r;
}

// universality

Invariants invariants_of(const SurfaceData& S, const LatticeVec& beta) {
  S.check_vec(beta);
  return {S.K2(), S.e, S.dot(beta, beta), -S.dot(S.K, beta)};
}

namespace {

const char* kVars[4] = {"c1sq", "c2", "betasq", "c1beta"};

long var(const Invariants& x, int i) {
  switch (i) {
    case 0: return x.c1sq;
    case 1: return x.c2;
    case 2: return x.betasq;
    default: return x.c1beta;
  }
}

// exponent vectors of total degree <= d, graded
std::vector<std::array<int, 4>> monomials(int d) {
  std::vector<std::array<int, 4>> out;
  for (int t = 0; t <= d; ++t)
    for (int a = t; a >= 0; --a)
      for (int b = t - a; b >= 0; --b)
        for (int c = t - a - b; c >= 0; --c) out.push_back({a, b, c, t - a - b - c});
  return out;
}

std::string mono_name(const std::array<int, 4>& e) {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    if (!e[i]) continue;
    if (!s.empty()) s += "*";
    s += kVars[i];
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

Rational mono_value(const std::array<int, 4>& e, const Invariants& x) {
  Rational v = 1;
  for (int i = 0; i < 4; ++i) v *= rpow(Rational(var(x, i)), e[i]);
  return v;
}

std::array<int, 4> parse_mono(const std::string& s) {
  std::array<int, 4> e{};
  if (s == "1") return e;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t star = s.find('*', pos);
    std::string f = s.substr(pos, star == std::string::npos ? std::string::npos : star - pos);
    int k = 1;
    if (auto c = f.find('^'); c != std::string::npos) {
      k = std::stoi(f.substr(c + 1));
      f = f.substr(0, c);
    }
    int i = 0;
    while (i < 4 && f != kVars[i]) ++i;
    if (i == 4) schema_error("unknown monomial factor '" + f + "'");
    e[i] += k;
    if (star == std::string::npos) break;
    pos = star + 1;
  }
  return e;
}

}  // namespace

Rational FitResult::eval(const Invariants& x) const {
  Rational v = 0;
  for (auto& [m, c] : coeffs) v += c * mono_value(parse_mono(m), x);
  return v;
}

nlohmann::json FitResult::to_json() const {
  nlohmann::json c = nlohmann::json::object();
  for (auto& m : monomials) c[m] = coeffs.at(m).get_str();
  return {{"n", n}, {"degree_bound", degree}, {"runs", runs}, {"residual", "0"}, {"coefficients", c}};
}

FitResult universality_fit(int n, const std::vector<FitRun>& runs) {
  if (n < 0) schema_error("negative n");
  for (size_t i = 0; i < runs.size(); ++i)
    for (size_t j = i + 1; j < runs.size(); ++j)
      if (runs[i].inv == runs[j].inv && runs[i].value != runs[j].value)
        universality_error("universality violated: " + runs[i].label + " and " + runs[j].label +
                           " share invariants but differ");
  auto ms = monomials(n);
  size_t m = ms.size(), rows = runs.size();
  // augmented system
  std::vector<std::vector<Rational>> M(rows, std::vector<Rational>(m + 1));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t k = 0; k < m; ++k) M[i][k] = mono_value(ms[k], runs[i].inv);
    M[i][m] = runs[i].value;
  }
  std::vector<size_t> piv;
  size_t r = 0;
  for (size_t c = 0; c < m && r < rows; ++c) {
    size_t p = r;
    while (p < rows && M[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(M[p], M[r]);
    for (size_t k = c + 1; k <= m; ++k) M[r][k] /= M[r][c];
    M[r][c] = 1;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || M[i][c] == 0) continue;
      Rational f = M[i][c];
      for (size_t k = c; k <= m; ++k) M[i][k] -= f * M[r][k];
    }
    piv.push_back(c);
    ++r;
  }
  if (r < m)
    schema_error("insufficient surface spread: rank " + std::to_string(r) + " of " + std::to_string(m) + " monomials");
  for (size_t i = r; i < rows; ++i)
    if (M[i][m] != 0) universality_error("universality violated: nonzero residual in run " + std::to_string(i));
  FitResult f;
  f.n = n;
  f.degree = n;
  f.runs = rows;
  for (size_t k = 0; k < m; ++k) {
    f.monomials.push_back(mono_name(ms[k]));
    f.coeffs[f.monomials.back()] = M[k][m];
  }
  return f;
}

std::vector<FitConfig> default_fit_configs(int n) {
  std::vector<FitConfig> c = {
      {"P2", {0}},          {"P2", {1}},          {"P2", {2}},          {"P1xP1", {0, 0}},    {"P1xP1", {1, 0}},
      {"P1xP1", {1, 1}},    {"F1", {0, 1}},       {"P2+P2", {0, 0}},    {"P2+P2", {1, 0}},    {"P2+P2", {1, 1}},
  };
  if (n >= 2) {
    std::vector<FitConfig> more = {
        {"P2", {-1}},          {"P2", {3}},              {"P1xP1", {2, 1}},        {"P1xP1", {-1, 1}},
        {"F1", {1, 0}},        {"F1", {1, 1}},           {"F2", {1, 1}},           {"P2+P2", {2, 0}},
        {"P2+P2", {-1, 1}},    {"P2+P1xP1", {0, 0, 0}},  {"P2+P1xP1", {1, 1, 0}},  {"P2+P1xP1", {0, 1, 1}},
        {"P2+P1xP1", {1, 0, 1}}, {"P1xP1+P1xP1", {0, 0, 0, 0}}, {"P2+P2+P2", {0, 0, 0}}, {"P2+P2+P2", {1, 1, 0}},
    };
    c.insert(c.end(), more.begin(), more.end());
  }
  return c;
}

std::vector<FitRun> fit_runs(int n, const std::vector<FitConfig>& configs, const IntegrateOptions& opt) {
  std::vector<FitRun> out;
  for (auto& cf : configs) {
    auto T = toric_builtin(cf.surface);
    std::string label = cf.surface + " beta=(";
    for (size_t i = 0; i < cf.beta.size(); ++i) label += (i ? "," : "") + std::to_string(cf.beta[i]);
    label += ")";
    Rational z = point_contribution(T, cf.beta, n, opt);
    out.push_back({label, invariants_of(T.data, cf.beta), z / monopole_n0(T.data, cf.beta)});
  }
  return out;
}

MonopoleResult monopole_from_fit(const SurfaceData& S, const SWTable& sw, const LatticeVec& beta, long n, const FitResult& fit) {
  S.check_vec(beta);
  if (fit.n != n) schema_error("fit was made for a different n");
  MonopoleResult r;
  r.beta = beta;
  r.n = n;
  long vd = vd_beta(S, beta);
  r.meta = {{"surface", S.name}, {"vd", vd}, {"q", S.q}, {"source", "universality fit"}, {"fit_runs", fit.runs}};
  if (vd != 0) {
    r.value = 0;
    r.meta["note"] = "SW_beta = 0 for vd != 0";
    return r;
  }
  auto s = sw.get(beta, 0);
  if (!s) schema_error("missing SW entry for beta");
  r.meta["sw"] = s->get_str();
  r.value = *s * monopole_n0(S, beta) * fit.eval(invariants_of(S, beta)) * pow2(2 * S.q);
  return r;
}

}  // namespace degloc
