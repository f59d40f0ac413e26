#include "degloc/hilbloc.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "degloc/errors.hpp"
#include "degloc/porteous.hpp"

namespace degloc {

// ------------------------------------------------------------ partitions

int Partition::size() const { return std::accumulate(parts.begin(), parts.end(), 0); }

std::vector<std::array<int, 2>> Partition::cells() const {
  std::vector<std::array<int, 2>> c;
  for (int j = 0; j < static_cast<int>(parts.size()); ++j)
    for (int i = 0; i < parts[j]; ++i) c.push_back({i, j});
  return c;
}

void Partition::check() const {
  for (size_t j = 0; j < parts.size(); ++j) {
    if (parts[j] <= 0) schema_error("partition parts must be positive");
    if (j && parts[j] > parts[j - 1]) schema_error("partition parts must be weakly decreasing");
  }
}

namespace {

void parts_rec(int n, int maxp, std::vector<int>& cur, std::vector<Partition>& out) {
  if (n == 0) {
    out.push_back({cur});
    return;
  }
  for (int p = std::min(n, maxp); p >= 1; --p) {
    cur.push_back(p);
    parts_rec(n - p, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Partition> partitions_of(int n) {
  if (n < 0) schema_error("negative partition size");
  std::vector<Partition> out;
  std::vector<int> cur;
  parts_rec(n, n, cur, out);
  return out;
}

// ------------------------------------------------------------ characters

EquivChar EquivChar::mono(const Exp3& e, long c) {
  EquivChar x;
  if (c) x.terms[e] = c;
  return x;
}

EquivChar& EquivChar::operator+=(const EquivChar& o) {
  for (auto& [e, c] : o.terms) {
    long& v = terms[e];
    v += c;
    if (!v) terms.erase(e);
  }
  return *this;
}

EquivChar& EquivChar::operator-=(const EquivChar& o) { return *this += o * -1; }
EquivChar EquivChar::operator+(const EquivChar& o) const { return EquivChar(*this) += o; }
EquivChar EquivChar::operator-(const EquivChar& o) const { return EquivChar(*this) -= o; }

EquivChar EquivChar::operator*(const EquivChar& o) const {
  EquivChar r;
  for (auto& [e, c] : terms)
    for (auto& [f, d] : o.terms) {
      Exp3 g{e[0] + f[0], e[1] + f[1], e[2] + f[2]};
      long& v = r.terms[g];
      v += c * d;
      if (!v) r.terms.erase(g);
    }
  return r;
}

EquivChar EquivChar::operator*(long c) const {
  EquivChar r;
  if (!c) return r;
  for (auto& [e, v] : terms) r.terms[e] = v * c;
  return r;
}

EquivChar EquivChar::shift(const Exp3& s) const {
  EquivChar r;
  for (auto& [e, c] : terms) r.terms[{e[0] + s[0], e[1] + s[1], e[2] + s[2]}] = c;
  return r;
}

EquivChar EquivChar::conj() const {
  EquivChar r;
  for (auto& [e, c] : terms) r.terms[{-e[0], -e[1], -e[2]}] = c;
  return r;
}

long EquivChar::rank() const {
  long r = 0;
  for (auto& [e, c] : terms) r += c;
  return r;
}

long EquivChar::num_terms() const {
  long r = 0;
  for (auto& [e, c] : terms) r += std::labs(c);
  return r;
}

bool EquivChar::movable() const { return !terms.count(Exp3{0, 0, 0}); }

std::string EquivChar::str() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, c] : terms) {
    os << (c < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    first = false;
    long a = std::labs(c);
    bool unit = e == Exp3{0, 0, 0};
    if (a != 1 || unit) os << a;
    if (!unit) os << "t^(" << e[0] << "," << e[1] << (e[2] ? "," + std::to_string(e[2]) : "") << ")";
  }
  return os.str();
}

namespace {

Exp3 ex(const Weight2& m) { return {m[0], m[1], 0}; }

// 1 - t^u
EquivChar one_minus(const Weight2& u) { return EquivChar::mono(Exp3{0, 0, 0}) - EquivChar::mono(u); }

}  // namespace

EquivChar partition_char(const Partition& mu, const Weight2& m1, const Weight2& m2) {
  EquivChar q;
  for (auto [i, j] : mu.cells()) q += EquivChar::mono(Weight2{i * m1[0] + j * m2[0], i * m1[1] + j * m2[1]});
  return q;
}

EquivChar tangent_character(const Partition& mu, const Weight2& m1, const Weight2& m2) {
  // Q + Qbar/(xy) - Q Qbar Pbar
  EquivChar Q = partition_char(mu, m1, m2), Qb = Q.conj();
  Exp3 ixy{-(m1[0] + m2[0]), -(m1[1] + m2[1]), 0};
  EquivChar Pb = one_minus({-m1[0], -m1[1]}) * one_minus({-m2[0], -m2[1]});
  return Q + Qb.shift(ixy) - Q * Qb * Pb;
}

EquivChar rhom_finite(const Partition& mu, const Partition& nu, const Weight2& m1, const Weight2& m2, const Exp3& xi) {
  // xi (-Q_nu - Qbar_mu/(xy) + Qbar_mu Q_nu Pbar)
  EquivChar Qa = partition_char(mu, m1, m2).conj(), Qb = partition_char(nu, m1, m2);
  Exp3 ixy{-(m1[0] + m2[0]), -(m1[1] + m2[1]), 0};
  EquivChar Pb = one_minus({-m1[0], -m1[1]}) * one_minus({-m2[0], -m2[1]});
  EquivChar r = Qa * Qb * Pb - Qb - Qa.shift(ixy);
  return r.shift(xi);
}

LocalChar rhom_character(const Partition& mu, const Partition& nu, const Weight2& m1, const Weight2& m2, const Exp3& xi) {
  EquivChar P = one_minus(m1) * one_minus(m2);
  return {EquivChar::mono(xi) + P * rhom_finite(mu, nu, m1, m2, xi), {m1, m2}};
}

namespace {

bool canonical_dir(const Weight2& u) { return u[0] > 0 || (u[0] == 0 && u[1] > 0); }

// exact division by 1 - t^u, u primitive
EquivChar divide_one_minus(const EquivChar& N, const Weight2& u) {
  // f with f(u) = 1 gives the position along lines parallel to u
  long a = u[0], b = u[1], x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    long q = a / b, t = a - q * b;
    a = b, b = t;
    t = x0 - q * x1, x0 = x1, x1 = t;
    t = y0 - q * y1, y0 = y1, y1 = t;
  }
  if (a < 0) a = -a, x0 = -x0, y0 = -y0;
  if (a != 1) math_error("assembly failure: edge direction is not primitive");
  std::map<std::array<long, 2>, std::map<long, std::pair<Exp3, long>>> lines;
  for (auto& [e, c] : N.terms) lines[{e[0] * u[1] - e[1] * u[0], e[2]}][e[0] * x0 + e[1] * y0] = {e, c};
  EquivChar Q;
  for (auto& [key, pts] : lines) {
    long acc = 0, kmin = pts.begin()->first, kmax = pts.rbegin()->first;
    Exp3 m = pts.begin()->second.first;
    for (long k = kmin; k <= kmax; ++k) {
      auto f = pts.find(k);
      if (f != pts.end()) acc += f->second.second;
      if (k == kmax) break;
      if (acc) Q.terms[m] = acc;
      m = {m[0] + u[0], m[1] + u[1], m[2]};
    }
    if (acc) math_error("assembly failure: denominators do not cancel");
  }
  return Q;
}

}  // namespace

EquivChar assemble(const std::vector<LocalChar>& parts) {
  std::vector<LocalChar> norm;
  std::vector<Weight2> dirs;
  for (auto lc : parts) {
    for (auto& u : lc.den) {
      if (u[0] == 0 && u[1] == 0) math_error("assembly failure: zero edge direction");
      if (!canonical_dir(u)) {
        // 1/(1 - t^u) = -t^{-u}/(1 - t^{-u})
        lc.num = lc.num.shift({-u[0], -u[1], 0}) * -1;
        u = {-u[0], -u[1]};
      }
      if (std::find(dirs.begin(), dirs.end(), u) == dirs.end()) dirs.push_back(u);
    }
    norm.push_back(std::move(lc));
  }
  EquivChar N;
  for (auto& lc : norm) {
    EquivChar t = lc.num;
    std::vector<Weight2> have = lc.den;
    for (auto& u : dirs) {
      auto it = std::find(have.begin(), have.end(), u);
      if (it != have.end()) {
        have.erase(it);
        continue;
      }
      t = t * one_minus(u);
    }
    if (!have.empty()) math_error("assembly failure: repeated edge direction in one chart");
    N += t;
  }
  for (auto& u : dirs) N = divide_one_minus(N, u);
  return N;
}

// ------------------------------------------------------------ fixed points

namespace {

void distribute(int charts, int n, std::vector<Partition>& cur, std::vector<std::vector<Partition>>& out) {
  int k = static_cast<int>(cur.size());
  if (k == charts - 1) {
    for (auto& p : partitions_of(n)) {
      cur.push_back(p);
      out.push_back(cur);
      cur.pop_back();
    }
    return;
  }
  for (int m = n; m >= 0; --m)
    for (auto& p : partitions_of(m)) {
      cur.push_back(p);
      distribute(charts, n - m, cur, out);
      cur.pop_back();
    }
}

std::vector<std::vector<Partition>> tuples(int charts, int n) {
  std::vector<std::vector<Partition>> out;
  std::vector<Partition> cur;
  if (charts <= 0) schema_error("no charts");
  distribute(charts, n, cur, out);
  return out;
}

}  // namespace

std::vector<NestedFixedPoint> enumerate_fixed_points(const ToricSurface& T, int n1, int n2, int pb_lines) {
  if (n1 < 0 || n2 < 0) schema_error("negative number of points");
  if (pb_lines < 0) schema_error("negative number of weight lines");
  int e = static_cast<int>(T.charts.size());
  auto A = tuples(e, n1), B = tuples(e, n2);
  std::vector<NestedFixedPoint> out;
  for (auto& a : A)
    for (auto& b : B) {
      if (pb_lines == 0) {
        out.push_back({a, b, -1});
      } else {
        for (int k = 0; k < pb_lines; ++k) out.push_back({a, b, k});
      }
    }
  return out;
}

// ------------------------------------------------------------ specialisation

namespace {

// polynomials in s, index = power
using SPoly = std::vector<Rational>;

void trim(SPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

SPoly padd(const SPoly& a, const SPoly& b) {
  SPoly r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  trim(r);
  return r;
}

SPoly pmul(const SPoly& a, const SPoly& b) {
  if (a.empty() || b.empty()) return {};
  SPoly r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  trim(r);
  return r;
}

SPoly pscale(const SPoly& a, const Rational& c) {
  if (c == 0) return {};
  SPoly r = a;
  for (auto& x : r) x *= c;
  return r;
}

SPoly pconst(const Rational& c) { return c == 0 ? SPoly{} : SPoly{c}; }

struct Frac {
  SPoly n{Rational(1)}, d{Rational(1)};
};

bool is_one(const SPoly& p) { return p.size() == 1 && p[0] == 1; }

Frac fmul(const Frac& a, const Frac& b) {
  Frac r;
  r.n = pmul(a.n, b.n);
  if (r.n.empty()) {
    r.d = {Rational(1)};
    return r;
  }
  r.d = is_one(a.d) ? b.d : is_one(b.d) ? a.d : pmul(a.d, b.d);
  return r;
}

Frac fadd(const Frac& a, const Frac& b) {
  if (a.n.empty()) return b;
  if (b.n.empty()) return a;
  Frac r;
  if (a.d == b.d) {
    r.n = padd(a.n, b.n);
    r.d = a.d;
  } else {
    r.n = padd(pmul(a.n, b.d), pmul(b.n, a.d));
    r.d = pmul(a.d, b.d);
  }
  if (r.n.empty()) r.d = {Rational(1)};
  return r;
}

Frac fconst(const Rational& c) {
  Frac r;
  r.n = pconst(c);
  return r;
}

struct Collision {};

struct Specialization {
  long a = 1, b = 1, c0 = 1;
  SPoly weight(const Exp3& e) const {
    SPoly w{Rational(e[2] * c0), Rational(a * e[0] + b * e[1])};
    trim(w);
    return w;
  }
  // weight that may sit in a denominator
  SPoly denom_weight(const Exp3& e) const {
    SPoly w = weight(e);
    if (w.empty()) {
      if (e == Exp3{0, 0, 0}) math_error("non-isolated or non-generic weights: zero weight in a denominator");
      throw Collision{};
    }
    return w;
  }
};

Rational binom_gen(long n, long j) {
  Rational r = 1;
  for (long i = 0; i < j; ++i) r = r * Rational(n - i) / Rational(i + 1);
  return r;
}

// c_0..c_k of a virtual character
std::vector<SPoly> chern_series(const EquivChar& V, long k, const Specialization& sp) {
  std::vector<SPoly> c(k + 1);
  c[0] = {Rational(1)};
  for (auto& [e, n] : V.terms) {
    SPoly w = sp.weight(e);
    if (w.empty()) continue;
    std::vector<SPoly> f(k + 1);
    SPoly wp{Rational(1)};
    for (long j = 0; j <= k; ++j) {
      f[j] = pscale(wp, binom_gen(n, j));
      wp = pmul(wp, w);
    }
    std::vector<SPoly> r(k + 1);
    for (long i = 0; i <= k; ++i) {
      if (c[i].empty()) continue;
      for (long j = 0; i + j <= k; ++j)
        if (!f[j].empty()) r[i + j] = padd(r[i + j], pmul(c[i], f[j]));
    }
    c = std::move(r);
  }
  return c;
}

Frac euler_of(const EquivChar& V, const Specialization& sp) {
  Frac r;
  for (auto& [e, n] : V.terms) {
    if (n > 0) {
      SPoly w = sp.weight(e);
      if (w.empty()) {
        if (e == Exp3{0, 0, 0}) return fconst(0);
        throw Collision{};
      }
      for (long i = 0; i < n; ++i) r.n = pmul(r.n, w);
    } else {
      SPoly w = sp.denom_weight(e);
      for (long i = 0; i < -n; ++i) r.d = pmul(r.d, w);
    }
  }
  return r;
}

SPoly det(std::vector<std::vector<SPoly>> M) {
  size_t n = M.size();
  if (n == 0) return {Rational(1)};
  if (n == 1) return M[0][0];
  SPoly r;
  for (size_t j = 0; j < n; ++j) {
    if (M[0][j].empty()) continue;
    std::vector<std::vector<SPoly>> m;
    for (size_t i = 1; i < n; ++i) {
      std::vector<SPoly> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(M[i][k]);
      m.push_back(std::move(row));
    }
    SPoly t = pmul(M[0][j], det(std::move(m)));
    r = padd(r, j % 2 ? pscale(t, -1) : t);
  }
  return r;
}

// ------------------------------------------------------------ evaluator

struct Ctx {
  const EquivSpace& X;
  std::vector<std::pair<int, Weight2>> pb_sections;
  // global R pi_* xi, keyed by the per-chart fiber characters
  std::map<std::vector<Exp3>, EquivChar> chi_cache;

  explicit Ctx(const EquivSpace& x) : X(x) {
    if (X.pb) {
      if (X.pb->li < 0 || X.pb->li >= static_cast<long>(X.betas.size())) schema_error("P(B) refers to a missing class");
      pb_sections = X.T->global_sections(X.T->rep(vec_add(X.betas[X.pb->li], X.pb->A)));
      if (pb_sections.empty()) schema_error("P(B) with B = 0");
    }
  }

  std::vector<Exp3> xi_chars(const Xi& xi) const {
    const ToricSurface& T = *X.T;
    if (xi.li < 0 || (xi.l != 0 && xi.li >= static_cast<long>(X.betas.size())))
      schema_error("Rhom leaf refers to a missing class");
    DivisorRep a(T.num_rays(), 0);
    if (xi.l) {
      auto r = T.rep(X.betas[xi.li]);
      for (int i = 0; i < T.num_rays(); ++i) a[i] += xi.l * r[i];
    }
    if (xi.k) {
      auto r = T.canonical_rep();
      for (int i = 0; i < T.num_rays(); ++i) a[i] += xi.k * r[i];
    }
    if (!xi.D.empty()) {
      auto r = T.rep(xi.D);
      for (int i = 0; i < T.num_rays(); ++i) a[i] += r[i];
    }
    std::vector<Exp3> out;
    for (auto& c : T.charts) {
      Weight2 m = T.fiber_char(c, a);
      out.push_back({m[0], m[1], xi.t});
    }
    return out;
  }

  EquivChar chi_global(const std::vector<Exp3>& xs) {
    auto it = chi_cache.find(xs);
    if (it != chi_cache.end()) return it->second;
    std::vector<LocalChar> parts;
    for (size_t i = 0; i < xs.size(); ++i) parts.push_back({EquivChar::mono(xs[i]), {X.T->charts[i].m1, X.T->charts[i].m2}});
    auto r = assemble(parts);
    chi_cache.emplace(xs, r);
    return r;
  }

  void prepare(const Expr& e) {
    if (auto r = as_rhom(*e)) chi_global(xi_chars(r->xi));
    for (auto& k : e->kids) prepare(k);
  }

  const EquivChar& chi_cached(const std::vector<Exp3>& xs) const {
    auto it = chi_cache.find(xs);
    if (it == chi_cache.end()) schema_error("internal: character not prepared");
    return it->second;
  }
};

Weight2 pb_weight(const Ctx& cx, const NestedFixedPoint& p) {
  if (p.pb < 0) schema_error("h used without a P(B) factor");
  return cx.pb_sections.at(p.pb).second;
}

EquivChar tangent_at(const EquivSpace& X, const std::vector<std::pair<int, Weight2>>& secs, const NestedFixedPoint& p) {
  EquivChar T;
  const auto& ch = X.T->charts;
  for (size_t c = 0; c < ch.size(); ++c) {
    T += tangent_character(p.mu[c], ch[c].m1, ch[c].m2);
    T += tangent_character(p.nu[c], ch[c].m1, ch[c].m2);
  }
  if (p.pb >= 0) {
    Weight2 m0 = secs.at(p.pb).second;
    for (int k = 0; k < static_cast<int>(secs.size()); ++k)
      if (k != p.pb) T += EquivChar::mono(Weight2{secs[k].second[0] - m0[0], secs[k].second[1] - m0[1]});
  }
  return T;
}

EquivChar kchar(const Expr& e, const Ctx& cx, const NestedFixedPoint& p) {
  switch (e->kind) {
    case NodeKind::Sym: {
      if (auto r = as_rhom(*e)) {
        auto xs = cx.xi_chars(r->xi);
        EquivChar v = cx.chi_cached(xs);
        if (r->tf) v = EquivChar();
        const auto& ch = cx.X.T->charts;
        static const Partition empty;
        auto pick = [&](long idx, size_t c) -> const Partition& {
          if (idx == 0) return empty;
          if (idx == 1) return p.mu[c];
          if (idx == 2) return p.nu[c];
          schema_error("Rhom leaf with ideal index " + std::to_string(idx) + " outside the 2-step space");
        };
        for (size_t c = 0; c < ch.size(); ++c) v += rhom_finite(pick(r->a, c), pick(r->b, c), ch[c].m1, ch[c].m2, xs[c]);
        return v;
      }
      if (e->name == "B") {
        LatticeVec cls;
        if (e->p.empty()) {
          if (!cx.X.pb) schema_error("leaf B without P(B) data");
          cls = vec_add(cx.X.betas[cx.X.pb->li], cx.X.pb->A);
        } else {
          long li = e->p[0];
          if (li < 0 || li >= static_cast<long>(cx.X.betas.size())) schema_error("leaf B refers to a missing class");
          cls = vec_add(cx.X.betas[li], LatticeVec(e->p.begin() + 1, e->p.end()));
        }
        EquivChar v;
        for (auto& [comp, m] : cx.X.T->global_sections(cx.X.T->rep(cls))) v += EquivChar::mono(m);
        if (v.rank() != e->rank) math_error("leaf B: sections do not match the declared rank");
        return v;
      }
      if (e->name == "TX") return tangent_at(cx.X, cx.pb_sections, p);
      schema_error("no equivariant model for leaf '" + e->name + "'");
    }
    case NodeKind::Trivial: return EquivChar::mono(Exp3{0, 0, 0}, e->rank);
    case NodeKind::Sum: {
      EquivChar v;
      for (auto& k : e->kids) v += kchar(k, cx, p);
      return v;
    }
    case NodeKind::Neg: return kchar(e->kids[0], cx, p) * -1;
    case NodeKind::Dual: return kchar(e->kids[0], cx, p).conj();
    case NodeKind::Twist: {
      if (e->name != "h") schema_error("twist by '" + e->name + "' has no equivariant model");
      Weight2 m0 = pb_weight(cx, p);
      long m = e->p[0];
      return kchar(e->kids[0], cx, p).shift({-m * m0[0], -m * m0[1], 0});
    }
    default: schema_error(std::string("expected a K-class, got ") + kind_name(e->kind));
  }
}

Frac value(const Expr& e, const Ctx& cx, const NestedFixedPoint& p, const Specialization& sp) {
  switch (e->kind) {
    case NodeKind::Chern: {
      long k = e->p[0];
      if (k < 0) return fconst(0);
      auto c = chern_series(kchar(e->kids[0], cx, p), k, sp);
      Frac r;
      r.n = c[k];
      if (r.n.empty()) r.d = {Rational(1)};
      return r;
    }
    case NodeKind::Euler: return euler_of(kchar(e->kids[0], cx, p), sp);
    case NodeKind::Delta: {
      long a = e->p[0], b = e->p[1];
      if (a <= 0) return fconst(1);
      if (b < 0) return fconst(0);
      auto c = chern_series(kchar(e->kids[0], cx, p), a + b, sp);
      std::vector<std::vector<SPoly>> M(a, std::vector<SPoly>(a));
      for (long i = 0; i < a; ++i)
        for (long j = 0; j < a; ++j) {
          long idx = b + j - i;
          if (idx >= 0 && idx <= a + b) M[i][j] = c[idx];
        }
      Frac r;
      r.n = det(std::move(M));
      return r;
    }
    case NodeKind::Mul: {
      Frac r;
      for (auto& k : e->kids) {
        r = fmul(r, value(k, cx, p, sp));
        if (r.n.empty()) break;
      }
      return r;
    }
    case NodeKind::Add: {
      Frac r = fconst(0);
      for (auto& k : e->kids) r = fadd(r, value(k, cx, p, sp));
      return r;
    }
    case NodeKind::Scalar: return fconst(e->q);
    case NodeKind::Zero: return fconst(0);
    case NodeKind::HPow: {
      if (e->name != "h") schema_error("power of '" + e->name + "' has no equivariant model");
      Weight2 m0 = pb_weight(cx, p);
      SPoly h = pscale(sp.weight(ex(m0)), -1);
      Frac r;
      for (long i = 0; i < e->p[0]; ++i) r.n = pmul(r.n, h);
      if (r.n.empty()) r.d = {Rational(1)};
      return r;
    }
    case NodeKind::Push:
    case NodeKind::Cap: return value(e->kids[0], cx, p, sp);
    case NodeKind::SW: {
      SWAtom a = sw_data(*e);
      if (!cx.X.sw) schema_error("missing SW entry: no SW table supplied");
      auto v = cx.X.sw(a);
      if (!v) schema_error("missing SW entry for beta = " + nlohmann::json(a.beta).dump());
      return fconst(*v);
    }
    default: schema_error(std::string("expected a class, got a K-class node ") + kind_name(e->kind));
  }
}

// coefficients of s^j, j <= 0, of N / D
void expand_into(const Frac& f, SLaurent& acc) {
  if (f.n.empty()) return;
  size_t v = 0;
  while (v < f.d.size() && f.d[v] == 0) ++v;
  if (v == f.d.size()) math_error("non-isolated or non-generic weights: vanishing denominator");
  // 1 / (d / s^v) up to s^v
  SPoly d0(f.d.begin() + v, f.d.end());
  SPoly inv(v + 1);
  inv[0] = Rational(1) / d0[0];
  for (size_t i = 1; i <= v; ++i) {
    Rational s = 0;
    for (size_t j = 1; j <= i && j < d0.size(); ++j) s += d0[j] * inv[i - j];
    inv[i] = -s / d0[0];
  }
  for (size_t k = 0; k <= v; ++k) {
    Rational c = 0;
    for (size_t j = 0; j <= k && j < f.n.size(); ++j) c += f.n[j] * inv[k - j];
    if (c != 0) acc[static_cast<int>(k) - static_cast<int>(v)] += c;
  }
}

std::pair<long, long> draw_direction(std::mt19937& rng) {
  std::uniform_int_distribution<long> u(-61, 61);
  for (;;) {
    long a = u(rng), b = u(rng);
    if (a == 0 || b == 0 || a == b || a == -b) continue;
    if (std::gcd(std::labs(a), std::labs(b)) != 1) continue;
    return {a, b};
  }
}

}  // namespace

int EquivSpace::dim() const {
  int d = 2 * (n1 + n2);
  if (pb) d += static_cast<int>(T->global_sections(T->rep(vec_add(betas.at(pb->li), pb->A))).size()) - 1;
  return d;
}

Rational nonequivariant_limit(const SLaurent& x) {
  for (auto& [j, c] : x)
    if (j < 0 && c != 0) math_error("integral not equivariantly constant: surviving pole of order " + std::to_string(-j));
  auto it = x.find(0);
  return it == x.end() ? Rational(0) : it->second;
}

EquivChar space_tangent(const EquivSpace& X, const NestedFixedPoint& p) {
  Ctx cx(X);
  return tangent_at(X, cx.pb_sections, p);
}

EquivChar k_character(const Expr& k, const EquivSpace& X, const NestedFixedPoint& p) {
  if (!X.T) schema_error("characters need a toric surface");
  Ctx cx(X);
  cx.prepare(k);
  return kchar(k, cx, p);
}

IntegrateResult equivariant_integrate(const Expr& e, const EquivSpace& X, const IntegrateOptions& opt) {
  if (!X.T) schema_error("equivariant integration needs a toric surface");
  if (X.n1 < 0 || X.n2 < 0) schema_error("negative number of points");
  if (opt.c0 == 0) schema_error("the scaling weight must be nonzero");
  Ctx cx(X);
  cx.prepare(e);
  auto pts = enumerate_fixed_points(*X.T, X.n1, X.n2, static_cast<int>(cx.pb_sections.size()));
  int nt = std::max(1, opt.threads);
  std::mt19937 rng(opt.seed);
  IntegrateResult res;
  res.seed = opt.seed;
  res.c0 = opt.c0;
  res.fixed_points = pts.size();
  for (int attempt = 0;; ++attempt) {
    if (attempt > 50) math_error("non-isolated or non-generic weights: no generic direction found");
    auto [a, b] = draw_direction(rng);
    Specialization sp{a, b, opt.c0};
    std::vector<SLaurent> part(nt);
    std::atomic<bool> collided{false};
    std::vector<std::exception_ptr> errs(nt);
    auto work = [&](int w) {
      try {
        for (size_t i = w; i < pts.size(); i += nt) {
          if (collided) return;
          const auto& p = pts[i];
          Frac v = value(e, cx, p, sp);
          if (v.n.empty()) continue;
          Frac et = euler_of(tangent_at(X, cx.pb_sections, p), sp);
          if (et.n.empty()) math_error("non-isolated or non-generic weights: zero tangent weight");
          Frac q;
          q.n = pmul(v.n, et.d);
          q.d = pmul(v.d, et.n);
          expand_into(q, part[w]);
        }
      } catch (const Collision&) {
        collided = true;
      } catch (...) {
        errs[w] = std::current_exception();
      }
    };
    if (nt == 1) {
      work(0);
    } else {
      std::vector<std::thread> th;
      for (int w = 0; w < nt; ++w) th.emplace_back(work, w);
      for (auto& t : th) t.join();
    }
    for (auto& ep : errs)
      if (ep) std::rethrow_exception(ep);
    if (collided) {
      ++res.redraws;
      continue;
    }
    SLaurent tot;
    for (auto& m : part)
      for (auto& [j, c] : m) tot[j] += c;
    res.value = nonequivariant_limit(tot);
    res.a = a;
    res.b = b;
    return res;
  }
}

Expr tautological(const SurfaceData& S, const LatticeVec& beta, long a, long n_a, Xi xi) {
  if (a != 1 && a != 2) schema_error("tautological bundle needs factor 1 or 2");
  return kdiff(L_rhom(S, beta, 0, 0, 0, 0, xi), L_rhom(S, beta, 0, a, 0, n_a, xi));
}

Expr tangent_leaf(int dim) { return sym("TX", dim); }

}  // namespace degloc
