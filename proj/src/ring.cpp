#include "degloc/ring.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "degloc/errors.hpp"

namespace degloc {

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_str();
}

Rational parse_rational(const std::string& s) {
  if (s.empty()) schema_error("empty rational");
  size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool slash = false;
  if (i == s.size()) schema_error("bad rational '" + s + "'");
  for (size_t k = i; k < s.size(); ++k) {
    if (s[k] == '/' && !slash && k > i && k + 1 < s.size()) {
      slash = true;
      continue;
    }
    if (s[k] < '0' || s[k] > '9') schema_error("bad rational '" + s + "'");
  }
  Rational q;
  q.set_str(s[0] == '+' ? s.substr(1) : s, 10);
  if (q.get_den() == 0) schema_error("zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

Rational binom(const Rational& n, int k) {
  if (k < 0) return 0;
  Rational r = 1;
  for (int i = 0; i < k; ++i) r *= (n - i);
  for (int i = 2; i <= k; ++i) r /= i;
  return r;
}

// ---------------------------------------------------------------- Ring

int Ring::find(const std::string& name) const {
  for (size_t i = 0; i < gens.size(); ++i)
    if (gens[i].name == name) return static_cast<int>(i);
  return -1;
}

bool Ring::admissible(const Monomial& m) const {
  if (m.deg > dim()) return false;
  if (levels() == 1) return true;
  int acc[64] = {0};
  for (size_t i = 0; i < gens.size(); ++i)
    if (m.e[i]) acc[gens[i].level] += m.e[i] * gens[i].degree;
  int run = 0;
  for (int k = 0; k < levels(); ++k) {
    run += acc[k];
    if (run > level_dim[k]) return false;
  }
  return true;
}

std::string Ring::describe() const {
  std::ostringstream os;
  os << "generators:";
  for (auto& g : gens) os << " " << g.name << "(deg " << g.degree << ", level " << g.level << ")";
  os << "\ndims:";
  for (int d : level_dim) os << " " << d;
  for (auto& r : rels) {
    os << "\n" << gens[r.gen].name << "^" << r.rank;
    auto R = std::make_shared<Ring>(*this);
    for (int i = 1; i <= r.rank; ++i) {
      GradedClass c(R, r.coeff[i - 1]);
      if (c.is_zero()) continue;
      os << " + (" << c.str() << ")*" << gens[r.gen].name << "^" << (r.rank - i);
    }
    os << " = 0";
  }
  return os.str();
}

RingPtr free_ring(const std::vector<std::pair<std::string, int>>& gens, int D) {
  if (static_cast<int>(gens.size()) > kMaxGens) schema_error("too many generators");
  if (D < 0) schema_error("negative truncation bound");
  auto r = std::make_shared<Ring>();
  for (auto& [n, d] : gens) {
    if (d <= 0) schema_error("generator degree must be positive");
    r->gens.push_back({n, d, 0});
  }
  r->level_dim = {D};
  return r;
}

RingPtr untruncated_copy(const RingPtr& src) {
  auto r = std::make_shared<Ring>();
  for (auto g : src->gens) {
    g.level = 0;
    r->gens.push_back(g);
  }
  r->level_dim = {std::numeric_limits<int>::max() / 2};
  return r;
}

// ---------------------------------------------------------- GradedClass

namespace {

inline Monomial mul(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.deg = a.deg + b.deg;
  for (int i = 0; i < kMaxGens; ++i) {
    int s = a.e[i] + b.e[i];
    if (s > 255) math_error("exponent overflow");
    m.e[i] = static_cast<uint8_t>(s);
  }
  return m;
}

inline void accum(Terms& t, const Monomial& m, const Rational& c) {
  auto [it, fresh] = t.try_emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) t.erase(it);
  } else if (c == 0) {
    t.erase(it);
  }
}

}  // namespace

GradedClass::GradedClass(RingPtr r, Terms t) : ring_(std::move(r)), terms_(std::move(t)) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0 || !ring_->admissible(it->first))
      it = terms_.erase(it);
    else
      ++it;
  }
  reduce();
}

GradedClass GradedClass::constant(RingPtr r, const Rational& c) {
  GradedClass g(std::move(r));
  if (c != 0) g.terms_[Monomial{}] = c;
  return g;
}

GradedClass GradedClass::gen(RingPtr r, int i, int power) {
  if (i < 0 || i >= static_cast<int>(r->gens.size())) schema_error("unknown generator index");
  if (power < 0) math_error("negative power of a generator");
  // higher powers may hit a bundle relation
  if (power > 1) return gen(r, i, 1).pow(power);
  Monomial m;
  m.e[i] = static_cast<uint8_t>(power);
  m.deg = power * r->gens[i].degree;
  Terms t;
  t[m] = 1;
  return GradedClass(std::move(r), std::move(t));
}

GradedClass GradedClass::gen(RingPtr r, const std::string& name, int power) {
  int i = r->find(name);
  if (i < 0) schema_error("unknown generator '" + name + "'");
  return gen(std::move(r), i, power);
}

GradedClass GradedClass::component(int k) const {
  GradedClass g(ring_);
  for (auto& [m, c] : terms_)
    if (m.deg == k) g.terms_.emplace_hint(g.terms_.end(), m, c);
  return g;
}

Rational GradedClass::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Rational(0) : it->second;
}

bool GradedClass::homogeneous_of(int k) const {
  for (auto& [m, c] : terms_)
    if (m.deg != k) return false;
  return true;
}

GradedClass GradedClass::operator+(const GradedClass& o) const {
  GradedClass r = *this;
  r += o;
  return r;
}

GradedClass GradedClass::operator-(const GradedClass& o) const {
  GradedClass r = *this;
  r -= o;
  return r;
}

GradedClass GradedClass::operator-() const {
  GradedClass r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

GradedClass& GradedClass::operator+=(const GradedClass& o) {
  if (!ring_) ring_ = o.ring_;
  for (auto& [m, c] : o.terms_) accum(terms_, m, c);
  return *this;
}

GradedClass& GradedClass::operator-=(const GradedClass& o) {
  if (!ring_) ring_ = o.ring_;
  for (auto& [m, c] : o.terms_) accum(terms_, m, -c);
  return *this;
}

GradedClass GradedClass::operator*(const Rational& q) const {
  GradedClass r(ring_);
  if (q == 0) return r;
  for (auto& [m, c] : terms_) r.terms_.emplace_hint(r.terms_.end(), m, c * q);
  return r;
}

GradedClass GradedClass::operator*(const GradedClass& o) const {
  const RingPtr& R = ring_ ? ring_ : o.ring_;
  GradedClass r(R);
  const int D = R->dim();
  for (auto& [ma, ca] : terms_) {
    for (auto& [mb, cb] : o.terms_) {
      if (ma.deg + mb.deg > D) break;  // terms ordered by degree
      Monomial m = mul(ma, mb);
      if (!R->admissible(m)) continue;
      accum(r.terms_, m, ca * cb);
    }
  }
  r.reduce();
  return r;
}

GradedClass GradedClass::pow(int k) const {
  if (k < 0) math_error("negative power of a class");
  GradedClass r = constant(ring_, 1), b = *this;
  while (k) {
    if (k & 1) r = r * b;
    k >>= 1;
    if (k) b = b * b;
  }
  return r;
}

GradedClass GradedClass::in_ring(const RingPtr& r) const {
  for (auto& [m, c] : terms_)
    for (size_t i = r->gens.size(); i < kMaxGens; ++i)
      if (m.e[i]) schema_error("class uses generators absent from target ring");
  return GradedClass(r, terms_);
}

void GradedClass::reduce() {
  const Ring& R = *ring_;
  for (int lv = R.levels() - 1; lv >= 1; --lv) {
    const Relation& rel = R.rels[lv - 1];
    const int g = rel.gen, b = rel.rank, gd = R.gens[g].degree;
    int maxE = 0;
    for (auto& [m, c] : terms_) maxE = std::max<int>(maxE, m.e[g]);
    for (int E = maxE; E >= b; --E) {
      std::vector<std::pair<Monomial, Rational>> work;
      for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first.e[g] == E) {
          work.emplace_back(*it);
          it = terms_.erase(it);
        } else {
          ++it;
        }
      }
      for (auto& [m, c] : work) {
        Monomial base = m;
        base.e[g] = static_cast<uint8_t>(E - b);
        base.deg -= b * gd;
        for (int i = 1; i <= b; ++i) {
          Monomial mb = base;
          mb.e[g] = static_cast<uint8_t>(mb.e[g] + b - i);
          mb.deg += (b - i) * gd;
          for (auto& [cm, cc] : rel.coeff[i - 1]) {
            Monomial t = mul(mb, cm);
            if (!R.admissible(t)) continue;
            accum(terms_, t, -c * cc);
          }
        }
      }
    }
  }
}

std::string GradedClass::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Rational a = abs(c);
    bool unit = m.deg == 0 && m.e == Monomial{}.e;
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    bool lead = false;
    if (a != 1 || unit) {
      os << to_string(a);
      lead = true;
    }
    for (size_t i = 0; i < ring_->gens.size(); ++i) {
      if (!m.e[i]) continue;
      if (lead) os << "*";
      os << ring_->gens[i].name;
      if (m.e[i] > 1) os << "^" << int(m.e[i]);
      lead = true;
    }
  }
  return os.str();
}

GradedClass GradedClass::divide_exact(const GradedClass& d) const {
  if (d.is_zero()) math_error("division by zero class");
  const auto lt = *d.terms_.rbegin();
  Terms rem = terms_;
  GradedClass q(ring_);
  while (!rem.empty()) {
    auto [m, c] = *rem.rbegin();
    Monomial qm;
    for (int i = 0; i < kMaxGens; ++i) {
      if (m.e[i] < lt.first.e[i]) math_error("inexact division");
      qm.e[i] = static_cast<uint8_t>(m.e[i] - lt.first.e[i]);
    }
    qm.deg = m.deg - lt.first.deg;
    Rational qc = c / lt.second;
    accum(q.terms_, qm, qc);
    for (auto& [dm, dc] : d.terms_) accum(rem, mul(qm, dm), -qc * dc);
  }
  return q;
}

// ---------------------------------------------------------- Chern data

ChernSeries::ChernSeries(GradedClass c) : c_(std::move(c)) {
  if (c_.component(0) != GradedClass::constant(c_.ring(), 1)) math_error("non-invertible series");
}

ChernSeries ChernSeries::one(const RingPtr& r) { return ChernSeries(GradedClass::constant(r, 1)); }

GradedClass ChernSeries::operator[](int k) const {
  if (k < 0 || k > c_.dim()) return GradedClass(c_.ring());
  return c_.component(k);
}

ChernSeries series_invert(const GradedClass& c) {
  if (c.component(0) != GradedClass::constant(c.ring(), 1)) math_error("non-invertible series");
  const RingPtr& R = c.ring();
  const int D = R->dim();
  std::vector<GradedClass> ck(D + 1, GradedClass(R)), s(D + 1, GradedClass(R));
  for (auto& [m, q] : c.terms()) {
    GradedClass t(R);
    t += GradedClass(R, Terms{{m, q}});
    ck[m.deg] += t;
  }
  s[0] = GradedClass::constant(R, 1);
  GradedClass total = s[0];
  for (int k = 1; k <= D; ++k) {
    GradedClass acc(R);
    for (int i = 1; i <= k; ++i)
      if (!ck[i].is_zero() && !s[k - i].is_zero()) acc += ck[i] * s[k - i];
    s[k] = -acc;
    total += s[k];
  }
  return ChernSeries(total);
}

namespace {

GradedClass det(std::vector<std::vector<GradedClass>> M, const RingPtr& R) {
  const size_t n = M.size();
  if (n == 0) return GradedClass::constant(R, 1);
  if (n == 1) return M[0][0];
  GradedClass r(R);
  for (size_t j = 0; j < n; ++j) {
    if (M[0][j].is_zero()) continue;
    std::vector<std::vector<GradedClass>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<GradedClass> row;
      for (size_t k = 0; k < n; ++k)
        if (k != j) row.push_back(M[i][k]);
      minor.push_back(std::move(row));
    }
    GradedClass t = M[0][j] * det(std::move(minor), R);
    if (j % 2)
      r -= t;
    else
      r += t;
  }
  return r;
}

}  // namespace

GradedClass determinant(const std::vector<std::vector<GradedClass>>& M, const RingPtr& r) {
  for (auto& row : M)
    if (row.size() != M.size()) schema_error("determinant: matrix not square");
  return det(M, r);
}

GradedClass delta_det(int a, int b, const ChernSeries& c) {
  if (a < 0) schema_error("delta_det: negative size");
  std::vector<std::vector<GradedClass>> M(a, std::vector<GradedClass>(a, GradedClass(c.ring())));
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < a; ++j) M[i][j] = c[b + j - i];
  return det(std::move(M), c.ring());
}

KClass KClass::operator+(const KClass& o) const {
  return KClass(rank + o.rank, ChernSeries(c.cls() * o.c.cls()));
}

KClass KClass::operator-() const { return KClass(-rank, series_invert(c.cls())); }

KClass KClass::operator-(const KClass& o) const { return *this + (-o); }

KClass k_trivial(const RingPtr& r, int rank) { return KClass(rank, ChernSeries::one(r)); }

KClass k_line(const GradedClass& c1) {
  if (!c1.homogeneous_of(1)) schema_error("line class must be homogeneous of degree 1");
  return KClass(1, ChernSeries(GradedClass::constant(c1.ring(), 1) + c1));
}

KClass k_twist(const KClass& E, const GradedClass& line) {
  if (!line.homogeneous_of(1)) schema_error("twist needs a degree-1 class");
  const RingPtr& R = E.c.ring();
  const int D = R->dim();
  std::vector<GradedClass> lp(D + 1, GradedClass(R));
  lp[0] = GradedClass::constant(R, 1);
  for (int k = 1; k <= D; ++k) lp[k] = lp[k - 1] * line;
  std::vector<GradedClass> ci(D + 1, GradedClass(R));
  for (int i = 0; i <= D; ++i) ci[i] = E.c[i];
  GradedClass total(R);
  for (int k = 0; k <= D; ++k)
    for (int i = 0; i <= k; ++i) {
      if (ci[i].is_zero() || lp[k - i].is_zero()) continue;
      Rational b = binom(Rational(E.rank - i), k - i);
      if (b != 0) total += ci[i] * lp[k - i] * b;
    }
  return KClass(E.rank, ChernSeries(total));
}

KClass k_twist(const KClass& E, int gen, int m) {
  const RingPtr& R = E.c.ring();
  if (gen < 0 || gen >= static_cast<int>(R->gens.size()) || R->gens[gen].degree != 1)
    schema_error("twist generator must be a declared degree-1 generator");
  if (m == 0) return E;
  return k_twist(E, GradedClass::gen(R, gen) * Rational(m));
}

KClass k_dual(const KClass& E) {
  Terms t;
  for (auto& [m, c] : E.c.cls().terms()) t.emplace_hint(t.end(), m, (m.deg % 2) ? Rational(-c) : c);
  return KClass(E.rank, ChernSeries(GradedClass(E.c.ring(), std::move(t))));
}

KClass k_scale(const KClass& E, int n) {
  if (n < 0) return -k_scale(E, -n);
  return KClass(E.rank * n, ChernSeries(E.c.cls().pow(n)));
}

KClass k_generic(const RingPtr& r, const std::string& name, int rank, int ncls) {
  GradedClass c = GradedClass::constant(r, 1);
  for (int k = 1; k <= ncls; ++k) c += GradedClass::gen(r, name + std::to_string(k));
  return KClass(rank, ChernSeries(c));
}

}  // namespace degloc
