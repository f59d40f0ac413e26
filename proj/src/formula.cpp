#include "degloc/formula.hpp"

#include <algorithm>
#include <sstream>

#include "degloc/errors.hpp"

namespace degloc {

namespace {

struct KindInfo {
  NodeKind k;
  const char* name;
  bool is_k;
};

const KindInfo kKinds[] = {
    {NodeKind::Sym, "sym", true},        {NodeKind::Trivial, "trivial", true}, {NodeKind::Sum, "ksum", true},
    {NodeKind::Neg, "kneg", true},       {NodeKind::Dual, "dual", true},       {NodeKind::Twist, "twist", true},
    {NodeKind::Chern, "chern", false},   {NodeKind::Euler, "euler", false},    {NodeKind::Delta, "delta", false},
    {NodeKind::Mul, "mul", false},       {NodeKind::Add, "add", false},        {NodeKind::Scalar, "scalar", false},
    {NodeKind::HPow, "hpow", false},     {NodeKind::Push, "push", false},      {NodeKind::Cap, "cap", false},
    {NodeKind::SW, "sw", false},         {NodeKind::Zero, "zero", false},
};

const KindInfo& info(NodeKind k) {
  for (auto& i : kKinds)
    if (i.k == k) return i;
  throw Error(ErrorKind::Schema, "bad node kind");
}

std::shared_ptr<Node> make(NodeKind k) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  return n;
}

void need_k(const Expr& x, const char* where) {
  if (!x || !x->is_k()) schema_error(std::string(where) + " needs a K-class argument");
}

void need_class(const Expr& x, const char* where) {
  if (!x || x->is_k()) schema_error(std::string(where) + " needs a cohomology class argument");
}

}  // namespace

bool Node::is_k() const { return info(kind).is_k; }
const char* kind_name(NodeKind k) { return info(k).name; }

// ---------------------------------------------------------------- builders

Expr sym(const std::string& name, int rank, std::vector<long> params) {
  if (name.empty()) schema_error("symbol without a name");
  auto n = make(NodeKind::Sym);
  n->name = name;
  n->rank = rank;
  n->p = std::move(params);
  return n;
}

namespace {

// params: a, b, tf, l, k, t, li, D...
std::vector<long> rhom_params(const RhomLeaf& r) {
  std::vector<long> p = {r.a, r.b, r.tf ? 1 : 0, r.xi.l, r.xi.k, r.xi.t, r.xi.li};
  bool nz = std::any_of(r.xi.D.begin(), r.xi.D.end(), [](long v) { return v != 0; });
  if (nz) p.insert(p.end(), r.xi.D.begin(), r.xi.D.end());
  return p;
}

}  // namespace

Expr rhom(const RhomLeaf& r, int rank) {
  if (r.a < 0 || r.b < 0) schema_error("Rhom indices must be >= 0");
  if (r.tf && r.a != r.b) schema_error("trace-free part needs equal ideal indices");
  return sym("Rhom", rank, rhom_params(r));
}

std::optional<RhomLeaf> as_rhom(const Node& n) {
  if (n.kind != NodeKind::Sym || n.name != "Rhom") return std::nullopt;
  if (n.p.size() < 7) schema_error("Rhom leaf needs at least 7 parameters");
  RhomLeaf r;
  r.a = n.p[0];
  r.b = n.p[1];
  r.tf = n.p[2] != 0;
  r.xi.l = n.p[3];
  r.xi.k = n.p[4];
  r.xi.t = n.p[5];
  r.xi.li = n.p[6];
  r.xi.D.assign(n.p.begin() + 7, n.p.end());
  return r;
}

Expr trivial(int rank) {
  auto n = make(NodeKind::Trivial);
  n->rank = rank;
  return n;
}

Expr ksum(std::vector<Expr> xs) {
  auto n = make(NodeKind::Sum);
  for (auto& x : xs) {
    need_k(x, "ksum");
    n->rank += x->rank;
  }
  n->kids = std::move(xs);
  return n;
}

Expr kneg(Expr x) {
  need_k(x, "kneg");
  auto n = make(NodeKind::Neg);
  n->rank = -x->rank;
  n->kids = {std::move(x)};
  return n;
}

Expr kdiff(Expr a, Expr b) { return ksum({std::move(a), kneg(std::move(b))}); }

Expr kdual(Expr x) {
  need_k(x, "dual");
  auto n = make(NodeKind::Dual);
  n->rank = x->rank;
  n->kids = {std::move(x)};
  return n;
}

Expr ktwist(Expr x, const std::string& h, long m) {
  need_k(x, "twist");
  if (h.empty()) schema_error("twist needs a generator name");
  auto n = make(NodeKind::Twist);
  n->name = h;
  n->p = {m};
  n->rank = x->rank;
  n->kids = {std::move(x)};
  return n;
}

Expr chern(long k, Expr x) {
  need_k(x, "chern");
  auto n = make(NodeKind::Chern);
  n->p = {k};
  n->kids = {std::move(x)};
  return n;
}

Expr euler(Expr x) {
  need_k(x, "euler");
  auto n = make(NodeKind::Euler);
  n->kids = {std::move(x)};
  return n;
}

Expr delta(long a, long b, Expr x) {
  need_k(x, "delta");
  if (a < 0) schema_error("delta needs a >= 0");
  auto n = make(NodeKind::Delta);
  n->p = {a, b};
  n->kids = {std::move(x)};
  return n;
}

Expr mul(std::vector<Expr> xs) {
  for (auto& x : xs) need_class(x, "mul");
  auto n = make(NodeKind::Mul);
  n->kids = std::move(xs);
  return n;
}

Expr add(std::vector<Expr> xs) {
  for (auto& x : xs) need_class(x, "add");
  auto n = make(NodeKind::Add);
  n->kids = std::move(xs);
  return n;
}

Expr scalar(const Rational& q) {
  auto n = make(NodeKind::Scalar);
  n->q = q;
  return n;
}

Expr one() { return scalar(1); }
Expr zero() { return make(NodeKind::Zero); }

Expr hpow(const std::string& h, long i) {
  if (i < 0) schema_error("negative power of a hyperplane class");
  auto n = make(NodeKind::HPow);
  n->name = h;
  n->p = {i};
  return n;
}

Expr push(const std::string& space, Expr x) {
  need_class(x, "push");
  auto n = make(NodeKind::Push);
  n->name = space;
  n->kids = {std::move(x)};
  return n;
}

Expr cap(const std::string& cycle, Expr x) {
  need_class(x, "cap");
  auto n = make(NodeKind::Cap);
  n->name = cycle;
  n->kids = {std::move(x)};
  return n;
}

// params: j, chiO, q, pg, vd, rho, beta..., K...
Expr sw(const SWAtom& a) {
  if (a.beta.size() != a.K.size()) schema_error("SW atom: beta and K differ in length");
  auto n = make(NodeKind::SW);
  n->p = {a.j, a.chiO, a.q, a.pg, a.vd, static_cast<long>(a.beta.size())};
  n->p.insert(n->p.end(), a.beta.begin(), a.beta.end());
  n->p.insert(n->p.end(), a.K.begin(), a.K.end());
  return n;
}

SWAtom sw_data(const Node& n) {
  if (n.kind != NodeKind::SW || n.p.size() < 6) schema_error("malformed SW node");
  SWAtom a;
  a.j = n.p[0];
  a.chiO = n.p[1];
  a.q = n.p[2];
  a.pg = n.p[3];
  a.vd = n.p[4];
  long r = n.p[5];
  if (static_cast<long>(n.p.size()) != 6 + 2 * r) schema_error("malformed SW node");
  a.beta.assign(n.p.begin() + 6, n.p.begin() + 6 + r);
  a.K.assign(n.p.begin() + 6 + r, n.p.end());
  return a;
}

// ---------------------------------------------------------------- JSON and text

nlohmann::json to_json(const Expr& e) {
  nlohmann::json j;
  j["kind"] = kind_name(e->kind);
  if (!e->name.empty()) j["name"] = e->name;
  if (!e->p.empty()) j["params"] = e->p;
  if (e->is_k()) j["rank"] = e->rank;
  if (e->kind == NodeKind::Scalar) j["value"] = to_string(e->q);
  if (!e->kids.empty()) {
    j["children"] = nlohmann::json::array();
    for (auto& k : e->kids) j["children"].push_back(to_json(k));
  }
  return j;
}

Expr from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) schema_error("formula node needs a string 'kind'");
  std::string kn = j["kind"];
  const KindInfo* ki = nullptr;
  for (auto& i : kKinds)
    if (kn == i.name) ki = &i;
  if (!ki) schema_error("unknown formula node kind '" + kn + "'");
  std::vector<Expr> kids;
  if (j.contains("children")) {
    if (!j["children"].is_array()) schema_error("'children' must be an array");
    for (auto& c : j["children"]) kids.push_back(from_json(c));
  }
  std::vector<long> p;
  std::string name;
  try {
    if (j.contains("params")) p = j["params"].get<std::vector<long>>();
    if (j.contains("name")) name = j["name"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
    schema_error("bad 'params' or 'name' in formula node");
  }
  auto param = [&](size_t i) {
    if (p.size() <= i) schema_error(kn + " node is missing parameters");
    return p[i];
  };
  auto kid = [&](size_t i) {
    if (kids.size() <= i) schema_error(kn + " node is missing children");
    return kids[i];
  };
  auto rank = [&]() -> int {
    if (!j.contains("rank") || !j["rank"].is_number_integer()) schema_error(kn + " node needs an integer rank");
    return j["rank"].get<int>();
  };
  Expr out;
  switch (ki->k) {
    case NodeKind::Sym: out = sym(name, rank(), p); break;
    case NodeKind::Trivial: out = trivial(rank()); break;
    case NodeKind::Sum: out = ksum(kids); break;
    case NodeKind::Neg: out = kneg(kid(0)); break;
    case NodeKind::Dual: out = kdual(kid(0)); break;
    case NodeKind::Twist: out = ktwist(kid(0), name, param(0)); break;
    case NodeKind::Chern: out = chern(param(0), kid(0)); break;
    case NodeKind::Euler: out = euler(kid(0)); break;
    case NodeKind::Delta: out = delta(param(0), param(1), kid(0)); break;
    case NodeKind::Mul: out = mul(kids); break;
    case NodeKind::Add: out = add(kids); break;
    case NodeKind::Scalar:
      if (!j.contains("value") || !j["value"].is_string()) schema_error("scalar node needs a string 'value'");
      out = scalar(parse_rational(j["value"].get<std::string>()));
      break;
    case NodeKind::HPow: out = hpow(name, param(0)); break;
    case NodeKind::Push: out = push(name, kid(0)); break;
    case NodeKind::Cap: out = cap(name, kid(0)); break;
    case NodeKind::SW: {
      auto n = make(NodeKind::SW);
      n->p = p;
      sw_data(*n);
      out = n;
      break;
    }
    case NodeKind::Zero: out = zero(); break;
  }
  if (out->is_k() && j.contains("rank") && j["rank"].get<int>() != out->rank)
    schema_error(kn + " node rank disagrees with its children");
  return out;
}

namespace {

std::string xi_text(const RhomLeaf& r) {
  std::ostringstream s;
  bool any = false;
  auto part = [&](const std::string& base, long e) {
    if (e == 0) return;
    if (any) s << " ";
    s << base;
    if (e != 1) s << "^" << e;
    any = true;
  };
  part(r.xi.li ? "L" + std::to_string(r.xi.li) : "L", r.xi.l);
  part("K", r.xi.k);
  if (!r.xi.D.empty()) {
    if (any) s << " ";
    s << "O(";
    for (size_t i = 0; i < r.xi.D.size(); ++i) s << (i ? "," : "") << r.xi.D[i];
    s << ")";
    any = true;
  }
  part("t", r.xi.t);
  return any ? s.str() : "";
}

std::string ideal(long a) { return a == 0 ? "O" : "I" + std::to_string(a); }

}  // namespace

std::string to_text(const Expr& e) {
  std::ostringstream s;
  auto join = [&](const char* sep) {
    for (size_t i = 0; i < e->kids.size(); ++i) s << (i ? sep : "") << to_text(e->kids[i]);
  };
  switch (e->kind) {
    case NodeKind::Sym: {
      if (auto r = as_rhom(*e)) {
        std::string x = xi_text(*r);
        if (r->a == 0 && r->b == 0 && !r->tf) {
          s << "Rpi(" << (x.empty() ? "O" : x) << ")";
        } else {
          s << "Rhom(" << ideal(r->a) << "," << ideal(r->b) << (x.empty() ? "" : " " + x) << ")" << (r->tf ? "_0" : "");
        }
      } else {
        s << e->name;
        if (!e->p.empty()) {
          s << "[";
          for (size_t i = 0; i < e->p.size(); ++i) s << (i ? "," : "") << e->p[i];
          s << "]";
        }
      }
      break;
    }
    case NodeKind::Trivial: s << "O^" << e->rank; break;
    case NodeKind::Sum:
      s << "(";
      join(" + ");
      s << ")";
      break;
    case NodeKind::Neg: s << "-" << to_text(e->kids[0]); break;
    case NodeKind::Dual: s << to_text(e->kids[0]) << "^v"; break;
    case NodeKind::Twist: s << to_text(e->kids[0]) << "(" << e->p[0] << e->name << ")"; break;
    case NodeKind::Chern: s << "c_" << e->p[0] << "(" << to_text(e->kids[0]) << ")"; break;
    case NodeKind::Euler: s << "e(" << to_text(e->kids[0]) << ")"; break;
    case NodeKind::Delta: s << "Delta^" << e->p[0] << "_" << e->p[1] << "(" << to_text(e->kids[0]) << ")"; break;
    case NodeKind::Mul:
      if (e->kids.empty()) s << "1";
      join(" * ");
      break;
    case NodeKind::Add:
      if (e->kids.empty()) s << "0";
      s << "(";
      join(" + ");
      s << ")";
      break;
    case NodeKind::Scalar: s << to_string(e->q); break;
    case NodeKind::HPow: s << e->name << "^" << e->p[0]; break;
    case NodeKind::Push: s << "push_" << e->name << "(" << to_text(e->kids[0]) << ")"; break;
    case NodeKind::Cap: s << "(" << to_text(e->kids[0]) << ") cap [" << e->name << "]"; break;
    case NodeKind::SW: {
      auto a = sw_data(*e);
      s << "SW";
      if (a.j) s << "^" << a.j;
      s << "(";
      for (size_t i = 0; i < a.beta.size(); ++i) s << (i ? "," : "") << a.beta[i];
      s << ")";
      break;
    }
    case NodeKind::Zero: s << "0"; break;
  }
  return s.str();
}

std::string leaf_key(const Node& n) {
  std::ostringstream s;
  if (n.kind == NodeKind::Trivial) return "1";
  s << n.name;
  for (long v : n.p) s << ":" << v;
  return s.str();
}

RhomLeaf serre_partner(const RhomLeaf& r) {
  RhomLeaf d = r;
  d.a = r.b;
  d.b = r.a;
  d.xi.l = -r.xi.l;
  d.xi.k = 1 - r.xi.k;
  d.xi.t = -r.xi.t;
  for (auto& v : d.xi.D) v = -v;
  return d;
}

std::pair<RhomLeaf, bool> serre_canonical(const RhomLeaf& r) {
  RhomLeaf d = serre_partner(r);
  auto pr = rhom_params(r), pd = rhom_params(d);
  if (pd < pr) return {d, true};
  return {r, false};
}

Expr transform(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f) {
  std::vector<Expr> kids;
  bool changed = false;
  for (auto& k : e->kids) {
    kids.push_back(transform(k, f));
    changed = changed || kids.back() != k;
  }
  Expr cur = e;
  if (changed) {
    switch (e->kind) {
      case NodeKind::Sum: cur = ksum(kids); break;
      case NodeKind::Neg: cur = kneg(kids[0]); break;
      case NodeKind::Dual: cur = kdual(kids[0]); break;
      case NodeKind::Twist: cur = ktwist(kids[0], e->name, e->p[0]); break;
      case NodeKind::Chern: cur = chern(e->p[0], kids[0]); break;
      case NodeKind::Euler: cur = euler(kids[0]); break;
      case NodeKind::Delta: cur = delta(e->p[0], e->p[1], kids[0]); break;
      case NodeKind::Mul: cur = mul(kids); break;
      case NodeKind::Add: cur = add(kids); break;
      case NodeKind::Push: cur = push(e->name, kids[0]); break;
      case NodeKind::Cap: cur = cap(e->name, kids[0]); break;
      default: break;
    }
  }
  if (auto r = f(cur)) return *r;
  return cur;
}

// ---------------------------------------------------------------- normal form

namespace {

using Mono = std::vector<std::string>;
using Poly = std::map<Mono, Rational>;

struct Ctx {
  std::map<std::string, Expr> atoms;
  std::string atom(const Expr& e) {
    std::string k = to_json(e).dump();
    atoms.emplace(k, e);
    return k;
  }
};

Poly pconst(const Rational& q) {
  Poly p;
  if (q != 0) p[{}] = q;
  return p;
}

Poly patom(const std::string& k) { return Poly{{Mono{k}, Rational(1)}}; }

void padd_to(Poly& a, const Poly& b, const Rational& f = 1) {
  for (auto& [m, c] : b) {
    Rational& x = a[m];
    x += c * f;
    if (x == 0) a.erase(m);
  }
}

Poly pmul(const Poly& a, const Poly& b) {
  Poly r;
  for (auto& [ma, ca] : a)
    for (auto& [mb, cb] : b) {
      Mono m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      std::sort(m.begin(), m.end());
      Rational& x = r[m];
      x += ca * cb;
      if (x == 0) r.erase(m);
    }
  return r;
}

Poly ppow(const Poly& a, long k) {
  Poly r = pconst(1);
  for (long i = 0; i < k; ++i) r = pmul(r, a);
  return r;
}

// linear combination of twisted leaves
struct KKey {
  std::string leaf;  // "1" for the trivial line
  bool dual = false;
  std::map<std::string, long> tw;
  bool operator<(const KKey& o) const { return std::tie(leaf, dual, tw) < std::tie(o.leaf, o.dual, o.tw); }
};

struct KComb {
  std::map<KKey, long> terms;
  std::map<std::string, Expr> leaves;

  int rank() const {
    long r = 0;
    for (auto& [k, c] : terms) r += c * (k.leaf == "1" ? 1 : leaves.at(k.leaf)->rank);
    return static_cast<int>(r);
  }
  void add(const KKey& k, long c) {
    long& x = terms[k];
    x += c;
    if (x == 0) terms.erase(k);
  }
};

void collect(const Expr& e, long coef, bool d, const std::map<std::string, long>& T, KComb& out) {
  switch (e->kind) {
    case NodeKind::Sym: {
      Expr leaf = e;
      bool dd = d;
      if (auto r = as_rhom(*e)) {
        auto [c, flip] = serre_canonical(*r);
        if (flip) {
          leaf = rhom(c, e->rank);
          dd = !dd;
        }
      }
      std::string key = leaf_key(*leaf);
      out.leaves.emplace(key, leaf);
      out.add({key, dd, T}, coef);
      break;
    }
    case NodeKind::Trivial:
      if (e->rank != 0) out.add({"1", false, T}, coef * e->rank);
      break;
    case NodeKind::Sum:
      for (auto& k : e->kids) collect(k, coef, d, T, out);
      break;
    case NodeKind::Neg: collect(e->kids[0], -coef, d, T, out); break;
    case NodeKind::Dual: collect(e->kids[0], coef, !d, T, out); break;
    case NodeKind::Twist: {
      auto T2 = T;
      long m = d ? -e->p[0] : e->p[0];
      long& x = T2[e->name];
      x += m;
      if (x == 0) T2.erase(e->name);
      collect(e->kids[0], coef, d, T2, out);
      break;
    }
    default: schema_error("K-class expected inside a Chern node");
  }
}

// the trivial line needs no dual flag; leaves carry the Serre choice
Expr rebuild(const KComb& k) {
  std::vector<Expr> parts;
  for (auto& [key, c] : k.terms) {
    Expr x = key.leaf == "1" ? trivial(1) : k.leaves.at(key.leaf);
    if (key.dual) x = kdual(x);
    for (auto& [h, m] : key.tw) x = ktwist(x, h, m);
    if (key.leaf == "1" && key.tw.empty()) {
      parts.push_back(trivial(static_cast<int>(c)));
      continue;
    }
    long n = c < 0 ? -c : c;
    for (long i = 0; i < n; ++i) parts.push_back(c < 0 ? kneg(x) : x);
  }
  if (parts.size() == 1) return parts[0];
  return ksum(parts);
}

Poly nf(const Expr& e, Ctx& cx);

Poly chern_nf(long k, const KComb& comb, Ctx& cx) {
  if (k < 0) return {};
  if (k == 0) return pconst(1);
  KComb v = comb;
  // untwisted trivial summands do not change Chern classes
  for (auto it = v.terms.begin(); it != v.terms.end();)
    it = (it->first.leaf == "1" && it->first.tw.empty()) ? v.terms.erase(it) : std::next(it);
  if (v.terms.empty()) return {};
  const auto& T = v.terms.begin()->first.tw;
  bool common = std::all_of(v.terms.begin(), v.terms.end(), [&](auto& t) { return t.first.tw == T; });
  if (common && !T.empty()) {
    KComb u;
    u.leaves = v.leaves;
    for (auto& [key, c] : v.terms) u.add({key.leaf, key.dual, {}}, c);
    int r = u.rank();
    Poly ell;
    for (auto& [h, m] : T) padd_to(ell, patom(cx.atom(hpow(h, 1))), m);
    Poly out;
    for (long i = 0; i <= k; ++i) {
      Rational b = binom(Rational(r - i), static_cast<int>(k - i));
      if (b == 0) continue;
      padd_to(out, pmul(chern_nf(i, u, cx), ppow(ell, k - i)), b);
    }
    return out;
  }
  if (common) {
    bool alldual = true;
    for (auto& [key, c] : v.terms)
      if (key.leaf != "1" && !key.dual) alldual = false;
    if (alldual) {
      KComb u;
      u.leaves = v.leaves;
      for (auto& [key, c] : v.terms) u.add({key.leaf, false, key.tw}, c);
      Poly p = chern_nf(k, u, cx);
      if (k % 2) {
        Poly m;
        padd_to(m, p, -1);
        return m;
      }
      return p;
    }
  }
  return patom(cx.atom(chern(k, rebuild(v))));
}

Poly euler_nf(const KComb& comb, Ctx& cx) {
  if (comb.terms.empty()) return pconst(1);
  bool anyleaf = false, alldual = true;
  for (auto& [key, c] : comb.terms)
    if (key.leaf != "1") {
      anyleaf = true;
      alldual = alldual && key.dual;
    }
  if (!(anyleaf && alldual)) return patom(cx.atom(euler(rebuild(comb))));
  // e(V^dual) = (-1)^rk e(V), twists change sign under dualising
  KComb u;
  u.leaves = comb.leaves;
  for (auto& [key, c] : comb.terms) {
    auto tw = key.tw;
    for (auto& [h, m] : tw) m = -m;
    u.add({key.leaf, false, tw}, c);
  }
  Poly p = patom(cx.atom(euler(rebuild(u))));
  if (comb.rank() % 2 == 0) return p;
  Poly m;
  padd_to(m, p, -1);
  return m;
}

KComb kcomb(const Expr& x) {
  KComb c;
  collect(x, 1, false, {}, c);
  return c;
}

Poly det_nf(std::vector<std::vector<Poly>> M) {
  size_t n = M.size();
  if (n == 0) return pconst(1);
  if (n == 1) return M[0][0];
  Poly out;
  for (size_t j = 0; j < n; ++j) {
    if (M[0][j].empty()) continue;
    std::vector<std::vector<Poly>> minor;
    for (size_t i = 1; i < n; ++i) {
      std::vector<Poly> row;
      for (size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(M[i][c]);
      minor.push_back(row);
    }
    padd_to(out, pmul(M[0][j], det_nf(minor)), (j % 2) ? -1 : 1);
  }
  return out;
}

Expr rebuild_poly(const Poly& p, Ctx& cx);

Expr mono_expr(const Mono& m, Ctx& cx) {
  std::vector<Expr> f;
  for (auto& a : m) f.push_back(cx.atoms.at(a));
  if (f.empty()) return one();
  if (f.size() == 1) return f[0];
  return mul(f);
}

Poly sw_nf(const Expr& e, Ctx& cx) {
  SWAtom a = sw_data(*e);
  bool zero_by_dim = a.j < 0 || a.j > a.vd || (a.q == 0 && a.j != a.vd) || (a.j == 0 && a.vd != 0);
  if (zero_by_dim) return {};
  Rational sign = 1;
  if (a.pg > 0 && a.j == 0) {
    std::vector<long> d(a.beta.size());
    for (size_t i = 0; i < d.size(); ++i) d[i] = a.K[i] - a.beta[i];
    if (d < a.beta) {
      a.beta = d;
      if (a.chiO % 2) sign = -1;
    }
  }
  Poly p = patom(cx.atom(sw(a)));
  Poly r;
  padd_to(r, p, sign);
  return r;
}

Poly nf(const Expr& e, Ctx& cx) {
  switch (e->kind) {
    case NodeKind::Zero: return {};
    case NodeKind::Scalar: return pconst(e->q);
    case NodeKind::Add: {
      Poly r;
      for (auto& k : e->kids) padd_to(r, nf(k, cx));
      return r;
    }
    case NodeKind::Mul: {
      Poly r = pconst(1);
      for (auto& k : e->kids) r = pmul(r, nf(k, cx));
      return r;
    }
    case NodeKind::HPow: return ppow(patom(cx.atom(hpow(e->name, 1))), e->p[0]);
    case NodeKind::Chern: return chern_nf(e->p[0], kcomb(e->kids[0]), cx);
    case NodeKind::Euler: return euler_nf(kcomb(e->kids[0]), cx);
    case NodeKind::Delta: {
      long a = e->p[0], b = e->p[1];
      KComb c = kcomb(e->kids[0]);
      std::vector<std::vector<Poly>> M(a, std::vector<Poly>(a));
      for (long i = 0; i < a; ++i)
        for (long j = 0; j < a; ++j) M[i][j] = chern_nf(b + j - i, c, cx);
      return det_nf(M);
    }
    case NodeKind::Push: {
      Poly inner = nf(e->kids[0], cx), r;
      for (auto& [m, c] : inner) padd_to(r, patom(cx.atom(push(e->name, mono_expr(m, cx)))), c);
      return r;
    }
    case NodeKind::Cap: return pmul(nf(e->kids[0], cx), patom(cx.atom(cap(e->name, one()))));
    case NodeKind::SW: return sw_nf(e, cx);
    default: schema_error("normal form of a bare K-class; wrap it in chern or euler");
  }
}

Expr rebuild_poly(const Poly& p, Ctx& cx) {
  if (p.empty()) return zero();
  std::vector<Expr> terms;
  for (auto& [m, c] : p) {
    std::vector<Expr> f = {scalar(c)};
    for (auto& a : m) f.push_back(cx.atoms.at(a));
    terms.push_back(mul(f));
  }
  return add(terms);
}

}  // namespace

Expr normal_form(const Expr& e) {
  Ctx cx;
  return rebuild_poly(nf(e, cx), cx);
}

bool nf_equal(const Expr& a, const Expr& b) { return to_json(normal_form(a)) == to_json(normal_form(b)); }

bool nf_is_zero(const Expr& e) { return normal_form(e)->kind == NodeKind::Zero; }

// ---------------------------------------------------------------- Formula JSON

nlohmann::json to_json(const Formula& f) {
  nlohmann::json j;
  j["id"] = f.id;
  j["expr"] = to_json(f.expr);
  if (f.alt) j["alt"] = to_json(*f.alt);
  j["meta"] = f.meta;
  if (!f.vecs.empty()) j["vecs"] = f.vecs;
  if (!f.note.empty()) j["note"] = f.note;
  j["text"] = to_text(f.expr);
  return j;
}

Formula formula_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("expr")) schema_error("formula needs an 'expr'");
  Formula f;
  try {
    if (j.contains("id")) f.id = j["id"].get<std::string>();
    if (j.contains("meta")) f.meta = j["meta"].get<std::map<std::string, long>>();
    if (j.contains("vecs")) f.vecs = j["vecs"].get<std::map<std::string, std::vector<long>>>();
    if (j.contains("note")) f.note = j["note"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
    schema_error("bad formula metadata");
  }
  f.expr = from_json(j["expr"]);
  if (j.contains("alt")) f.alt = from_json(j["alt"]);
  return f;
}

// ---------------------------------------------------------------- formal evaluation

KClass eval_formal_k(const Expr& e, const FormalEnv& env) {
  switch (e->kind) {
    case NodeKind::Sym: {
      if (auto r = as_rhom(*e)) {
        auto [c, flip] = serre_canonical(*r);
        auto it = env.syms.find(leaf_key(*rhom(c, e->rank)));
        if (it != env.syms.end()) {
          if (it->second.rank != e->rank) math_error("bound class has the wrong rank for " + to_text(e));
          return flip ? k_dual(it->second) : it->second;
        }
      }
      auto it = env.syms.find(leaf_key(*e));
      if (it != env.syms.end()) {
        if (it->second.rank != e->rank) math_error("bound class has the wrong rank for " + to_text(e));
        return it->second;
      }
      if (env.fallback)
        if (auto k = env.fallback(*e)) return *k;
      schema_error("unbound symbol " + to_text(e));
    }
    case NodeKind::Trivial: return k_trivial(env.ring, e->rank);
    case NodeKind::Sum: {
      KClass s = k_trivial(env.ring, 0);
      for (auto& k : e->kids) s = s + eval_formal_k(k, env);
      return s;
    }
    case NodeKind::Neg: return -eval_formal_k(e->kids[0], env);
    case NodeKind::Dual: return k_dual(eval_formal_k(e->kids[0], env));
    case NodeKind::Twist: {
      int g = env.ring->find(e->name);
      if (g < 0) schema_error("twist by unknown generator " + e->name);
      return k_twist(eval_formal_k(e->kids[0], env), g, static_cast<int>(e->p[0]));
    }
    default: schema_error("K-class expected");
  }
}

GradedClass eval_formal(const Expr& e, const FormalEnv& env) {
  const RingPtr& R = env.ring;
  switch (e->kind) {
    case NodeKind::Zero: return GradedClass(R);
    case NodeKind::Scalar: return GradedClass::constant(R, e->q);
    case NodeKind::Add: {
      GradedClass s(R);
      for (auto& k : e->kids) s += eval_formal(k, env);
      return s;
    }
    case NodeKind::Mul: {
      GradedClass s = GradedClass::constant(R, 1);
      for (auto& k : e->kids) s = s * eval_formal(k, env);
      return s;
    }
    case NodeKind::HPow: {
      int g = R->find(e->name);
      if (g < 0) schema_error("unknown generator " + e->name);
      return GradedClass::gen(R, g, static_cast<int>(e->p[0]));
    }
    case NodeKind::Chern: {
      long k = e->p[0];
      if (k < 0) return GradedClass(R);
      return eval_formal_k(e->kids[0], env).chern(static_cast<int>(k));
    }
    case NodeKind::Euler: {
      KClass c = eval_formal_k(e->kids[0], env);
      if (c.rank < 0) math_error("euler class of negative rank");
      return c.chern(c.rank);
    }
    case NodeKind::Delta: return delta_det(static_cast<int>(e->p[0]), static_cast<int>(e->p[1]), eval_formal_k(e->kids[0], env).c);
    case NodeKind::Push: {
      auto it = env.push.find(e->name);
      if (it == env.push.end()) schema_error("pushforward along undeclared space " + e->name);
      return it->second(eval_formal(e->kids[0], env));
    }
    case NodeKind::Cap: return eval_formal(e->kids[0], env);
    case NodeKind::SW: {
      Ctx cx;
      Poly p = sw_nf(e, cx);
      if (p.empty()) return GradedClass(R);
      auto& [m, c] = *p.begin();
      std::string key = to_json(cx.atoms.at(m[0])).dump();
      auto it = env.sw.find(key);
      if (it == env.sw.end()) schema_error("missing SW entry for " + to_text(e));
      return GradedClass::constant(R, c * it->second);
    }
    default: schema_error("cohomology class expected, got a K-class");
  }
}

namespace {

void walk_leaves(const Expr& e, std::map<std::string, Expr>& out) {
  if (e->kind == NodeKind::Sym) {
    Expr leaf = e;
    if (auto r = as_rhom(*e)) {
      auto [c, flip] = serre_canonical(*r);
      if (flip) leaf = rhom(c, e->rank);
    }
    out.emplace(leaf_key(*leaf), leaf);
  }
  for (auto& k : e->kids) walk_leaves(k, out);
}

}  // namespace

std::vector<Expr> collect_leaves(const Expr& e) {
  std::map<std::string, Expr> m;
  walk_leaves(e, m);
  std::vector<Expr> v;
  for (auto& [k, x] : m) v.push_back(x);
  return v;
}

FormalEnv generic_env(const std::vector<Expr>& leaves, int D, const std::vector<std::pair<std::string, int>>& extra) {
  std::vector<std::pair<std::string, int>> g = extra;
  for (size_t i = 0; i < leaves.size(); ++i)
    for (int k = 1; k <= D; ++k) g.push_back({"x" + std::to_string(i) + "_" + std::to_string(k), k});
  FormalEnv env;
  env.ring = free_ring(g, D);
  for (size_t i = 0; i < leaves.size(); ++i)
    env.syms.emplace(leaf_key(*leaves[i]), k_generic(env.ring, "x" + std::to_string(i) + "_", leaves[i]->rank, D));
  return env;
}

}  // namespace degloc
