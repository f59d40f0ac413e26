#pragma once

// Formula trees shared by the formal and the equivariant evaluators.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degloc/ring.hpp"

namespace degloc {

enum class NodeKind {
  Sym,      // named K-class leaf; "Rhom" leaves carry their twist in params
  Trivial,  // trivial bundle of given rank
  Sum,
  Neg,
  Dual,
  Twist,    // tensor with O(m h), name = h
  Chern,    // params {k}
  Euler,
  Delta,    // params {a, b}
  Mul,
  Add,
  Scalar,
  HPow,     // h^i, name = h, params {i}
  Push,     // pushforward along a declared space, name = space
  Cap,      // cap with the fundamental class of a cycle, name = cycle
  SW,       // Seiberg-Witten number, see sw_atom
  Zero
};

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind = NodeKind::Zero;
  std::string name;
  std::vector<long> p;
  Rational q;
  int rank = 0;  // virtual rank of K-level nodes
  std::vector<Expr> kids;

  bool is_k() const;
};

const char* kind_name(NodeKind k);

// Twist of an ideal-sheaf Rhom: xi = l L_{beta_li} + k K + D (explicit class) and t^w.
struct Xi {
  long l = 0;
  long k = 0;
  std::vector<long> D;  // empty means zero
  long t = 0;
  long li = 0;
};

// Rhom_pi(I_a, I_b xi); index 0 stands for O, so Rhom(0, 0, xi) = R pi_* xi.
// Trace-free variant subtracts R pi_* xi.
struct RhomLeaf {
  long a = 0, b = 0;
  Xi xi;
  bool tf = false;
};

Expr sym(const std::string& name, int rank, std::vector<long> params = {});
Expr rhom(const RhomLeaf& r, int rank);
std::optional<RhomLeaf> as_rhom(const Node& n);
Expr trivial(int rank);
Expr ksum(std::vector<Expr> xs);
Expr kneg(Expr x);
Expr kdiff(Expr a, Expr b);
Expr kdual(Expr x);
Expr ktwist(Expr x, const std::string& h, long m);
Expr chern(long k, Expr x);
Expr euler(Expr x);
Expr delta(long a, long b, Expr x);
Expr mul(std::vector<Expr> xs);
Expr add(std::vector<Expr> xs);
Expr scalar(const Rational& q);
Expr one();
Expr zero();
Expr hpow(const std::string& h, long i);
Expr push(const std::string& space, Expr x);
Expr cap(const std::string& cycle, Expr x);

// SW_beta^j with the data needed for canonicalisation.
struct SWAtom {
  long j = 0;
  long chiO = 1;
  long q = 0;
  long pg = 0;
  long vd = 0;
  std::vector<long> beta;
  std::vector<long> K;
};
Expr sw(const SWAtom& a);
SWAtom sw_data(const Node& n);

nlohmann::json to_json(const Expr& e);
Expr from_json(const nlohmann::json& j);
std::string to_text(const Expr& e);
std::string leaf_key(const Node& n);  // stable key of a K-class leaf

// Serre duality on Rhom leaves: Rhom(a, b, xi) is dual to Rhom(b, a, K - xi).
RhomLeaf serre_partner(const RhomLeaf& r);
// canonical representative and whether the leaf is the dual of it
std::pair<RhomLeaf, bool> serre_canonical(const RhomLeaf& r);

// Rebuild bottom-up; f may replace any node (children already rewritten).
Expr transform(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& f);

// Normal form: polynomial in canonical atoms with rational coefficients.
Expr normal_form(const Expr& e);
bool nf_equal(const Expr& a, const Expr& b);
bool nf_is_zero(const Expr& e);

// A formula with its bookkeeping.
struct Formula {
  std::string id;
  Expr expr;
  std::optional<Expr> alt;
  std::map<std::string, long> meta;
  std::map<std::string, std::vector<long>> vecs;
  std::string note;
};
nlohmann::json to_json(const Formula& f);
Formula formula_from_json(const nlohmann::json& j);

// Formal evaluation over a ring with bound symbols.
struct FormalEnv {
  RingPtr ring;
  std::map<std::string, KClass> syms;  // keyed by leaf_key
  std::map<std::string, Rational> sw;  // keyed by to_json(atom).dump()
  std::map<std::string, std::function<GradedClass(const GradedClass&)>> push;  // result pulled back to ring
  std::function<std::optional<KClass>(const Node&)> fallback;
};
GradedClass eval_formal(const Expr& e, const FormalEnv& env);
KClass eval_formal_k(const Expr& e, const FormalEnv& env);

// All K-class leaves (canonicalised), for binding generic classes.
std::vector<Expr> collect_leaves(const Expr& e);
// ring with free Chern generators x<leaf>_<k> for every leaf; fills env.syms
FormalEnv generic_env(const std::vector<Expr>& leaves, int D, const std::vector<std::pair<std::string, int>>& extra = {});

}  // namespace degloc
