#include "degloc/bundles.hpp"

#include <algorithm>

#include "degloc/errors.hpp"

namespace degloc {

SpacePtr point_with_generators(const std::vector<std::pair<std::string, int>>& gens, int D) {
  auto s = std::make_shared<SpaceModel>();
  s->ring = free_ring(gens, D);
  return s;
}

SpacePtr projective_bundle(const SpacePtr& base, const KClass& B, const std::string& hname) {
  if (B.rank < 1) schema_error("projective_bundle: rank(B) < 1");
  const Ring& R0 = *base->ring;
  if (static_cast<int>(R0.gens.size()) >= kMaxGens) schema_error("too many generators");
  auto R = std::make_shared<Ring>(R0);
  std::string name = hname;
  while (R->find(name) >= 0) name += "'";
  const int lv = R0.levels();
  R->gens.push_back({name, 1, lv});
  R->level_dim.push_back(R0.dim() + B.rank - 1);
  Relation rel;
  rel.gen = static_cast<int>(R->gens.size()) - 1;
  rel.rank = B.rank;
  for (int i = 1; i <= B.rank; ++i) rel.coeff.push_back(B.c[i].terms());
  R->rels.push_back(std::move(rel));

  auto s = std::make_shared<SpaceModel>();
  s->ring = R;
  s->base = base;
  s->h = static_cast<int>(R->gens.size()) - 1;
  s->b = B.rank;
  s->B = KClass(B.rank, ChernSeries(B.c.cls().in_ring(R)));
  return s;
}

KClass SpaceModel::O(int m) const {
  if (h < 0) return k_trivial(ring, 1);
  return k_line(GradedClass::gen(ring, h) * Rational(m));
}

KClass SpaceModel::Q() const {
  if (!B) schema_error("no tautological quotient on a base model");
  return *B - O(-1);
}

GradedClass pullback(const SpaceModel& P, const GradedClass& x) { return x.in_ring(P.ring); }

KClass pullback(const SpaceModel& P, const KClass& E) {
  return KClass(E.rank, ChernSeries(E.c.cls().in_ring(P.ring)));
}

GradedClass proj_pushforward(const SpaceModel& P, const GradedClass& x) {
  if (!P.base) schema_error("pushforward from a base model");
  if (x.ring() != P.ring) schema_error("pushforward: class lives in another ring");
  Terms out;
  for (auto& [m, c] : x.terms()) {
    if (m.e[P.h] != P.b - 1) continue;
    Monomial mm = m;
    mm.e[P.h] = 0;
    mm.deg -= P.b - 1;
    out[mm] += c;
  }
  return GradedClass(P.base->ring, std::move(out));
}

// ------------------------------------------------------------- Grassmann

std::string gr_gen(const std::string& h, int r, int i) { return r == 1 ? h : h + std::to_string(i); }

GrassmannModel grassmann_bundle(const SpacePtr& base, const KClass& B, int r, const std::string& h) {
  if (r < 1 || r > B.rank) schema_error("grassmann_bundle: need 1 <= r <= rank B");
  GrassmannModel g;
  g.base = base;
  g.r = r;
  g.b = B.rank;
  SpacePtr cur = base;
  KClass K = B;
  for (int i = 1; i <= r; ++i) {
    SpacePtr next = projective_bundle(cur, K, gr_gen(h, r, i));
    g.tower.push_back(next);
    K = pullback(*next, K) - next->O(-1);
    cur = next;
  }
  return g;
}

KClass GrassmannModel::U() const {
  const RingPtr& R = top().ring;
  KClass u = k_trivial(R, 0);
  for (auto& lv : tower) u = u + k_line(-GradedClass::gen(R, lv->h));
  return u;
}

KClass GrassmannModel::Udual() const { return k_dual(U()); }

KClass GrassmannModel::Q() const { return pullback(top(), *tower.front()->B) - U(); }

GradedClass GrassmannModel::lift(const GradedClass& x) const { return x.in_ring(top().ring); }

GradedClass GrassmannModel::pushforward(const GradedClass& x) const {
  const RingPtr& R = top().ring;
  GradedClass y = x.in_ring(R);
  // fundamental class of the flag fibre: prod h_i^{r-i}
  for (int i = 0; i < r; ++i) y = y * GradedClass::gen(R, tower[i]->h, r - 1 - i);
  for (int i = r - 1; i >= 0; --i) y = proj_pushforward(*tower[i], y);
  return y;
}

// ------------------------------------------------------- split roots

GradedClass grassmann_split_pushforward(const SymFn& F, int r, const std::vector<GradedClass>& roots) {
  const int b = static_cast<int>(roots.size());
  if (b == 0 || r < 1 || r > b) schema_error("grassmann_split_pushforward: need 1 <= r <= #roots");
  const RingPtr& R = roots[0].ring();
  for (auto& x : roots)
    if (!x.homogeneous_of(1)) schema_error("split roots must have degree 1");
  RingPtr U = untruncated_copy(R);
  std::vector<GradedClass> x;
  for (auto& y : roots) x.push_back(y.in_ring(U));

  auto diff = [&](int i, int j) { return x[j] - x[i]; };
  GradedClass V = GradedClass::constant(U, 1);
  for (int i = 0; i < b; ++i)
    for (int j = i + 1; j < b; ++j) V = V * diff(i, j);

  GradedClass N(U);
  std::vector<int> sel(b, 0);
  std::fill(sel.end() - r, sel.end(), 1);
  do {
    std::vector<GradedClass> args;
    for (int i = 0; i < b; ++i)
      if (sel[i]) args.push_back(-x[i]);
    GradedClass term = F(args).in_ring(U);
    int flips = 0;
    for (int p = 0; p < b; ++p)
      for (int q = p + 1; q < b; ++q) {
        if (sel[p] == sel[q])
          term = term * diff(p, q);
        else if (sel[q] && !sel[p])
          ++flips;
      }
    if (flips % 2)
      N -= term;
    else
      N += term;
  } while (std::next_permutation(sel.begin(), sel.end()));

  GradedClass q(U);
  try {
    q = N.divide_exact(V);
  } catch (const Error&) {
    math_error("non-symmetric input");
  }
  return GradedClass(R, q.terms());
}

}  // namespace degloc
