#pragma once

// Projective bundle towers over a base ring and their pushforwards.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "degloc/ring.hpp"

namespace degloc {

struct SpaceModel;
using SpacePtr = std::shared_ptr<const SpaceModel>;

struct SpaceModel {
  RingPtr ring;
  SpacePtr base;          // null for a point with generators
  int h = -1;             // generator c1(O(1)) of this level
  int b = 0;              // rank of the projectivised bundle
  std::optional<KClass> B;  // pulled back to this level

  int dim() const { return ring->dim(); }
  int level() const { return ring->levels() - 1; }
  KClass O(int m) const;  // O(m) on this level
  KClass Q() const;       // B / O(-1)
  std::string describe() const { return ring->describe(); }
};

SpacePtr point_with_generators(const std::vector<std::pair<std::string, int>>& gens, int D);
SpacePtr projective_bundle(const SpacePtr& base, const KClass& B, const std::string& hname = "h");

GradedClass pullback(const SpaceModel& P, const GradedClass& x);  // base class to P
KClass pullback(const SpaceModel& P, const KClass& E);
GradedClass proj_pushforward(const SpaceModel& P, const GradedClass& x);

// Gr(r,B) modelled by the flag tower P(B), P(B - L1), ...; U = L1 + ... + Lr.
struct GrassmannModel {
  SpacePtr base;
  std::vector<SpacePtr> tower;  // tower[i] carries h_{i+1}
  int r = 0;
  int b = 0;

  const SpaceModel& top() const { return *tower.back(); }
  KClass U() const;
  KClass Udual() const;
  KClass Q() const;
  GradedClass pushforward(const GradedClass& x) const;  // Gr -> base
  GradedClass lift(const GradedClass& base_class) const;
};

// tower generators are named h when r = 1 and h1..hr otherwise
std::string gr_gen(const std::string& h, int r, int i);
GrassmannModel grassmann_bundle(const SpacePtr& base, const KClass& B, int r, const std::string& h = "h");

// Sum over r-subsets S of F(roots of U^dual at S) / prod_{i in S, j not in S}(b_j - b_i).
using SymFn = std::function<GradedClass(const std::vector<GradedClass>&)>;
GradedClass grassmann_split_pushforward(const SymFn& F, int r, const std::vector<GradedClass>& roots);

}  // namespace degloc
