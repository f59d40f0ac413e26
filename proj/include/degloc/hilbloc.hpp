#pragma once

// Torus localization on S^[n1] x S^[n2] (x P(B)) for toric S.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "degloc/formula.hpp"
#include "degloc/ring.hpp"
#include "degloc/surface.hpp"

namespace degloc {

struct Partition {
  std::vector<int> parts;  // weakly decreasing, positive

  int size() const;
  // boxes (i, j): 0 <= j < parts.size(), 0 <= i < parts[j]
  std::vector<std::array<int, 2>> cells() const;
  void check() const;
};
std::vector<Partition> partitions_of(int n);

// exponents of t1, t2 and the scaling parameter t
using Exp3 = std::array<long, 3>;

class EquivChar {
 public:
  std::map<Exp3, long> terms;

  EquivChar() = default;
  static EquivChar mono(const Exp3& e, long c = 1);
  static EquivChar mono(const Weight2& m, long c = 1) { return mono(Exp3{m[0], m[1], 0}, c); }

  EquivChar& operator+=(const EquivChar& o);
  EquivChar& operator-=(const EquivChar& o);
  EquivChar operator+(const EquivChar& o) const;
  EquivChar operator-(const EquivChar& o) const;
  EquivChar operator*(const EquivChar& o) const;
  EquivChar operator*(long c) const;
  EquivChar shift(const Exp3& e) const;
  EquivChar conj() const;  // t -> t^{-1}
  long rank() const;        // value at t1 = t2 = t = 1
  long num_terms() const;   // sum of |coefficients|
  bool movable() const;     // no weight-zero term
  bool operator==(const EquivChar& o) const { return terms == o.terms; }
  std::string str() const;
};

// num / prod (1 - t^{den_i}); the chart-local form of an infinite character
struct LocalChar {
  EquivChar num;
  std::vector<Weight2> den;
};

// x = t^{m1}, y = t^{m2}
EquivChar partition_char(const Partition& mu, const Weight2& m1, const Weight2& m2);
EquivChar tangent_character(const Partition& mu, const Weight2& m1, const Weight2& m2);
// chi(I_mu, I_nu xi) on one chart; an empty partition stands for O
LocalChar rhom_character(const Partition& mu, const Partition& nu, const Weight2& m1, const Weight2& m2, const Exp3& xi);
// finite part of the above: rhom_character = xi / P + rhom_finite
EquivChar rhom_finite(const Partition& mu, const Partition& nu, const Weight2& m1, const Weight2& m2, const Exp3& xi);
// sum of local characters; every denominator must cancel ("assembly failure" otherwise)
EquivChar assemble(const std::vector<LocalChar>& parts);

struct PBData {
  long li = 0;
  LatticeVec A;
};

struct NestedFixedPoint {
  std::vector<Partition> mu, nu;  // one per chart
  int pb = -1;                    // weight line of B, -1 without P(B)
};

std::vector<NestedFixedPoint> enumerate_fixed_points(const ToricSurface& T, int n1, int n2, int pb_lines = 0);

struct EquivSpace {
  const ToricSurface* T = nullptr;
  int n1 = 0, n2 = 0;
  std::vector<LatticeVec> betas;  // L_{beta_li}
  std::optional<PBData> pb;       // X x P(B), B = H^0(L_{beta_li}(A)), hyperplane class "h"
  std::function<std::optional<Rational>(const SWAtom&)> sw;

  int dim() const;
};

struct IntegrateOptions {
  unsigned seed = 1;
  int threads = 1;
  long c0 = 1;  // value of the scaling weight t
};

struct IntegrateResult {
  Rational value;
  long a = 0, b = 0;  // specialisation t1 = s^a, t2 = s^b
  long c0 = 1;
  size_t fixed_points = 0;
  int redraws = 0;
  unsigned seed = 1;
};

// Laurent coefficients in s at or below s^0, keyed by exponent
using SLaurent = std::map<int, Rational>;
Rational nonequivariant_limit(const SLaurent& x);

// Leaves understood: Rhom leaves, sym "B" (params {li, A...}), sym "TX" (tangent of the space),
// trivial, twists and powers of "h" on P(B), SW atoms through EquivSpace::sw.
IntegrateResult equivariant_integrate(const Expr& e, const EquivSpace& X, const IntegrateOptions& opt = {});

// tangent character of the whole space at a fixed point
EquivChar space_tangent(const EquivSpace& X, const NestedFixedPoint& p);
// fiber character of a K-class expression at a fixed point
EquivChar k_character(const Expr& k, const EquivSpace& X, const NestedFixedPoint& p);

// xi^[n] on factor a (1 or 2) as Rpi_* xi - Rpi_*(I_a xi)
Expr tautological(const SurfaceData& S, const LatticeVec& beta, long a, long n_a, Xi xi);
Expr tangent_leaf(int dim);

}  // namespace degloc
