#pragma once

// Truncated graded polynomial rings with exact rational coefficients,
// Chern series and K-theory classes.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace degloc {

using Rational = mpq_class;

std::string to_string(const Rational& q);  // "p/q" or "p"
Rational parse_rational(const std::string& s);

// n(n-1)...(n-k+1)/k!, zero for k < 0.  Works for negative n.
Rational binom(const Rational& n, int k);

constexpr int kMaxGens = 32;

struct Monomial {
  int deg = 0;  // weighted degree
  std::array<uint8_t, kMaxGens> e{};

  bool operator<(const Monomial& o) const {
    if (deg != o.deg) return deg < o.deg;
    return e < o.e;
  }
  bool operator==(const Monomial& o) const { return deg == o.deg && e == o.e; }
};

using Terms = std::map<Monomial, Rational>;

struct Generator {
  std::string name;
  int degree;
  int level;
};

// h^b = -(c_1 h^{b-1} + ... + c_b), coefficients live on lower levels.
struct Relation {
  int gen;
  int rank;
  std::vector<Terms> coeff;  // coeff[i-1] = c_i
};

class Ring {
 public:
  std::vector<Generator> gens;
  std::vector<int> level_dim;  // dimension of the space at each level
  std::vector<Relation> rels;  // rels[k-1] belongs to level k

  int dim() const { return level_dim.back(); }
  int levels() const { return static_cast<int>(level_dim.size()); }
  int find(const std::string& name) const;  // -1 when absent
  bool admissible(const Monomial& m) const;
  std::string describe() const;
};

using RingPtr = std::shared_ptr<const Ring>;

RingPtr free_ring(const std::vector<std::pair<std::string, int>>& gens, int D);
// same generators, no relations, no truncation; used for exact division
RingPtr untruncated_copy(const RingPtr& r);

class GradedClass {
 public:
  GradedClass() = default;
  explicit GradedClass(RingPtr r) : ring_(std::move(r)) {}
  GradedClass(RingPtr r, Terms t);

  static GradedClass constant(RingPtr r, const Rational& c);
  static GradedClass gen(RingPtr r, int i, int power = 1);
  static GradedClass gen(RingPtr r, const std::string& name, int power = 1);

  const RingPtr& ring() const { return ring_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int dim() const { return ring_->dim(); }

  GradedClass component(int k) const;
  Rational constant_term() const;
  bool homogeneous_of(int k) const;

  GradedClass operator+(const GradedClass& o) const;
  GradedClass operator-(const GradedClass& o) const;
  GradedClass operator-() const;
  GradedClass operator*(const GradedClass& o) const;
  GradedClass operator*(const Rational& q) const;
  GradedClass& operator+=(const GradedClass& o);
  GradedClass& operator-=(const GradedClass& o);
  GradedClass pow(int k) const;

  bool operator==(const GradedClass& o) const { return terms_ == o.terms_; }
  bool operator!=(const GradedClass& o) const { return !(*this == o); }

  // same monomials read in another ring sharing the generator prefix
  GradedClass in_ring(const RingPtr& r) const;

  std::string str() const;

  // exact quotient; throws when the remainder is nonzero
  GradedClass divide_exact(const GradedClass& d) const;

 private:
  void reduce();
  RingPtr ring_;
  Terms terms_;
};

class ChernSeries {
 public:
  explicit ChernSeries(GradedClass c);
  static ChernSeries one(const RingPtr& r);
  const GradedClass& cls() const { return c_; }
  GradedClass operator[](int k) const;  // zero outside [0, D]
  const RingPtr& ring() const { return c_.ring(); }

 private:
  GradedClass c_;
};

struct KClass {
  int rank = 0;
  ChernSeries c;

  KClass(int r, ChernSeries s) : rank(r), c(std::move(s)) {}
  GradedClass chern(int k) const { return c[k]; }
  KClass operator+(const KClass& o) const;
  KClass operator-(const KClass& o) const;
  KClass operator-() const;
  bool operator==(const KClass& o) const { return rank == o.rank && c.cls() == o.c.cls(); }
};

ChernSeries series_invert(const GradedClass& c);
GradedClass delta_det(int a, int b, const ChernSeries& c);
GradedClass determinant(const std::vector<std::vector<GradedClass>>& M, const RingPtr& r);

KClass k_trivial(const RingPtr& r, int rank);
KClass k_line(const GradedClass& c1);  // line bundle with given first Chern class
KClass k_twist(const KClass& E, const GradedClass& line);  // E tensor line, line = c1 (degree 1)
KClass k_twist(const KClass& E, int gen, int m);
KClass k_dual(const KClass& E);
KClass k_scale(const KClass& E, int n);  // n copies (n may be negative)
// formal class with free Chern generators name_1..name_k taken from the ring
KClass k_generic(const RingPtr& r, const std::string& name, int rank, int ncls);

}  // namespace degloc
