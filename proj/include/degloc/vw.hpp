#pragma once

// Vafa-Witten monopole contributions and universality fits.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "degloc/formula.hpp"
#include "degloc/hilbloc.hpp"
#include "degloc/surface.hpp"

namespace degloc {

// SW_beta^j; j = 0 is the ordinary invariant
class SWTable {
 public:
  SWTable() = default;
  SWTable(const SurfaceData& S, bool higher_mode = false) : S_(S), higher_(higher_mode) {}

  void set(const LatticeVec& beta, long j, const Rational& v);
  std::optional<Rational> get(const LatticeVec& beta, long j = 0) const;
  // value used by evaluators; absent entries with vd != 0 are 0 by definition
  std::optional<Rational> lookup(const SWAtom& a) const;
  const SurfaceData& surface() const { return S_; }
  size_t size() const { return vals_.size(); }

 private:
  SurfaceData S_;
  bool higher_ = false;
  std::map<std::pair<LatticeVec, long>, Rational> vals_;
};

SWTable sw_table_from_file(const SurfaceFile& f, bool higher_mode = false);
// degrees of the virtual classes of the linear systems |L| on a toric surface with q = pg = 0
Rational toric_sw(const ToricSurface& T, const LatticeVec& beta, long j, const IntegrateOptions& opt = {});
SWTable toric_sw_table(const ToricSurface& T, const std::vector<LatticeVec>& betas, const IntegrateOptions& opt = {});

// the integrand A(I1, I2, L) over S^[n1] x S^[n2]
Expr monopole_integrand(long n1, long n2, const SurfaceData& S, const LatticeVec& beta);
long integrand_degree(const Expr& A);  // cohomological degree, euler of a K-class counted by its rank

// n = 0 value: (-1)^chi(L - K) 2^-chi(2K - L), times t^vd
Rational monopole_n0(const SurfaceData& S, const LatticeVec& beta);

// int_{S^[n1] x S^[n2]} A at t = c0
Rational point_integral(const ToricSurface& T, const LatticeVec& beta, long n1, long n2, const IntegrateOptions& opt = {});
// sum over n1 + n2 = n
Rational point_contribution(const ToricSurface& T, const LatticeVec& beta, long n, const IntegrateOptions& opt = {});

struct MonopoleResult {
  LatticeVec beta;
  long n = 0;
  Rational value;      // coefficient of t^t_power
  long t_power = 0;
  bool refined = false;
  std::vector<std::pair<std::array<long, 2>, Rational>> parts;  // (n1, n2) -> integral
  nlohmann::json meta;
};

MonopoleResult monopole_contribution(const ToricSurface& T, const SWTable& sw, const LatticeVec& beta, long n, bool refined,
                                     const IntegrateOptions& opt = {});

// universality
struct Invariants {
  long c1sq = 0, c2 = 0, betasq = 0, c1beta = 0;
  bool operator==(const Invariants& o) const = default;
};
Invariants invariants_of(const SurfaceData& S, const LatticeVec& beta);

struct FitRun {
  std::string label;
  Invariants inv;
  Rational value;  // Z_n / Z_0
};

struct FitResult {
  int n = 0;
  int degree = 0;
  std::vector<std::string> monomials;
  std::map<std::string, Rational> coeffs;
  size_t runs = 0;
  Rational eval(const Invariants& x) const;
  nlohmann::json to_json() const;
};

FitResult universality_fit(int n, const std::vector<FitRun>& runs);
struct FitConfig {
  std::string surface;
  LatticeVec beta;
};
std::vector<FitConfig> default_fit_configs(int n);
std::vector<FitRun> fit_runs(int n, const std::vector<FitConfig>& configs, const IntegrateOptions& opt = {});

// for surfaces without a torus action: Z_0 * N_n from a fit
MonopoleResult monopole_from_fit(const SurfaceData& S, const SWTable& sw, const LatticeVec& beta, long n, const FitResult& fit);

}  // namespace degloc
