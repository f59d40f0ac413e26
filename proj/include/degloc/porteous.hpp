#pragma once

// Degeneracy-locus pushforwards and the nested Hilbert scheme formulas built from them.

#include <string>
#include <vector>

#include "degloc/formula.hpp"
#include "degloc/ring.hpp"
#include "degloc/surface.hpp"

namespace degloc {

struct PorteousResult {
  GradedClass cls;
  int vd = 0;
};

// Delta^r_{e1-e0+r}(c(E1)/c(E0)); E is c(E1)/c(E0)
PorteousResult degeneracy_pushforward_X(int e0, int e1, int r, const ChernSeries& E, int dimX);

// Symbols E0, E1, B; U is split over the tower generators gr_gen(h, r, i).
// expr = Delta^r_{b+e1-e0}(c(Q_B - E)); alt (with esurj) = c_{r(b+e1-e0)}(U^dual (B - E)).
Formula degeneracy_pushforward_GrB(int e0, int e1, int b, int r, bool esurj, const std::string& h = "h");

// c_{rg}(U^dual G) with G of rank g
Formula comparison_factor(const Expr& G, int r, const std::string& h = "h");

// building blocks over S^[n1] x S^[n2] (x P(B))
Expr L_rhom(const SurfaceData& S, const LatticeVec& beta, long a, long b, long n_a, long n_b, Xi xi, bool tf = false);
Expr B_sections(const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A, long li = 0);
Expr CO_class(const SurfaceData& S, const LatticeVec& beta, long n1, long n2, const std::string& h = "h");

Formula points_and_curve_formula(long n1, long n2, const SurfaceData& S, const LatticeVec& beta);
Formula nested_reduced_formula(long n1, long n2, const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A,
                               bool h2_vanishing_all);
Formula nested_vir_comparison(long n1, long n2, const SurfaceData& S, const LatticeVec& beta);
Formula ell_step_formula(const std::vector<long>& n, const std::vector<LatticeVec>& beta, const SurfaceData& S,
                         const LatticeVec& A);
// [vir] = c_pg(U^dual G) [red] with G = H^2(O) tensor U; zero when pg > 0
Formula vir_from_reduced_formula(long n1, long n2, const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A);

enum class SWCase { PgPositive, PgZeroGeneral, PgZeroNoneffective };
SWCase parse_sw_case(const std::string& s);
const char* sw_case_name(SWCase c);
Formula sw_coupled_pushforward(SWCase c, long i, long n1, long n2, const SurfaceData& S, const LatticeVec& beta,
                               bool dual_effective);

struct DualityResult {
  Formula rewritten;
  int sign = 1;  // predicted: rewritten = sign * original
  long s = 0;
};
DualityResult duality_rewrite(const Formula& f, const SurfaceData& S);

}  // namespace degloc
