#include <doctest.h>

#include "degloc/errors.hpp"
#include "degloc/vw.hpp"

using namespace degloc;

namespace {

long binom(long n, long k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("integrand shape") {
  auto T = toric_builtin("P1xP1");
  for (long n1 = 0; n1 <= 2; ++n1)
    for (long n2 = 0; n2 <= 2; ++n2)
      for (LatticeVec b : {LatticeVec{0, 0}, LatticeVec{1, 0}, LatticeVec{2, 1}, LatticeVec{-1, 3}}) {
        Expr A = monopole_integrand(n1, n2, T.data, b);
        // degree 2n on S^[n1] x S^[n2] after the t^vd scaling
        CHECK(integrand_degree(A) - vd_beta(T.data, b) == 2 * (n1 + n2));
      }
  CHECK_THROWS_AS(monopole_integrand(-1, 0, T.data, {0, 0}), Error);
}

TEST_CASE("n = 0 matches the closed form") {
  for (auto name : {"P2", "P1xP1", "F1", "F2", "P2+P2"}) {
    auto T = toric_builtin(name);
    for (long x = -2; x <= 2; ++x) {
      LatticeVec b(T.data.rho, 0);
      b[0] = x;
      if (T.data.rho > 1) b[1] = 1 - x;
      CHECK(point_integral(T, b, 0, 0) == monopole_n0(T.data, b));
    }
  }
  // P2, beta = 0: chi(-K) = chi(2K) = 10
  CHECK(monopole_n0(toric_builtin("P2").data, {0}) == Rational(1, 1024));
}

TEST_CASE("integrals are homogeneous in t") {
  auto T = toric_builtin("P2");
  for (LatticeVec b : {LatticeVec{0}, LatticeVec{1}, LatticeVec{-1}}) {
    long vd = vd_beta(T.data, b);
    IntegrateOptions o1, o3;
    o3.c0 = 3;
    Rational v1 = point_integral(T, b, 1, 1, o1), v3 = point_integral(T, b, 1, 1, o3);
    Rational f = 1;
    for (long i = 0; i < (vd < 0 ? -vd : vd); ++i) f *= 3;
    CHECK(v3 == (vd >= 0 ? Rational(v1 * f) : Rational(v1 / f)));
  }
}

TEST_CASE("matched P1xP1 and F2 point contributions") {
  auto P = toric_builtin("P1xP1"), F = toric_builtin("F2");
  std::vector<std::pair<LatticeVec, LatticeVec>> pairs = {{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{1, 0}, {1, 1}},
                                                          {{1, 1}, {2, 1}}, {{2, 1}, {3, 1}}};
  for (auto& [a, b] : pairs) {
    REQUIRE(invariants_of(P.data, a) == invariants_of(F.data, b));
    for (long n = 0; n <= 2; ++n) CHECK(point_contribution(P, a, n) == point_contribution(F, b, n));
  }
  // unmatched classes differ
  CHECK(point_contribution(P, {1, 0}, 1) != point_contribution(P, {1, 1}, 1));
}

TEST_CASE("universality fit") {
  IntegrateOptions o;
  o.threads = 2;
  auto runs = fit_runs(1, default_fit_configs(1), o);
  REQUIRE(runs.size() >= 6);
  auto fit = universality_fit(1, runs);
  CHECK(fit.monomials.size() == 5);
  for (auto& r : runs) CHECK(fit.eval(r.inv) == r.value);
  // predicts a surface that was not used
  auto F2 = toric_builtin("F2");
  CHECK(fit.eval(invariants_of(F2.data, {2, 1})) ==
        point_contribution(F2, {2, 1}, 1) / monopole_n0(F2.data, {2, 1}));
  // n = 0: the constant 1
  auto f0 = universality_fit(0, fit_runs(0, {{"P2", {1}}, {"F1", {0, 1}}}));
  CHECK(f0.coeffs.at("1") == 1);
  auto j = fit.to_json();
  CHECK(j["coefficients"].contains("c1beta"));

  // connected surfaces alone have c1^2 + c2 = 12
  std::vector<FitRun> flat;
  for (auto& r : runs)
    if (r.inv.c1sq + r.inv.c2 == 12) flat.push_back(r);
  CHECK_THROWS_WITH_AS(universality_fit(1, flat), doctest::Contains("insufficient surface spread"), Error);

  auto bad = runs;
  bad.back().value += 1;
  try {
    universality_fit(1, bad);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Universality);
  }
  auto dup = runs;
  dup.push_back(runs[0]);
  dup.back().value += 1;
  CHECK_THROWS_WITH_AS(universality_fit(1, dup), doctest::Contains("universality violated"), Error);
}

TEST_CASE("SW tables") {
  auto P2 = toric_builtin("P2");
  SWTable t(P2.data);
  t.set({0}, 0, 1);
  CHECK_THROWS_WITH_AS(t.set({1}, 0, 1), doctest::Contains("vd != 0"), Error);
  t.set({1}, 0, 0);
  CHECK_THROWS_AS(t.set({0}, 2, 1), Error);
  SWTable h(P2.data, true);
  h.set({1}, 2, 1);
  CHECK(*h.get({1}, 2) == 1);
  SWAtom a;
  a.beta = {2};
  CHECK(*t.lookup(a) == 0);  // vd != 0
  a.beta = {-3};
  CHECK(!t.lookup(a));       // vd = 0 and absent

  // effective classes with q = pg = 0: (1 + h)^{h0 - chi} gives 1 in top degree
  for (auto name : {"P2", "P1xP1", "F1", "F2"}) {
    auto T = toric_builtin(name);
    for (long x = -3; x <= 3; ++x)
      for (long y = -3; y <= 3; ++y) {
        LatticeVec b(T.data.rho, 0);
        b[0] = x;
        if (T.data.rho > 1) b[1] = y;
        else if (y) continue;
        long vd = vd_beta(T.data, b);
        if (vd < 0 || vd > 4) continue;
        long h0 = static_cast<long>(T.global_sections(T.rep(b)).size());
        long expect = h0 ? binom(h0 - riemann_roch_chi(T.data, b), h0 - 1 - vd) : 0;
        CHECK(toric_sw(T, b, vd) == expect);
        if (vd > 0) CHECK(toric_sw(T, b, vd - 1) == 0);
      }
  }
  CHECK(toric_sw(P2, {0}, 0) == 1);
  CHECK(toric_sw(P2, {-3}, 0) == 0);
}

TEST_CASE("monopole contributions") {
  auto F1 = toric_builtin("F1");
  // the exceptional curve: ray 1 of F1
  LatticeVec E = {0, 1};
  REQUIRE(vd_beta(F1.data, E) == 0);
  REQUIRE(F1.data.dot(E, E) == -1);
  auto sw = toric_sw_table(F1, {E, {0, 0}, {1, 0}});
  CHECK(*sw.get(E) == 1);
  for (long n = 0; n <= 2; ++n) {
    auto r = monopole_contribution(F1, sw, E, n, false);
    CHECK(r.value == point_contribution(F1, E, n));
    CHECK(r.parts.size() == static_cast<size_t>(n + 1));
    auto rr = monopole_contribution(F1, sw, E, n, true);
    CHECK(rr.value == r.value);
    CHECK(rr.t_power == 0);
  }
  auto z = monopole_contribution(F1, sw, {1, 0}, 1, false);  // vd = 1
  CHECK(z.value == 0);
  CHECK(monopole_contribution(F1, sw, {0, 0}, 0, false).value == monopole_n0(F1.data, {0, 0}));
  SWTable empty(F1.data);
  CHECK_THROWS_WITH_AS(monopole_contribution(F1, empty, E, 1, false), doctest::Contains("missing SW entry"), Error);

  // K3 through the fit: beta = 0, q = 0
  auto K3 = numeric_profile("K3");
  SWTable k3(K3);
  k3.set(LatticeVec(K3.rho, 0), 0, 1);
  auto fit = universality_fit(1, fit_runs(1, default_fit_configs(1)));
  auto r = monopole_from_fit(K3, k3, LatticeVec(K3.rho, 0), 1, fit);
  CHECK(r.value == monopole_n0(K3, LatticeVec(K3.rho, 0)) * fit.eval(invariants_of(K3, LatticeVec(K3.rho, 0))));
}

TEST_CASE("n = 2 fit has exponential shape") {
  auto f1 = universality_fit(1, fit_runs(1, default_fit_configs(1)));
  auto f2 = universality_fit(2, fit_runs(2, default_fit_configs(2)));
  CHECK(f2.monomials.size() == 15);
  // N = exp(sum x_i log A_i): the degree 2 part of N_2 is N_1^2 / 2 and the constant terms vanish
  CHECK(f1.coeffs.at("1") == 0);
  CHECK(f2.coeffs.at("1") == 0);
  const char* v[4] = {"c1sq", "c2", "betasq", "c1beta"};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      std::string key = i == j ? std::string(v[i]) + "^2" : std::string(v[i]) + "*" + v[j];
      Rational expect = f1.coeffs.at(v[i]) * f1.coeffs.at(v[j]);
      if (i == j) expect /= 2;
      CHECK(f2.coeffs.at(key) == expect);
    }
}
