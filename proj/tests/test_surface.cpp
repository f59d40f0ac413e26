#include <doctest.h>

#include <random>

#include "degloc/errors.hpp"
#include "degloc/surface.hpp"

using namespace degloc;

namespace {

// number of monomials of degree d in 3 variables
long p2_sections(long d) { return d < 0 ? 0 : (d + 1) * (d + 2) / 2; }

}  // namespace

TEST_CASE("Riemann-Roch and virtual dimension on P2") {
  auto T = toric_builtin("P2");
  const auto& S = T.data;
  CHECK(S.rho == 1);
  CHECK(S.Q[0][0] == 1);
  CHECK(S.K == LatticeVec{-3});
  CHECK(S.K2() == 9);
  CHECK(S.e == 3);
  CHECK(riemann_roch_chi(S, {0}) == 1);
  CHECK(riemann_roch_chi(S, {1}) == 3);
  for (long d = 0; d <= 6; ++d) {
    CHECK(riemann_roch_chi(S, {d}) == p2_sections(d));
    CHECK(vd_beta(S, {d}) == d * (d + 3) / 2);
  }
  CHECK(vd_beta(S, S.K) == 0);
  for (long a = 0; a <= 3; ++a)
    for (long b = 0; b <= 3; ++b) CHECK(twist_dim_d(S, {b}, {a}) == a * (2 * b + a + 3) / 2);
}

TEST_CASE("K3 profile") {
  auto S = numeric_profile("K3");
  CHECK(riemann_roch_chi(S, {1, -1}) == 1);  // beta^2 = -2
  CHECK(S.dot({1, -1}, {1, -1}) == -2);
  CHECK(vd_beta(S, {0, 0}) == 0);
  CHECK(S.pg == 1);
}

TEST_CASE("general type profiles satisfy Noether") {
  for (int k = 1; k <= 9; ++k)
    for (int c = 1; c <= 3; ++c) {
      auto S = numeric_profile("gt_k" + std::to_string(k) + "_chi" + std::to_string(c));
      CHECK(12 * S.chiO == S.K2() + S.e);
      CHECK(vd_beta(S, S.K) == 0);
    }
  CHECK_THROWS_AS(numeric_profile("gt_k10_chi1"), Error);
  CHECK_THROWS_AS(numeric_profile("nope"), Error);
}

TEST_CASE("toric built-ins") {
  struct Want {
    const char* name;
    long e, K2;
  };
  for (auto w : {Want{"P2", 3, 9}, Want{"P1xP1", 4, 8}, Want{"F1", 4, 8}, Want{"F2", 4, 8}, Want{"F3", 4, 8}}) {
    auto T = toric_builtin(w.name);
    CHECK(static_cast<long>(T.charts.size()) == w.e);
    CHECK(T.data.e == w.e);
    CHECK(T.data.K2() == w.K2);
    CHECK(T.data.chiO == 1);
    // sum of ray classes is -K
    LatticeVec s(T.data.rho, 0);
    for (auto& v : T.ray_class) s = vec_add(s, v);
    CHECK(vec_scale(s, -1) == T.data.K);
  }
  auto F2 = toric_builtin("F2");
  // basis (f, s): f^2 = 0, f.s = 1, s^2 = -2, K = -2s - 4f
  CHECK(F2.data.Q == std::vector<std::vector<long>>{{0, 1}, {1, -2}});
  CHECK(F2.data.K == LatticeVec{-4, -2});
  auto Q = toric_builtin("P1xP1");
  CHECK(Q.data.Q == std::vector<std::vector<long>>{{0, 1}, {1, 0}});
  CHECK(Q.data.K == LatticeVec{-2, -2});
}

TEST_CASE("Riemann-Roch and twist dimension agree on random inputs") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<long> c(-4, 4);
  for (auto name : {"P2", "P1xP1", "F1", "F2"}) {
    auto T = toric_builtin(name);
    for (int t = 0; t < 50; ++t) {
      LatticeVec b(T.data.rho), A(T.data.rho);
      for (auto& x : b) x = c(rng);
      for (auto& x : A) x = c(rng);
      CHECK(twist_dim_d(T.data, b, A) == riemann_roch_chi(T.data, vec_add(b, A)) - riemann_roch_chi(T.data, b));
    }
  }
}

TEST_CASE("polytope sections") {
  auto P2 = toric_builtin("P2");
  for (long d = 0; d <= 5; ++d) CHECK(static_cast<long>(P2.global_sections(P2.rep({d})).size()) == p2_sections(d));
  CHECK(P2.global_sections(P2.rep({-1})).empty());
  auto Q = toric_builtin("P1xP1");
  for (long a = 0; a <= 3; ++a)
    for (long b = 0; b <= 3; ++b) {
      long n = static_cast<long>(Q.global_sections(Q.rep({a, b})).size());
      CHECK(n == (a + 1) * (b + 1));
      CHECK(n == riemann_roch_chi(Q.data, {a, b}));
    }
  auto lw = toric_line_weights(P2, P2.rep({0}));
  for (auto& w : lw.chart_chars) CHECK(w == Weight2{0, 0});
  CHECK(lw.sections.size() == 1);
  // canonical representative has the canonical class
  CHECK(P2.class_of(P2.canonical_rep()) == P2.data.K);
}

TEST_CASE("effectivity on F2") {
  auto F2 = toric_builtin("F2");
  CHECK(F2.effective({0, 1}));   // negative section
  CHECK(F2.effective({1, 0}));
  CHECK(!F2.effective({-1, 0}));
  CHECK(!F2.effective({0, -1}));
  CHECK(!F2.effective(F2.data.K));
}

TEST_CASE("disjoint unions") {
  auto T = toric_builtin("P2+P1xP1");
  CHECK(T.data.rho == 3);
  CHECK(T.data.chiO == 2);
  CHECK(T.data.h0 == 2);
  CHECK(T.data.e == 7);
  CHECK(T.data.K2() == 17);
  CHECK(T.charts.size() == 7);
  CHECK(riemann_roch_chi(T.data, {0, 0, 0}) == 2);
  CHECK(riemann_roch_chi(T.data, {1, 1, 1}) == 3 + 4);
  CHECK(T.global_sections(T.rep({1, 1, 1})).size() == 7);
}

TEST_CASE("surface files") {
  nlohmann::json j = {{"name", "myP2"}, {"rays", {{1, 0}, {0, 1}, {-1, -1}}}, {"profile", {{"chiO", 1}, {"K2", 9}, {"e", 3}}}};
  auto f = parse_surface_file(j);
  CHECK(f.toric);
  CHECK(f.data.K2() == 9);
  j["profile"]["K2"] = 8;
  CHECK_THROWS_AS(parse_surface_file(j), Error);
  nlohmann::json g = {{"name", "gt"}, {"profile", {{"chiO", 2}, {"K2", 3}, {"e", 21}, {"q", 0}, {"pg", 1}}},
                      {"sw_table", {{{"beta", {1}}, {"sw", 1}}}}};
  auto s = parse_surface_file(g);
  CHECK(s.sw.size() == 1);
  g["profile"]["e"] = 20;
  CHECK_THROWS_AS(parse_surface_file(g), Error);
  nlohmann::json bad = {{"name", "x"}, {"rays", {{1, 0}, {0, 1}, {-1, 0}}}};
  CHECK_THROWS_AS(parse_surface_file(bad), Error);
  nlohmann::json sing = {{"name", "x"}, {"rays", {{1, 0}, {-1, 2}, {0, -1}}}};
  CHECK_THROWS_AS(parse_surface_file(sing), Error);
}
