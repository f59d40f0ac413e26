#include <doctest.h>

#include "degloc/errors.hpp"
#include "degloc/hilbloc.hpp"
#include "degloc/oracles.hpp"
#include "degloc/porteous.hpp"

using namespace degloc;

namespace {

EquivSpace space(const ToricSurface& T, int n1, int n2, std::vector<LatticeVec> betas = {}) {
  EquivSpace X;
  X.T = &T;
  X.n1 = n1;
  X.n2 = n2;
  X.betas = std::move(betas);
  return X;
}

Rational integrate(const Expr& e, const EquivSpace& X, int threads = 1, unsigned seed = 1) {
  IntegrateOptions o;
  o.threads = threads;
  o.seed = seed;
  return equivariant_integrate(e, X, o).value;
}

Xi xi_D(LatticeVec D) {
  Xi x;
  x.D = std::move(D);
  return x;
}

}  // namespace

TEST_CASE("partitions") {
  std::vector<size_t> p = {1, 1, 2, 3, 5, 7, 11};
  for (int n = 0; n <= 6; ++n) {
    auto ps = partitions_of(n);
    CHECK(ps.size() == p[n]);
    for (auto& q : ps) {
      q.check();
      CHECK(q.size() == n);
      CHECK(static_cast<int>(q.cells().size()) == n);
    }
  }
  CHECK_THROWS_AS((Partition{{1, 2}}.check()), Error);
}

TEST_CASE("fixed point counts match the generating function") {
  for (auto name : {"P2", "P1xP1", "F1"}) {
    auto T = toric_builtin(name);
    auto g = oracle::gottsche_series(T.data.e, 4);
    for (int n1 = 0; n1 <= 4; ++n1)
      for (int n2 = 0; n1 + n2 <= 4; ++n2)
        CHECK(static_cast<long>(enumerate_fixed_points(T, n1, n2).size()) == g[n1] * g[n2]);
  }
  auto P2 = toric_builtin("P2");
  CHECK(enumerate_fixed_points(P2, 0, 0).size() == 1);
  CHECK(enumerate_fixed_points(P2, 2, 0).size() == 9);
  CHECK(enumerate_fixed_points(toric_builtin("P1xP1"), 1, 0).size() == 4);
  CHECK(enumerate_fixed_points(P2, 1, 0, 3).size() == 9);
}

TEST_CASE("tangent characters") {
  Weight2 m1{2, -1}, m2{-1, 1};
  auto one = tangent_character(Partition{{1}}, m1, m2);
  CHECK(one == EquivChar::mono(Weight2{-2, 1}) + EquivChar::mono(Weight2{1, -1}));
  for (int n = 1; n <= 4; ++n)
    for (auto& mu : partitions_of(n)) {
      auto T = tangent_character(mu, m1, m2);
      CHECK(T.num_terms() == 2 * n);
      CHECK(T.rank() == 2 * n);
      CHECK(T.movable());
      CHECK(T == oracle::hom_tangent(mu, m1, m2));
    }
}

TEST_CASE("Rhom characters agree with the Taylor resolution") {
  Weight2 m1{3, 1}, m2{-1, 2};
  Exp3 xi{2, -1, 1};
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b)
      for (auto& mu : partitions_of(a))
        for (auto& nu : partitions_of(b)) {
          auto lc = rhom_character(mu, nu, m1, m2, xi);
          CHECK(lc.num == oracle::taylor_rhom_times_P(mu, nu, m1, m2, xi));
        }
  // the tangent is chi(O, O) - chi(I, I)
  for (auto& mu : partitions_of(3))
    CHECK(tangent_character(mu, m1, m2) == rhom_finite(Partition{}, Partition{}, m1, m2, {0, 0, 0}) -
                                               rhom_finite(mu, mu, m1, m2, {0, 0, 0}));
}

TEST_CASE("global assembly") {
  auto P2 = toric_builtin("P2");
  for (long d = -5; d <= 4; ++d) {
    std::vector<LocalChar> parts;
    auto a = P2.rep({d});
    for (auto& c : P2.charts) {
      Weight2 m = P2.fiber_char(c, a);
      parts.push_back({EquivChar::mono(m), {c.m1, c.m2}});
    }
    auto chi = assemble(parts);
    CHECK(chi.rank() == riemann_roch_chi(P2.data, {d}));
    if (d >= 0) {
      EquivChar h0;
      for (auto& [comp, m] : P2.global_sections(a)) h0 += EquivChar::mono(m);
      CHECK(chi == h0);
    }
  }
  // one chart alone does not close up
  auto& c = P2.charts[0];
  CHECK_THROWS_WITH_AS(assemble({{EquivChar::mono(Weight2{0, 0}), {c.m1, c.m2}}}), doctest::Contains("assembly failure"), Error);
}

TEST_CASE("global Rhom characters") {
  // chi(I_a, I_b xi) = chi(xi) - n_a - n_b at every fixed point
  for (auto name : {"P2", "F2"}) {
    auto T = toric_builtin(name);
    for (int n1 = 0; n1 <= 2; ++n1)
      for (int n2 = 0; n2 <= 2; ++n2) {
        LatticeVec beta(T.data.rho, 1);
        auto X = space(T, n1, n2, {beta});
        Expr R = L_rhom(T.data, beta, 1, 2, n1, n2, Xi{1, 0, {}, 0, 0});
        Expr RK = L_rhom(T.data, beta, 2, 1, n2, n1, Xi{-1, 1, {}, 2, 0});
        CHECK(R->rank == riemann_roch_chi(T.data, beta) - n1 - n2);
        for (auto& p : enumerate_fixed_points(T, n1, n2)) {
          auto c = k_character(R, X, p);
          CHECK(c.rank() == R->rank);
          // Serre duality: chi(I2, I1 K L^-1 t^2) = chi(I1, I2 L)^dual t^2
          auto d = k_character(RK, X, p);
          CHECK(d.rank() == RK->rank);
          EquivChar dual;
          for (auto& [e, m] : c.terms) dual.terms[{-e[0], -e[1], 2}] = m;
          CHECK(d == dual);
        }
      }
  }
}

TEST_CASE("Euler characteristics of Hilbert schemes") {
  for (auto name : {"P2", "P1xP1"}) {
    auto T = toric_builtin(name);
    auto g = oracle::gottsche_series(T.data.e, 3);
    for (int n = 0; n <= 3; ++n) CHECK(integrate(euler(tangent_leaf(2 * n)), space(T, n, 0)) == g[n]);
  }
  auto P2 = toric_builtin("P2");
  CHECK(integrate(euler(tangent_leaf(2)), space(P2, 1, 0)) == 3);
}

TEST_CASE("surface integrals on S^[1]") {
  for (auto name : {"P2", "P1xP1", "F1", "F2"}) {
    auto T = toric_builtin(name);
    const auto& S = T.data;
    auto X = space(T, 1, 0);
    // c1(T)^2 = K^2, c2(T) = e
    CHECK(integrate(chern(2, tangent_leaf(2)), X) == S.e);
    CHECK(integrate(mul({chern(1, tangent_leaf(2)), chern(1, tangent_leaf(2))}), X) == S.K2());
    for (int t = 0; t < 3; ++t) {
      LatticeVec D(S.rho);
      for (int i = 0; i < S.rho; ++i) D[i] = (t * 7 + i * 3) % 5 - 2;
      Expr L1 = tautological(S, LatticeVec(S.rho, 0), 1, 1, xi_D(D));
      CHECK(L1->rank == 1);
      CHECK(integrate(mul({chern(1, L1), chern(1, L1)}), X) == S.dot(D, D));
      CHECK(integrate(mul({chern(1, L1), chern(1, tangent_leaf(2))}), X) == -S.dot(D, S.K));
    }
  }
}

TEST_CASE("projective bundle over a point") {
  auto P2 = toric_builtin("P2");
  auto X = space(P2, 0, 0, {{1}});
  X.pb = PBData{0, {0}};
  CHECK(X.dim() == 2);
  CHECK(integrate(hpow("h", 2), X) == 1);
  CHECK(integrate(hpow("h", 1), X) == 0);
  Expr B = B_sections(P2.data, {1}, {0});
  for (int j = 0; j <= 2; ++j)
    CHECK(integrate(mul({chern(j, ktwist(B, "h", 1)), hpow("h", 2 - j)}), X) == Rational(j == 0 ? 1 : j == 1 ? 3 : 3));
  CHECK(integrate(chern(3, ktwist(B, "h", 1)), X) == 0);
  // Segre-type pushforward over the larger P(H^0(O(2)))
  auto Y = space(P2, 0, 0, {{2}});
  Y.pb = PBData{0, {0}};
  CHECK(integrate(hpow("h", 5), Y) == 1);
}

TEST_CASE("projection formula and order independence") {
  auto T = toric_builtin("P1xP1");
  auto X = space(T, 2, 1, {{1, 1}});
  Expr R = L_rhom(T.data, {1, 1}, 1, 2, 2, 1, Xi{1, 0, {}, 0, 0});
  Expr e = add({mul({chern(3, kneg(R)), chern(3, tangent_leaf(6))}), mul({scalar(Rational(5, 3)), euler(tangent_leaf(6))})});
  Rational serial = integrate(e, X, 1, 3);
  CHECK(integrate(e, X, 4, 3) == serial);
  CHECK(integrate(e, X, 3, 99) == serial);
  auto g = oracle::gottsche_series(4, 2);
  CHECK(integrate(mul({scalar(7), euler(tangent_leaf(6))}), X) == 7 * g[2] * g[1]);
}

TEST_CASE("failure modes") {
  auto P2 = toric_builtin("P2");
  // 1 / e(T)^2 is not a class
  CHECK_THROWS_WITH_AS(integrate(mul({euler(kneg(tangent_leaf(2)))}), space(P2, 1, 0)),
                       doctest::Contains("not equivariantly constant"), Error);
  // equal weights on two components of a disjoint union
  auto U = toric_builtin("P2+P2");
  auto X = space(U, 0, 0, {{1, 1}});
  X.pb = PBData{0, {0, 0}};
  CHECK_THROWS_WITH_AS(integrate(hpow("h", 5), X), doctest::Contains("non-isolated"), Error);
  CHECK_THROWS_AS(integrate(chern(1, sym("E", 1)), space(P2, 1, 0)), Error);
  CHECK_THROWS_AS(integrate(hpow("h", 1), space(P2, 1, 0)), Error);
  CHECK_THROWS_AS(integrate(sw(SWAtom{}), space(P2, 0, 0)), Error);
}
