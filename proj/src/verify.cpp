#include "degloc/verify.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "degloc/bundles.hpp"
#include "degloc/errors.hpp"
#include "degloc/hilbloc.hpp"
#include "degloc/oracles.hpp"
#include "degloc/porteous.hpp"
#include "degloc/vw.hpp"

namespace degloc {

namespace {

struct Tally {
  long checks = 0, fails = 0;
  std::string first;
  void check(bool ok, const std::string& what) {
    ++checks;
    if (!ok && !fails++) first = what;
  }
  std::string summary() const {
    std::string s = std::to_string(checks - fails) + "/" + std::to_string(checks) + " checks";
    if (fails) s += ", first failure: " + first;
    return s;
  }
};

std::string vec_str(const LatticeVec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

// 1: X-level Porteous class against the Gysin pushforward from Gr(r, E0)
void crit_porteous_X(Tally& t) {
  const int D = 12;
  for (int r = 1; r <= 2; ++r)
    for (int e0 = r; e0 <= 4; ++e0)
      for (int e1 = 0; e1 <= 4; ++e1) {
        if (e1 - e0 + r < 0) continue;
        std::vector<std::pair<std::string, int>> g;
        for (int i = 1; i <= e0; ++i) g.push_back({"a" + std::to_string(i), i});
        for (int i = 1; i <= e1; ++i) g.push_back({"b" + std::to_string(i), i});
        auto base = point_with_generators(g, D);
        KClass E0 = k_generic(base->ring, "a", e0, e0), E1 = k_generic(base->ring, "b", e1, e1);
        ChernSeries q(E1.c.cls() * series_invert(E0.c.cls()).cls());
        auto lhs = degeneracy_pushforward_X(e0, e1, r, q, D).cls;
        auto G = grassmann_bundle(base, E0, r);
        KClass T = k_trivial(G.top().ring, 0);
        auto E1p = pullback(G.top(), E1);
        for (int i = 1; i <= r; ++i) T = T + k_twist(E1p, G.top().ring->find(gr_gen("h", r, i)), 1);
        auto rhs = G.pushforward(T.chern(r * e1));
        t.check(lhs == rhs, "r=" + std::to_string(r) + " e0=" + std::to_string(e0) + " e1=" + std::to_string(e1));
      }
}

// 2: Delta^r_m(c(C - U_B)) = c_{rm}(U^dual C) on a split Gr(r, B)
void crit_grassmann_forms(Tally& t) {
  for (int r = 1; r <= 2; ++r)
    for (int b = r; b <= 4; ++b)
      for (int m = 0; m <= 5; ++m) {
        const int D = r * m;
        std::vector<std::pair<std::string, int>> g;
        for (int i = 1; i <= b; ++i) g.push_back({"x" + std::to_string(i), 1});
        for (int i = 1; i <= m; ++i) g.push_back({"c" + std::to_string(i), i});
        auto base = point_with_generators(g, D);
        KClass B = k_trivial(base->ring, 0);
        for (int i = 1; i <= b; ++i) B = B + k_line(GradedClass::gen(base->ring, "x" + std::to_string(i)));
        KClass C = k_generic(base->ring, "c", m, m);
        auto G = grassmann_bundle(base, B, r);
        // E0 = B, E1 = C makes Q_B - (E0 - E1) = C - U_B
        auto f = degeneracy_pushforward_GrB(b, m, b, r, true);
        FormalEnv env;
        env.ring = G.top().ring;
        env.syms.emplace("B", pullback(G.top(), B));
        env.syms.emplace("E0", pullback(G.top(), B));
        env.syms.emplace("E1", pullback(G.top(), C));
        auto lhs = eval_formal(f.expr, env), rhs = eval_formal(*f.alt, env);
        std::string w = "r=" + std::to_string(r) + " b=" + std::to_string(b) + " m=" + std::to_string(m);
        t.check(lhs == rhs, w);
        t.check(!rhs.is_zero(), w + " nonzero");
      }
}

// 3: split localisation against the Segre rule, r = 1
void crit_segre(Tally& t) {
  for (int b = 1; b <= 5; ++b) {
    std::vector<std::pair<std::string, int>> g;
    for (int i = 1; i <= b; ++i) g.push_back({"x" + std::to_string(i), 1});
    auto base = point_with_generators(g, 2 * b + 4);
    std::vector<GradedClass> roots;
    KClass B = k_trivial(base->ring, 0);
    for (int i = 1; i <= b; ++i) {
      roots.push_back(GradedClass::gen(base->ring, "x" + std::to_string(i)));
      B = B + k_line(roots.back());
    }
    auto P = projective_bundle(base, B);
    auto h = GradedClass::gen(P->ring, P->h);
    for (int k = 0; k <= b + 4; ++k) {
      auto split = grassmann_split_pushforward([&](const std::vector<GradedClass>& x) { return x[0].pow(b - 1 + k); }, 1, roots);
      std::string w = "b=" + std::to_string(b) + " k=" + std::to_string(k);
      t.check(split == oracle::split_segre(roots, k), w + " vs h_k oracle");
      t.check(split == proj_pushforward(*P, h.pow(b - 1 + k)), w + " vs tower");
    }
  }
}

EquivSpace space_of(const ToricSurface& T, long n1, long n2, std::vector<LatticeVec> betas = {}) {
  EquivSpace X;
  X.T = &T;
  X.n1 = static_cast<int>(n1);
  X.n2 = static_cast<int>(n2);
  X.betas = std::move(betas);
  return X;
}

// 4: fixed-point counts and Euler characteristics of S^[n]
void crit_euler(Tally& t, const VerifyOptions& o) {
  IntegrateOptions io;
  io.threads = o.threads;
  io.seed = o.seed;
  for (auto name : {"P2", "P1xP1"}) {
    auto T = toric_builtin(name);
    auto g = oracle::gottsche_series(T.data.e, 4);
    for (int n = 0; n <= 4; ++n) {
      std::string w = std::string(name) + " n=" + std::to_string(n);
      t.check(static_cast<long>(enumerate_fixed_points(T, n, 0).size()) == g[n], w + " count");
      t.check(equivariant_integrate(euler(tangent_leaf(2 * n)), space_of(T, n, 0), io).value == g[n], w + " euler");
    }
    for (int n1 = 1; n1 <= 3; ++n1)
      for (int n2 = 1; n1 + n2 <= 4; ++n2)
        t.check(static_cast<long>(enumerate_fixed_points(T, n1, n2).size()) == g[n1] * g[n2],
                std::string(name) + " nested count");
  }
  t.check(oracle::gottsche_series(3, 2)[2] == 9, "P2 n=2 coefficient is 9");
}

// 5: closed-form characters against resolution oracles
void crit_characters(Tally& t) {
  Weight2 m1{3, 1}, m2{-1, 2};
  Exp3 xi{2, -1, 1};
  for (int a = 0; a <= 3; ++a)
    for (auto& mu : partitions_of(a)) {
      t.check(tangent_character(mu, m1, m2) == oracle::hom_tangent(mu, m1, m2), "tangent |mu|=" + std::to_string(a));
      for (int b = 0; b <= 3; ++b)
        for (auto& nu : partitions_of(b))
          t.check(rhom_character(mu, nu, m1, m2, xi).num == oracle::taylor_rhom_times_P(mu, nu, m1, m2, xi),
                  "Rhom |mu|=" + std::to_string(a) + " |nu|=" + std::to_string(b));
    }
}

// monomials of exact degree in the Chern classes of O^[n_a], O(-1)^[n_a], O(-2)^[n_a]
std::vector<Expr> taut_monomials(const SurfaceData& S, const LatticeVec& beta, long n1, long n2, long deg) {
  std::vector<std::pair<Expr, long>> gens;
  for (long a = 1; a <= 2; ++a) {
    long na = a == 1 ? n1 : n2;
    if (!na) continue;
    for (long d = 0; d >= -2; --d) {
      Xi x;
      x.D = LatticeVec(S.rho, 0);
      x.D[0] = d;
      Expr taut = tautological(S, beta, a, na, x);
      for (long k = 1; k <= na; ++k) gens.push_back({chern(k, taut), k});
    }
  }
  std::vector<Expr> out;
  std::vector<Expr> cur;
  std::function<void(size_t, long)> rec = [&](size_t from, long left) {
    if (left == 0) {
      out.push_back(cur.empty() ? one() : mul(cur));
      return;
    }
    for (size_t i = from; i < gens.size(); ++i) {
      if (gens[i].second > left) continue;
      cur.push_back(gens[i].first);
      rec(i, left - gens[i].second);
      cur.pop_back();
    }
  };
  if (deg >= 0) rec(0, deg);
  return out;
}

// 6: P(B) route against the non-effective branch on P2
void crit_two_routes(Tally& t, const VerifyOptions& o) {
  IntegrateOptions io;
  io.threads = o.threads;
  io.seed = o.seed;
  auto T = toric_builtin("P2");
  const auto& S = T.data;
  long nonzero = 0;
  for (long d = 1; d <= 3; ++d) {
    LatticeVec beta{d};
    for (long n1 = 0; n1 <= 2; ++n1)
      for (long n2 = 0; n1 + n2 <= 2; ++n2) {
        long n = n1 + n2;
        auto red = nested_reduced_formula(n1, n2, S, beta, {0}, true);
        auto X = space_of(T, n1, n2, {beta});
        auto Y = X;
        Y.pb = PBData{0, {0}};
        for (long i = 0; i <= 2; ++i) {
          auto ne = sw_coupled_pushforward(SWCase::PgZeroNoneffective, i, n1, n2, S, beta, false);
          for (long deg = 0; deg <= 2 * n; ++deg)
            for (auto& alpha : taut_monomials(S, beta, n1, n2, deg)) {
              Rational a = equivariant_integrate(mul({red.expr, hpow("h", i), alpha}), Y, io).value;
              Rational b = equivariant_integrate(mul({ne.expr, alpha}), X, io).value;
              if (a != 0) ++nonzero;
              t.check(a == b, "d=" + std::to_string(d) + " n=(" + std::to_string(n1) + "," + std::to_string(n2) +
                                  ") i=" + std::to_string(i) + ": " + to_string(a) + " vs " + to_string(b));
            }
        }
      }
  }
  t.check(nonzero > 0, "some pairing is nonzero");
}

// 7: higher Chern classes of the CO class vanish
void crit_co(Tally& t, const VerifyOptions& o) {
  IntegrateOptions io;
  io.threads = o.threads;
  io.seed = o.seed;
  auto T = toric_builtin("P2");
  const auto& S = T.data;
  for (long d = 0; d <= 2; ++d) {
    LatticeVec beta{d};
    long b = riemann_roch_chi(S, beta);
    for (long n1 = 0; n1 <= 2; ++n1)
      for (long n2 = 0; n1 + n2 <= 2; ++n2) {
        long n = n1 + n2;
        auto X = space_of(T, n1, n2, {beta});
        X.pb = PBData{0, {0}};
        Expr co = CO_class(S, beta, n1, n2);
        std::string w = "d=" + std::to_string(d) + " n=(" + std::to_string(n1) + "," + std::to_string(n2) + ")";
        bool some = false;
        for (long i = 0; i <= 2; ++i)
          for (long j = 0; j < b; ++j)
            for (auto& alpha : taut_monomials(S, beta, n1, n2, n + b - 1 - i - j)) {
              Rational v = equivariant_integrate(mul({chern(n + i, co), hpow("h", j), alpha}), X, io).value;
              if (i == 0) some = some || v != 0;
              else t.check(v == 0, w + " i=" + std::to_string(i));
            }
        // at beta = 0 with n1 = 0, CO = O^[n2] has a nowhere vanishing section
        if (d > 0 || n1 > 0) t.check(some, w + " top Chern class pairs nontrivially");
      }
  }
}

// 8: matched surfaces and exact fits
void crit_universality(Tally& t, const VerifyOptions& o) {
  IntegrateOptions io;
  io.threads = o.threads;
  io.seed = o.seed;
  auto P = toric_builtin("P1xP1"), F = toric_builtin("F2");
  std::vector<std::pair<LatticeVec, LatticeVec>> pairs = {{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{1, 0}, {1, 1}},
                                                          {{1, 1}, {2, 1}}, {{2, 1}, {3, 1}}};
  for (auto& [a, b] : pairs) {
    t.check(invariants_of(P.data, a) == invariants_of(F.data, b), "matched invariants");
    for (long n = 0; n <= 2; ++n)
      t.check(point_contribution(P, a, n, io) == point_contribution(F, b, n, io),
              "P1xP1 " + vec_str(a) + " vs F2 " + vec_str(b) + " n=" + std::to_string(n));
  }
  for (int n = 1; n <= 2; ++n) {
    auto cfg = default_fit_configs(n);
    t.check(cfg.size() >= 6, "at least 6 configurations");
    try {
      auto runs = fit_runs(n, cfg, io);
      auto fit = universality_fit(n, runs);
      bool all = true;
      for (auto& r : runs) all = all && fit.eval(r.inv) == r.value;
      t.check(all, "fit reproduces every run, n=" + std::to_string(n));
    } catch (const Error& e) {
      t.check(false, std::string("fit n=") + std::to_string(n) + ": " + e.what());
    }
  }
}

// 9: duality on the pg > 0 branch
void crit_duality(Tally& t) {
  std::vector<std::pair<SurfaceData, std::vector<LatticeVec>>> cases = {
      {numeric_profile("K3"), {{0, 0}, {1, 0}, {1, 1}}},
      {numeric_profile("gt_k1_chi2"), {{0}, {1}, {-1}}},
  };
  for (auto& [S, betas] : cases)
    for (auto& beta : betas)
      for (long i = 0; i <= 2; ++i)
        for (long n1 = 0; n1 <= 2; ++n1)
          for (long n2 = 0; n2 <= 2; ++n2) {
            auto f = sw_coupled_pushforward(SWCase::PgPositive, i, n1, n2, S, beta, false);
            auto d = duality_rewrite(f, S);
            std::string w = S.name + " beta=" + vec_str(beta) + " i=" + std::to_string(i) + " n=(" + std::to_string(n1) +
                            "," + std::to_string(n2) + ")";
            long e = d.s + i;
            t.check(d.sign == (e % 2 ? -1 : 1), w + " sign");
            t.check(nf_equal(d.rewritten.expr, mul({scalar(d.sign), f.expr})), w + " normal forms");
            auto dd = duality_rewrite(d.rewritten, S);
            t.check(to_json(dd.rewritten.expr) == to_json(f.expr), w + " involution");
          }
}

// 10: vanishing bookkeeping
void crit_vanishing(Tally& t, const VerifyOptions& o) {
  for (auto name : {"K3", "gt_k1_chi2", "gt_k4_chi3"}) {
    auto S = numeric_profile(name);
    LatticeVec beta(S.rho, 0), A(S.rho, 0);
    beta[0] = 1;
    for (long n1 = 0; n1 <= 2; ++n1)
      for (long n2 = 0; n2 <= 2; ++n2)
        t.check(nf_is_zero(vir_from_reduced_formula(n1, n2, S, beta, A).expr),
                std::string(name) + " vir from reduced n=(" + std::to_string(n1) + "," + std::to_string(n2) + ")");
  }
  IntegrateOptions io;
  io.threads = o.threads;
  io.seed = o.seed;
  auto P2 = toric_builtin("P2");
  SWTable sw(P2.data);
  for (long d = 1; d <= 3; ++d) {
    bool rejected = false;
    try {
      sw.set({d}, 0, 1);
    } catch (const Error& e) {
      rejected = e.kind() == ErrorKind::Schema;
    }
    t.check(rejected, "nonzero SW with vd != 0 rejected, d=" + std::to_string(d));
    SWAtom a;
    a.beta = {d};
    t.check(sw.lookup(a) && *sw.lookup(a) == 0, "lookup gives 0 for vd != 0");
    for (long n = 0; n <= 2; ++n)
      t.check(monopole_contribution(P2, sw, {d}, n, false, io).value == 0, "P2 monopole contribution with vd != 0");
  }
  // override for higher-SW mode keeps the entry, the contribution is still 0
  SWTable hi(P2.data, true);
  hi.set({1}, 0, 1);
  t.check(monopole_contribution(P2, hi, {1}, 1, false, io).value == 0, "higher-SW mode");
  auto K3 = numeric_profile("K3");
  SWTable k3(K3);
  auto fit = universality_fit(1, fit_runs(1, default_fit_configs(1), io));
  t.check(monopole_from_fit(K3, k3, {1, 1}, 1, fit).value == 0, "K3 beta with vd != 0 through the fit");
}

struct Crit {
  const char* name;
  double budget;
  std::function<void(Tally&, const VerifyOptions&)> run;
};

const std::vector<Crit>& criteria() {
  static const std::vector<Crit> c = {
      {"Thom-Porteous class equals the Grassmann Gysin pushforward", 60, [](Tally& t, auto&) { crit_porteous_X(t); }},
      {"Grassmann determinant equals the top Chern class of U^dual C", 60, [](Tally& t, auto&) { crit_grassmann_forms(t); }},
      {"split pushforward follows the Segre rule", 0, [](Tally& t, auto&) { crit_segre(t); }},
      {"fixed points and Euler characteristics of Hilbert schemes", 120, crit_euler},
      {"tangent and Rhom characters match resolution oracles", 0, [](Tally& t, auto&) { crit_characters(t); }},
      {"P(B) route agrees with the non-effective branch on P2", 600, crit_two_routes},
      {"higher Chern classes of CO vanish on P2", 0, crit_co},
      {"matched point contributions and exact universality fits", 0, crit_universality},
      {"duality rewrite reproduces the sign and is an involution", 0, [](Tally& t, auto&) { crit_duality(t); }},
      {"pg > 0 virtual route and vd != 0 SW entries give zero", 0, crit_vanishing},
  };
  return c;
}

}  // namespace

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  if (suite == "porteous") return {1, 2, 3};
  if (suite == "hilbloc") return {4, 5};
  if (suite == "routes") return {6, 7};
  if (suite == "vw") return {8};
  if (suite == "duality") return {9};
  if (suite == "vanishing") return {10};
  schema_error("unknown suite '" + suite + "'");
}

CheckResult run_criterion(int id, const VerifyOptions& opt) {
  if (id < 1 || id > static_cast<int>(criteria().size())) schema_error("unknown criterion " + std::to_string(id));
  auto& c = criteria()[id - 1];
  CheckResult r;
  r.id = id;
  r.name = c.name;
  r.budget = c.budget;
  Tally t;
  auto start = std::chrono::steady_clock::now();
  try {
    c.run(t, opt);
    r.detail = t.summary();
  } catch (const std::exception& e) {
    t.check(false, "");
    r.detail = t.summary() + " threw: " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.pass = t.fails == 0 && t.checks > 0 && (r.budget == 0 || r.seconds < r.budget);
  if (r.budget > 0 && r.seconds >= r.budget) r.detail += ", over the time budget";
  return r;
}

std::string format_line(const CheckResult& r, bool with_time) {
  std::ostringstream s;
  s.precision(2);
  s << std::fixed << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail;
  if (with_time) {
    s << ", " << r.seconds << " s";
    if (r.budget > 0) s << " of " << r.budget << " s";
  }
  s << "]";
  return s.str();
}

}  // namespace degloc
