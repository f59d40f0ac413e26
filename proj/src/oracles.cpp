#include "degloc/oracles.hpp"

#include <set>

#include "degloc/errors.hpp"

namespace degloc::oracle {

std::vector<long> gottsche_series(long e, int N) {
  if (N < 0) schema_error("negative order");
  std::vector<long> c(N + 1, 0);
  c[0] = 1;
  // multiply by 1 / (1 - q^m) e times: running sums along steps of m
  for (int m = 1; m <= N; ++m)
    for (long r = 0; r < e; ++r)
      for (int i = m; i <= N; ++i) c[i] += c[i - m];
  return c;
}

namespace {

bool in_ideal(const Partition& mu, int i, int j) {
  if (j >= static_cast<int>(mu.parts.size())) return true;
  return i >= mu.parts[j];
}

Weight2 at(int i, int j, const Weight2& m1, const Weight2& m2) {
  return {i * m1[0] + j * m2[0], i * m1[1] + j * m2[1]};
}

// alternating sum over nonempty subsets of t^{sign * lcm}
EquivChar taylor(const std::vector<std::array<int, 2>>& g, int sign, const Weight2& m1, const Weight2& m2) {
  EquivChar r;
  size_t n = g.size();
  for (size_t S = 1; S < (size_t(1) << n); ++S) {
    int i = 0, j = 0, k = 0;
    for (size_t b = 0; b < n; ++b)
      if (S >> b & 1) {
        i = std::max(i, g[b][0]);
        j = std::max(j, g[b][1]);
        ++k;
      }
    Weight2 w = at(i, j, m1, m2);
    r += EquivChar::mono(Weight2{sign * w[0], sign * w[1]}, k % 2 ? 1 : -1);
  }
  return r;
}

long rank_of(std::vector<std::vector<Rational>> M) {
  long r = 0;
  size_t rows = M.size(), cols = rows ? M[0].size() : 0;
  for (size_t c = 0; c < cols && r < static_cast<long>(rows); ++c) {
    size_t p = r;
    while (p < rows && M[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(M[p], M[r]);
    for (size_t i = 0; i < rows; ++i) {
      if (i == static_cast<size_t>(r) || M[i][c] == 0) continue;
      Rational f = M[i][c] / M[r][c];
      for (size_t k = c; k < cols; ++k) M[i][k] -= f * M[r][k];
    }
    ++r;
  }
  return r;
}

}  // namespace

std::vector<std::array<int, 2>> monomial_generators(const Partition& mu) {
  int n = mu.size() + 1;
  std::vector<std::array<int, 2>> g;
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      if (!in_ideal(mu, i, j)) continue;
      bool minimal = (i == 0 || !in_ideal(mu, i - 1, j)) && (j == 0 || !in_ideal(mu, i, j - 1));
      if (minimal) g.push_back({i, j});
    }
  return g;
}

EquivChar taylor_rhom_times_P(const Partition& mu, const Partition& nu, const Weight2& m1, const Weight2& m2,
                              const Exp3& xi) {
  // Hom(R t^a, G) = t^{-a} G, summed over the resolution of I_mu, with G = I_nu xi
  EquivChar F = taylor(monomial_generators(mu), -1, m1, m2);
  EquivChar G = taylor(monomial_generators(nu), 1, m1, m2);
  return (F * G).shift(xi);
}

EquivChar hom_tangent(const Partition& mu, const Weight2& m1, const Weight2& m2) {
  auto gens = monomial_generators(mu);
  std::set<std::array<int, 2>> cells;
  for (auto c : mu.cells()) cells.insert(c);
  auto inside = [&](int i, int j) { return cells.count({i, j}) > 0; };
  // candidate weights: g + w lands in the staircase for some generator g
  std::set<std::array<int, 2>> ws;
  for (auto& g : gens)
    for (auto& c : cells) ws.insert({c[0] - g[0], c[1] - g[1]});
  EquivChar T;
  for (auto& w : ws) {
    std::vector<int> var(gens.size(), -1);
    int nv = 0;
    for (size_t k = 0; k < gens.size(); ++k)
      if (inside(gens[k][0] + w[0], gens[k][1] + w[1])) var[k] = nv++;
    if (!nv) continue;
    // x^{l - g} phi(g) = x^{l - g'} phi(g') in R / I for every pair
    std::vector<std::vector<Rational>> M;
    for (size_t a = 0; a < gens.size(); ++a)
      for (size_t b = a + 1; b < gens.size(); ++b) {
        int li = std::max(gens[a][0], gens[b][0]), lj = std::max(gens[a][1], gens[b][1]);
        if (!inside(li + w[0], lj + w[1])) continue;
        std::vector<Rational> row(nv, 0);
        if (var[a] >= 0) row[var[a]] += 1;
        if (var[b] >= 0) row[var[b]] -= 1;
        M.push_back(std::move(row));
      }
    long dim = nv - rank_of(std::move(M));
    if (dim) T += EquivChar::mono(at(w[0], w[1], m1, m2), dim);
  }
  return T;
}

GradedClass split_segre(const std::vector<GradedClass>& roots, int k) {
  if (roots.empty()) schema_error("split_segre needs at least one root");
  const RingPtr& R = roots[0].ring();
  if (k < 0) return GradedClass(R);
  // h_k by the recursion h_k(x_1..x_m) = h_k(x_1..x_{m-1}) + x_m h_{k-1}(x_1..x_m)
  std::vector<GradedClass> h(k + 1, GradedClass(R));
  h[0] = GradedClass::constant(R, 1);
  for (auto& x : roots)
    for (int d = 1; d <= k; ++d) h[d] = h[d] + x * h[d - 1];
  return k % 2 ? h[k] * Rational(-1) : h[k];
}

}  // namespace degloc::oracle
