#include "degloc/surface.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <regex>

#include "degloc/errors.hpp"
#include "degloc/ring.hpp"

namespace degloc {

long SurfaceData::dot(const LatticeVec& a, const LatticeVec& b) const {
  check_vec(a);
  check_vec(b);
  long s = 0;
  for (int i = 0; i < rho; ++i)
    for (int j = 0; j < rho; ++j) s += a[i] * Q[i][j] * b[j];
  return s;
}

LatticeVec SurfaceData::dual(const LatticeVec& beta) const {
  check_vec(beta);
  LatticeVec r(rho);
  for (int i = 0; i < rho; ++i) r[i] = K[i] - beta[i];
  return r;
}

void SurfaceData::check_vec(const LatticeVec& v) const {
  if (static_cast<int>(v.size()) != rho)
    schema_error("class has " + std::to_string(v.size()) + " entries, lattice rank is " + std::to_string(rho));
}

void SurfaceData::validate() const {
  if (static_cast<int>(Q.size()) != rho) schema_error("intersection matrix has wrong size");
  for (int i = 0; i < rho; ++i) {
    if (static_cast<int>(Q[i].size()) != rho) schema_error("intersection matrix has wrong size");
    for (int j = 0; j < rho; ++j)
      if (Q[i][j] != Q[j][i]) schema_error("intersection matrix is not symmetric");
  }
  check_vec(K);
  if (12 * chiO != K2() + e) schema_error("Noether identity fails for " + name);
  if (chiO != h0 - q + pg) schema_error("chi(O) != h0 - q + pg for " + name);
  // Wu formula: D.D = D.K mod 2
  for (int i = 0; i < rho; ++i) {
    LatticeVec ei(rho, 0);
    ei[i] = 1;
    if ((Q[i][i] - dot(K, ei)) % 2 != 0) schema_error("K is not characteristic in " + name);
  }
}

long riemann_roch_chi(const SurfaceData& S, const LatticeVec& beta) {
  long t = S.dot(beta, vec_add(beta, vec_scale(S.K, -1)));
  return S.chiO + t / 2;
}

long vd_beta(const SurfaceData& S, const LatticeVec& beta) {
  return S.dot(beta, vec_add(beta, vec_scale(S.K, -1))) / 2;
}

long twist_dim_d(const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A) {
  long d2 = S.dot(A, vec_add(vec_add(vec_scale(beta, 2), A), vec_scale(S.K, -1)));
  if (d2 % 2 != 0) math_error("A.(2beta + A - K) is odd");
  long d = d2 / 2;
  if (d != riemann_roch_chi(S, vec_add(beta, A)) - riemann_roch_chi(S, beta)) math_error("twist dimension disagrees with Riemann-Roch");
  return d;
}

LatticeVec vec_add(const LatticeVec& a, const LatticeVec& b) {
  if (a.size() != b.size()) schema_error("lattice vectors of different length");
  LatticeVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

LatticeVec vec_scale(const LatticeVec& a, long k) {
  LatticeVec r(a);
  for (auto& x : r) x *= k;
  return r;
}

namespace {

long det2(const Weight2& a, const Weight2& b) { return a[0] * b[1] - a[1] * b[0]; }

// solve Q x = rhs over the rationals; require an integral solution
LatticeVec solve_integral(const std::vector<std::vector<long>>& Q, const LatticeVec& rhs) {
  int n = static_cast<int>(Q.size());
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(n + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) M[i][j] = Q[i][j];
    M[i][n] = rhs[i];
  }
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && M[p][c] == 0) ++p;
    if (p == n) schema_error("degenerate intersection form");
    std::swap(M[p], M[c]);
    for (int i = 0; i < n; ++i) {
      if (i == c || M[i][c] == 0) continue;
      Rational f = M[i][c] / M[c][c];
      for (int j = c; j <= n; ++j) M[i][j] -= f * M[c][j];
    }
  }
  LatticeVec x(n);
  for (int i = 0; i < n; ++i) {
    Rational v = M[i][n] / M[i][i];
    if (v.get_den() != 1) schema_error("ray divisor is not integral in the chosen basis");
    x[i] = v.get_num().get_si();
  }
  return x;
}

}  // namespace

DivisorRep ToricSurface::rep(const LatticeVec& D) const {
  data.check_vec(D);
  DivisorRep a(num_rays(), 0);
  int k = 0;
  for (size_t c = 0; c < comps.size(); ++c)
    for (int b : comps[c].basis) a[ray_offset[c] + b] = D[k++];
  return a;
}

DivisorRep ToricSurface::canonical_rep() const { return DivisorRep(num_rays(), -1); }

LatticeVec ToricSurface::class_of(const DivisorRep& a) const {
  if (static_cast<int>(a.size()) != num_rays()) schema_error("non-invariant representative: wrong number of ray coefficients");
  LatticeVec r(data.rho, 0);
  for (int i = 0; i < num_rays(); ++i) r = vec_add(r, vec_scale(ray_class[i], a[i]));
  return r;
}

Weight2 ToricSurface::fiber_char(const Chart& c, const DivisorRep& a) const {
  if (static_cast<int>(a.size()) != num_rays()) schema_error("non-invariant representative: wrong number of ray coefficients");
  int n = static_cast<int>(comps[c.comp].rays.size());
  long ai = a[ray_offset[c.comp] + c.i], aj = a[ray_offset[c.comp] + (c.i + 1) % n];
  return {-ai * c.m1[0] - aj * c.m2[0], -ai * c.m1[1] - aj * c.m2[1]};
}

std::vector<Weight2> ToricSurface::polytope_points(const DivisorRep& a, int comp) const {
  if (static_cast<int>(a.size()) != num_rays()) schema_error("non-invariant representative: wrong number of ray coefficients");
  const auto& rays = comps[comp].rays;
  int n = static_cast<int>(rays.size());
  // bounding box from all pairwise intersections of the boundary lines <m, v> = -a
  double lo[2] = {1e18, 1e18}, hi[2] = {-1e18, -1e18};
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      long d = det2(rays[i], rays[j]);
      if (d == 0) continue;
      double bi = -a[ray_offset[comp] + i], bj = -a[ray_offset[comp] + j];
      double x = (bi * rays[j][1] - bj * rays[i][1]) / double(d);
      double y = (rays[i][0] * bj - rays[j][0] * bi) / double(d);
      lo[0] = std::min(lo[0], x), hi[0] = std::max(hi[0], x);
      lo[1] = std::min(lo[1], y), hi[1] = std::max(hi[1], y);
    }
  std::vector<Weight2> pts;
  for (long x = static_cast<long>(std::floor(lo[0])) - 1; x <= static_cast<long>(std::ceil(hi[0])) + 1; ++x)
    for (long y = static_cast<long>(std::floor(lo[1])) - 1; y <= static_cast<long>(std::ceil(hi[1])) + 1; ++y) {
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) ok = x * rays[i][0] + y * rays[i][1] >= -a[ray_offset[comp] + i];
      if (ok) pts.push_back({x, y});
    }
  return pts;
}

std::vector<std::pair<int, Weight2>> ToricSurface::global_sections(const DivisorRep& a) const {
  std::vector<std::pair<int, Weight2>> r;
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    for (auto& m : polytope_points(a, c)) r.push_back({c, m});
  return r;
}

bool ToricSurface::effective(const LatticeVec& D) const {
  // on a disjoint union every component must carry a section
  auto a = rep(D);
  for (int c = 0; c < static_cast<int>(comps.size()); ++c)
    if (polytope_points(a, c).empty()) return false;
  return true;
}

ToricSurface make_toric(const std::string& name, const std::vector<ToricComponent>& comps) {
  if (comps.empty()) schema_error("toric surface without components");
  ToricSurface T;
  T.name = name;
  T.comps = comps;
  int offset = 0, rho = 0;
  std::vector<std::vector<std::vector<long>>> pair;  // ray intersection numbers per component
  for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
    const auto& rays = comps[c].rays;
    int n = static_cast<int>(rays.size());
    if (n < 3) schema_error("a complete fan needs at least three rays");
    if (static_cast<int>(comps[c].basis.size()) != n - 2) schema_error("Picard basis must have #rays - 2 entries");
    for (auto& v : rays)
      if (std::gcd(std::labs(v[0]), std::labs(v[1])) != 1) schema_error("ray is not primitive");
    std::vector<std::vector<long>> I(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i) {
      const Weight2 &v = rays[i], &w = rays[(i + 1) % n];
      if (det2(v, w) != 1) schema_error("fan is not smooth, complete and counterclockwise");
      Chart ch;
      ch.comp = c;
      ch.i = i;
      // <m1, v> = 1, <m1, w> = 0 and <m2, v> = 0, <m2, w> = 1
      ch.m1 = {w[1], -w[0]};
      ch.m2 = {-v[1], v[0]};
      T.charts.push_back(ch);
      const Weight2& u = rays[(i + n - 1) % n];
      // u + w = a v
      long sx = u[0] + w[0], sy = u[1] + w[1];
      long aa = (v[0] != 0) ? sx / v[0] : sy / v[1];
      if (sx != aa * v[0] || sy != aa * v[1]) schema_error("fan is not smooth");
      I[i][i] = -aa;
      I[i][(i + 1) % n] = I[(i + 1) % n][i] = 1;
    }
    // winding number: sum of angles must be 2 pi
    double ang = 0;
    for (int i = 0; i < n; ++i) {
      const Weight2 &v = rays[i], &w = rays[(i + 1) % n];
      ang += std::atan2(double(det2(v, w)), double(v[0] * w[0] + v[1] * w[1]));
    }
    if (std::fabs(ang - 2 * M_PI) > 1e-6) schema_error("fan rays wind more than once");
    pair.push_back(I);
    T.ray_offset.push_back(offset);
    offset += n;
    rho += n - 2;
  }
  SurfaceData& S = T.data;
  S.name = name;
  S.rho = rho;
  S.Q.assign(rho, std::vector<long>(rho, 0));
  int k0 = 0;
  for (int c = 0; c < static_cast<int>(comps.size()); ++c) {
    const auto& B = comps[c].basis;
    int m = static_cast<int>(B.size());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) S.Q[k0 + i][k0 + j] = pair[c][B[i]][B[j]];
    std::vector<std::vector<long>> Qc(m, std::vector<long>(m));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) Qc[i][j] = pair[c][B[i]][B[j]];
    int n = static_cast<int>(comps[c].rays.size());
    for (int r = 0; r < n; ++r) {
      LatticeVec rhs(m);
      for (int i = 0; i < m; ++i) rhs[i] = pair[c][r][B[i]];
      LatticeVec x = solve_integral(Qc, rhs);
      LatticeVec full(rho, 0);
      for (int i = 0; i < m; ++i) full[k0 + i] = x[i];
      T.ray_class.push_back(full);
    }
    // the classes must reproduce every ray intersection number
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s) {
        long v = 0;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) v += T.ray_class[T.ray_offset[c] + r][k0 + i] * Qc[i][j] * T.ray_class[T.ray_offset[c] + s][k0 + j];
        if (v != pair[c][r][s]) schema_error("fan intersection numbers are inconsistent with the Picard basis");
      }
    k0 += m;
  }
  S.K.assign(rho, 0);
  for (auto& v : T.ray_class) S.K = vec_add(S.K, vec_scale(v, -1));
  S.e = static_cast<long>(T.charts.size());
  S.h0 = static_cast<long>(comps.size());
  S.chiO = S.h0;
  S.q = S.pg = 0;
  S.validate();
  return T;
}

namespace {

ToricComponent fan_of(const std::string& name) {
  ToricComponent c;
  if (name == "P2") {
    c.rays = {{1, 0}, {0, 1}, {-1, -1}};
  } else if (name == "P1xP1") {
    c.rays = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  } else {
    std::smatch m;
    static const std::regex fa("F([0-9])");
    if (!std::regex_match(name, m, fa)) schema_error("unknown toric surface " + name);
    long a = std::stol(m[1]);
    c.rays = {{1, 0}, {0, 1}, {-1, a}, {0, -1}};
  }
  int n = static_cast<int>(c.rays.size());
  for (int i = 0; i < n - 2; ++i) c.basis.push_back(i);
  return c;
}

}  // namespace

bool is_toric_name(const std::string& name) {
  static const std::regex re("P2|P1xP1|F[0-9]");
  if (std::regex_match(name, re)) return true;
  if (name.find('+') != std::string::npos) {
    size_t s = 0;
    while (s <= name.size()) {
      size_t p = name.find('+', s);
      std::string part = name.substr(s, p == std::string::npos ? std::string::npos : p - s);
      if (!std::regex_match(part, re)) return false;
      if (p == std::string::npos) break;
      s = p + 1;
    }
    return true;
  }
  return false;
}

ToricSurface toric_builtin(const std::string& name) {
  // "P2+F2" is a disjoint union
  std::vector<ToricComponent> comps;
  size_t s = 0;
  while (true) {
    size_t p = name.find('+', s);
    comps.push_back(fan_of(name.substr(s, p == std::string::npos ? std::string::npos : p - s)));
    if (p == std::string::npos) break;
    s = p + 1;
  }
  return make_toric(name, comps);
}

ToricSurface disjoint_union(const std::string& name, const std::vector<ToricSurface>& parts) {
  std::vector<ToricComponent> comps;
  for (auto& p : parts)
    for (auto& c : p.comps) comps.push_back(c);
  return make_toric(name, comps);
}

LineWeights toric_line_weights(const ToricSurface& T, const DivisorRep& D) {
  LineWeights w;
  for (auto& c : T.charts) w.chart_chars.push_back(T.fiber_char(c, D));
  w.sections = T.global_sections(D);
  return w;
}

SurfaceData numeric_profile(const std::string& name) {
  SurfaceData S;
  S.name = name;
  if (name == "K3") {
    S.rho = 2;
    S.Q = {{0, 1}, {1, 0}};
    S.K = {0, 0};
    S.e = 24;
    S.chiO = 2;
    S.q = 0;
    S.pg = 1;
    S.validate();
    return S;
  }
  std::smatch m;
  static const std::regex gt("gt_k([0-9]+)_chi([0-9]+)");
  if (!std::regex_match(name, m, gt)) schema_error("unknown surface " + name);
  long K2 = std::stol(m[1]), chi = std::stol(m[2]);
  if (K2 < 1 || K2 > 9 || chi < 1 || chi > 3) schema_error("general-type sample needs 1 <= K2 <= 9 and 1 <= chi <= 3");
  S.rho = 1;
  S.Q = {{K2}};
  S.K = {1};
  S.e = 12 * chi - K2;
  S.chiO = chi;
  S.q = 0;
  S.pg = chi - 1;
  S.validate();
  return S;
}

nlohmann::json surface_to_json(const SurfaceData& S) {
  return {{"name", S.name}, {"rho", S.rho}, {"Q", S.Q}, {"K", S.K}, {"e", S.e}, {"chiO", S.chiO},
          {"q", S.q}, {"pg", S.pg}, {"K2", S.K2()}, {"components", S.h0}};
}

namespace {

template <class T>
T get_field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) schema_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    schema_error(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

SurfaceFile parse_surface_file(const nlohmann::json& j) {
  if (!j.is_object()) schema_error("surface file must be a JSON object");
  SurfaceFile f;
  f.name = get_field<std::string>(j, "name");
  if (j.contains("rays")) {
    ToricComponent c;
    for (auto& r : get_field<std::vector<std::vector<long>>>(j, "rays")) {
      if (r.size() != 2) schema_error("rays must be pairs");
      c.rays.push_back({r[0], r[1]});
    }
    if (j.contains("basis")) {
      c.basis = get_field<std::vector<int>>(j, "basis");
    } else {
      for (int i = 0; i + 2 < static_cast<int>(c.rays.size()); ++i) c.basis.push_back(i);
    }
    f.toric = true;
    f.toric_data = make_toric(f.name, {c});
    f.data = f.toric_data.data;
    if (j.contains("profile")) {
      auto p = j.at("profile");
      auto chk = [&](const char* k, long v) {
        if (p.contains(k) && p.at(k).get<long>() != v) schema_error(std::string("profile field '") + k + "' disagrees with the fan");
      };
      chk("chiO", f.data.chiO);
      chk("K2", f.data.K2());
      chk("e", f.data.e);
      chk("q", 0);
      chk("pg", 0);
    }
  } else {
    auto p = get_field<nlohmann::json>(j, "profile");
    SurfaceData& S = f.data;
    S.name = f.name;
    S.chiO = get_field<long>(p, "chiO");
    long K2 = get_field<long>(p, "K2");
    S.e = get_field<long>(p, "e");
    S.q = get_field<long>(p, "q");
    S.pg = get_field<long>(p, "pg");
    if (j.contains("lattice")) {
      S.Q = get_field<std::vector<std::vector<long>>>(j, "lattice");
      S.rho = static_cast<int>(S.Q.size());
      S.K = get_field<LatticeVec>(j, "K");
    } else {
      if (K2 <= 0) schema_error("a profile without lattice needs K2 > 0");
      S.rho = 1;
      S.Q = {{K2}};
      S.K = {1};
    }
    S.validate();
    if (S.K2() != K2) schema_error("profile K2 disagrees with the lattice");
  }
  if (j.contains("sw_table")) {
    for (auto& e : j.at("sw_table")) {
      SWEntry w;
      w.beta = get_field<LatticeVec>(e, "beta");
      f.data.check_vec(w.beta);
      w.sw = get_field<long>(e, "sw");
      if (e.contains("higher")) w.higher = get_field<std::vector<long>>(e, "higher");
      f.sw.push_back(w);
    }
  }
  return f;
}

SurfaceFile load_surface(const std::string& ref) {
  SurfaceFile f;
  if (is_toric_name(ref)) {
    f.name = ref;
    f.toric = true;
    f.toric_data = toric_builtin(ref);
    f.data = f.toric_data.data;
    return f;
  }
  if (ref == "K3" || ref.rfind("gt_", 0) == 0) {
    f.name = ref;
    f.data = numeric_profile(ref);
    // pg > 0: SW_0 = 1; minimal general type also has SW_K = (-1)^chi
    f.sw.push_back({LatticeVec(f.data.rho, 0), 1, {}});
    if (ref.rfind("gt_", 0) == 0) f.sw.push_back({f.data.K, (f.data.chiO % 2) ? -1 : 1, {}});
    return f;
  }
  std::ifstream in(ref);
  if (!in) schema_error("cannot open surface file " + ref);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    schema_error(std::string("surface file is not valid JSON: ") + e.what());
  }
  return parse_surface_file(j);
}

}  // namespace degloc
