#pragma once

// Surface numerics: intersection lattice, Riemann-Roch, toric chart data.

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

namespace degloc {

using LatticeVec = std::vector<long>;
using Weight2 = std::array<long, 2>;

struct SurfaceData {
  std::string name;
  int rho = 0;
  std::vector<std::vector<long>> Q;  // intersection matrix
  LatticeVec K;
  long e = 0;     // c2
  long chiO = 1;
  long q = 0;
  long pg = 0;
  long h0 = 1;    // number of connected components

  long dot(const LatticeVec& a, const LatticeVec& b) const;
  long K2() const { return dot(K, K); }
  LatticeVec dual(const LatticeVec& beta) const;  // K - beta
  void check_vec(const LatticeVec& v) const;
  void validate() const;  // Noether and chi(O) = h0 - q + pg
};

long riemann_roch_chi(const SurfaceData& S, const LatticeVec& beta);
long vd_beta(const SurfaceData& S, const LatticeVec& beta);
long twist_dim_d(const SurfaceData& S, const LatticeVec& beta, const LatticeVec& A);

LatticeVec vec_add(const LatticeVec& a, const LatticeVec& b);
LatticeVec vec_scale(const LatticeVec& a, long k);

// A smooth complete fan with rays in counterclockwise order.
struct ToricComponent {
  std::vector<Weight2> rays;
  std::vector<int> basis;  // ray indices whose divisors form the Picard basis
};

// fixed point of cone(v_i, v_{i+1}); m1, m2 are the characters of the coordinates x, y
struct Chart {
  int comp = 0;
  int i = 0;
  Weight2 m1{}, m2{};
};

// Torus-invariant divisor: one coefficient per ray, rays numbered across components.
using DivisorRep = std::vector<long>;

struct ToricSurface {
  std::string name;
  std::vector<ToricComponent> comps;
  std::vector<Chart> charts;
  std::vector<int> ray_offset;        // first global ray index of each component
  std::vector<LatticeVec> ray_class;  // class of each ray divisor
  SurfaceData data;

  int num_rays() const { return static_cast<int>(ray_class.size()); }
  DivisorRep rep(const LatticeVec& D) const;  // basis-ray representative
  DivisorRep canonical_rep() const;           // -sum of all rays
  LatticeVec class_of(const DivisorRep& a) const;
  Weight2 fiber_char(const Chart& c, const DivisorRep& a) const;
  std::vector<Weight2> polytope_points(const DivisorRep& a, int comp) const;
  std::vector<std::pair<int, Weight2>> global_sections(const DivisorRep& a) const;  // (component, character)
  bool effective(const LatticeVec& D) const;
};

ToricSurface make_toric(const std::string& name, const std::vector<ToricComponent>& comps);
ToricSurface toric_builtin(const std::string& name);  // P2, P1xP1, F1, F2, Fa for a <= 6
ToricSurface disjoint_union(const std::string& name, const std::vector<ToricSurface>& parts);

struct LineWeights {
  std::vector<Weight2> chart_chars;
  std::vector<std::pair<int, Weight2>> sections;
};
LineWeights toric_line_weights(const ToricSurface& T, const DivisorRep& D);

// Numerical profiles and surface files
SurfaceData numeric_profile(const std::string& name);  // K3, gt_k{K2}_chi{chi}
bool is_toric_name(const std::string& name);
nlohmann::json surface_to_json(const SurfaceData& S);

struct SWEntry {
  LatticeVec beta;
  long sw = 0;
  std::vector<long> higher;  // pairings of SW^j, j = 0..vd
};

struct SurfaceFile {
  std::string name;
  bool toric = false;
  ToricSurface toric_data;
  SurfaceData data;
  std::vector<SWEntry> sw;
};
SurfaceFile parse_surface_file(const nlohmann::json& j);
SurfaceFile load_surface(const std::string& ref);  // built-in name or path to a JSON file

}  // namespace degloc
