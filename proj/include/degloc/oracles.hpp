#pragma once

// Independent reference computations used by the test suites and `verify`.

#include <vector>

#include "degloc/hilbloc.hpp"
#include "degloc/ring.hpp"

namespace degloc::oracle {

// coefficients of prod_m (1 - q^m)^{-e} up to q^N
std::vector<long> gottsche_series(long e, int N);

// minimal generators of the monomial ideal of mu, as exponent pairs (i, j) of x^i y^j
std::vector<std::array<int, 2>> monomial_generators(const Partition& mu);

// P * chi(I_mu, I_nu xi) from the Taylor resolutions of both ideals, P = (1 - x)(1 - y)
EquivChar taylor_rhom_times_P(const Partition& mu, const Partition& nu, const Weight2& m1, const Weight2& m2,
                              const Exp3& xi);

// Hom_R(I_mu, R / I_mu) weight by weight, by linear algebra on generator images
EquivChar hom_tangent(const Partition& mu, const Weight2& m1, const Weight2& m2);

// Segre classes of a split bundle: s_k = (-1)^k h_k(roots)
GradedClass split_segre(const std::vector<GradedClass>& roots, int k);

}  // namespace degloc::oracle
