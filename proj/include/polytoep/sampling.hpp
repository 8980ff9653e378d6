#pragma once

// Seeded random test data: polydomain specs, Fourier symbols and pure tuples.

#include <random>
#include <vector>

#include "polytoep/cpmaps.hpp"
#include "polytoep/toeplitz.hpp"
#include "polytoep/weights.hpp"

namespace polytoep {

using Rng = std::mt19937_64;

struct SpecLimits {
  int max_k = 2;
  int max_n = 2;
  int max_m = 3;
  int max_degree = 3;
  int max_extra_words = 3;  // words of length >= 2 added to each f_i
  double max_coeff = 2.0;   // coefficients drawn from (0, max_coeff]
};

PolydomainSpec random_spec(Rng& rng, const SpecLimits& lim = {});

// The phi example: every word of length 1..max_degree has coefficient 1.
PolydomainSpec phi_spec(int n, int m, int max_degree);

// Up to max_terms monomials with entries of modulus <= 1 and pairs inside the truncation.
FourierSymbol random_symbol(const SpacePtr& space, Rng& rng, int max_terms);
// Hermitian symbol: A_{(beta,alpha)} = A_{(alpha,beta)}^*, A_{(e,e)} = c I + H.
FourierSymbol random_hermitian_symbol(const SpacePtr& space, Rng& rng, int max_terms, double diagonal_shift);

DenseMatrix random_matrix(Rng& rng, Index rows, Index cols);

struct PureTupleSample {
  DenseTuple tuple;
  double r_max;     // largest radius keeping membership (bisection to 1e-6)
  double radius;    // radius actually used
};

// X_{i,j} = I (x) .. (x) Y_{i,j} (x) .. (x) I on H = C^{d_1} (x) .. (x) C^{d_k}, scaled to
// fraction * r_max so the Berezin tail is small.
PureTupleSample random_pure_tuple(const PolydomainSpec& spec, const std::vector<int>& factor_dims, Rng& rng,
                                  double fraction);

}  // namespace polytoep
