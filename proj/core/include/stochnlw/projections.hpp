#pragma once

#include "stochnlw/field.hpp"

#include <vector>

// Dyadic frequency projections, sharp cutoffs in physical frequency
// kappa = n/m: P_N keeps N/2 < |kappa| <= N for N >= 2 and |kappa| <= 1 for
// N = 1, so the dyadic family is an exact resolution of the identity.
// Boundary comparisons are made on |kappa|^2, which is exact in floating
// point for the lattices admitted by GridSpec.

namespace stochnlw {

enum class ProjMode { single, leq, gt };

SpectralField lp_project(const SpectralField& f, int N, ProjMode mode);
WavePair lp_project(const WavePair& p, int N, ProjMode mode);

// Dyadic levels 1, 2, 4, ... up to the smallest covering every nonzero
// frequency the grid can carry.
std::vector<int> dyadic_levels(const GridSpec& g);

} // namespace stochnlw
