#pragma once

#include "stochnlw/field.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

// Fourier-multiplier randomization. The free generators live on the half
// lattice I = { n != 0 : last nonzero coordinate > 0 }; values at -I are the
// conjugates and the zero mode is real, so randomized fields stay real.
// Substreams are keyed by the signed mode vector (not by storage index), so
// the same seed yields the same multiplier at a given mode on every
// truncation of the lattice.

namespace stochnlw {

enum class DistributionKind { gaussian, bernoulli, uniform };

DistributionKind distribution_from_name(const std::string& name);  // throws ConfigError
const char* distribution_name(DistributionKind k);

struct SeedSpec {
    std::uint64_t base_seed = 0;
    std::uint64_t sample = 0;
};

struct CoefficientNoise {
    GridSpec grid;
    SeedSpec seed;
    DistributionKind dist = DistributionKind::gaussian;
    // One multiplier field per data slot (position = 0, velocity = 1).
    std::array<std::vector<cplx>, 2> values;
};

// True iff the last nonzero coordinate of n (within the first dim axes) is
// positive. Exactly one of {n in I, -n in I, n = 0} holds.
bool in_index_set(const std::array<int, kMaxDim>& n, int dim);

// Grid-independent substream key of a mode vector; requires |n_k| < 2048.
std::uint64_t mode_stream_key(const std::array<int, kMaxDim>& n, int dim);

// The multiplier g_{n,j} for n in I or n = 0 (callers derive -I by
// conjugation). Unit variance: E|g|^2 = 1 off the origin, E g_0^2 = 1.
cplx noise_at(const SeedSpec& seed, DistributionKind dist,
              const std::array<int, kMaxDim>& n, int dim, int slot);

CoefficientNoise sample_noise(const SeedSpec& seed, const GridSpec& grid,
                              DistributionKind dist);

// Largest |g(n) - conj(g(-n))| over the lattice; 0 for valid noise.
double noise_symmetry_defect(const CoefficientNoise& noise);

WavePair randomize_pair(const WavePair& pair, const CoefficientNoise& noise);

// Randomize directly from the seed without materializing the noise field.
WavePair randomize_pair(const WavePair& pair, const SeedSpec& seed,
                        DistributionKind dist);

struct MomentConditionReport {
    DistributionKind dist;
    double c;            // analytic constant in E e^{gamma X} <= e^{c gamma^2}
    double worst_ratio;  // max over the gamma grid of empirical MGF / bound
    double worst_gamma;
    double std_error_at_worst;
};

// Empirical MGF of the scalar component law against its analytic bound:
// gaussian components are N(0, 1/2) (c = 1/4); bernoulli signs are +-1 and
// uniform draws are U[-sqrt3, sqrt3] (both c = 1/2).
MomentConditionReport moment_condition_check(DistributionKind dist,
                                             const std::vector<double>& gammas,
                                             std::size_t samples,
                                             std::uint64_t base_seed);

struct KhintchineReport {
    double p;
    double l2;                // ||c||_{l^2} over the full lattice
    double empirical_lp;      // (mean |S|^p)^{1/p}
    double ratio;             // empirical_lp / (sqrt(p) * l2)
    double second_moment;     // mean S^2
    double second_moment_se;  // MC standard error of the mean of S^2
};

// Moments of S = sum_n g_n c_n for Hermitian coefficients c; for p = 2 the
// identity E S^2 = ||c||^2 holds exactly under the unit-variance convention.
KhintchineReport khintchine_check(const SpectralField& c, double p,
                                  std::size_t samples, DistributionKind dist,
                                  std::uint64_t base_seed);

// One-dimensional plateau profile: 1 on [-1,1], 0 outside [-2,2], smooth in
// between; eta_T(x) = prod_k eta1(x_k / (1+T)).
double eta1(double t);
double eta_value(const std::array<double, kMaxDim>& x, int dim, double T);

// Periodize f (base torus, multiplier 1) onto the extended torus with period
// multiplier m_ext at the same grid spacing, multiply by eta_T in physical
// space, and return the analyzed product. Requires 2*pi*m_ext >= 4(1+T) + 2
// so the cutoff support fits strictly inside the extended cell. The raw
// product samples (pre-analysis, so not band-limited) land in *samples_out
// when non-null.
SpectralField cutoff_embed(const SpectralField& f, double T, int m_ext,
                           std::vector<double>* samples_out = nullptr);

} // namespace stochnlw
