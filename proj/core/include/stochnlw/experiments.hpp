#pragma once

#include "stochnlw/montecarlo.hpp"
#include "stochnlw/projections.hpp"

#include <optional>
#include <vector>

// Scenario drivers: the unbounded-domain emulation via an extended torus
// with a compactly supported cutoff, finite-speed-of-propagation agreement,
// the cutoff norm-equivalence ratios, frequency-truncation convergence, and
// uniqueness of the perturbed solution by iterated local contraction.

namespace stochnlw {

// Deterministic rough-but-H^s test pair: coefficient moduli decay like
// <kappa>^{-(s + (d+1)/2 + 0.01)} (velocity one derivative rougher) with
// fixed quasi-random phases, scaled so pair_norm(result, s) == amplitude.
// The 0.01 margin keeps the H^s norm bounded uniformly in the truncation
// while leaving no spare smoothness, which is what truncation studies want.
WavePair reference_pair(const GridSpec& g, double s, double amplitude);

struct FspConfig {
    GridSpec base;            // multiplier 1
    int extension = 3;        // extended-torus period multiplier, odd
    double T = 1.0;           // cutoff scale of eta_T
    double horizon = 1.0;     // evolve and compare on [0, horizon]
    int margin_cells = 2;     // fixed part of the light-cone slack
    double dt = 1e-2;
    bool nonlinear = true;    // false: exact linear propagator, no stepping
    std::optional<Dealias> dealias;  // resolved against the base grid
    int compare_stride = 10;  // compare every this many steps

    // Cutoff support plus the domain of influence of the comparison region
    // must fit strictly inside the extended cell: 2 pi m >= 4(1+T) + 2 + 2h.
    void validate() const;  // throws ExtensionTooSmall / ConfigError
};

struct FspReport {
    std::vector<double> times;
    std::vector<double> discrepancy;       // sup |u_ext - u_per| on the region
    std::vector<std::size_t> region_points;
    double worst = 0.0;
};

// Randomize the data, evolve the cutoff-embedded pair on the extended torus
// and the pair itself on the base torus, and report the sup difference at
// matching grid points over the region |x_k| <= (1+T) - t - margin(t),
// margin(t) = (margin_cells + ceil(t/dx)) dx. Inside that region the two
// continuum solutions are identical by finite speed of propagation, so the
// report is pure discretization error.
FspReport fsp_experiment(const FspConfig& cfg, const WavePair& data,
                         const SeedSpec& seed, DistributionKind dist);

struct ConvergenceTable {
    std::vector<int> levels;             // strictly increasing, dyadic
    std::vector<double> h1_err;          // sup_t H^1 x L^2 error vs full data
    std::vector<double> strichartz_err;  // L^q_T L^r_x position error
};

// Evolve the randomized pair and each P_{<= N_k} truncation of it in
// lockstep; errors are against the untruncated run. A level whose ball
// already holds every grid frequency reproduces the reference bit for bit,
// so its row is exactly zero.
ConvergenceTable truncation_convergence(const WavePair& data, const SeedSpec& seed,
                                        DistributionKind dist,
                                        const std::vector<int>& levels, double T,
                                        const SolverConfig& cfg);

struct IntervalCheck {
    double t_lo = 0.0, t_hi = 0.0;
    double budget = 0.0;          // min(K |I|^theta, cap) for this interval
    double contraction = 0.0;     // worst measured ratio over both runs
    double limit_distance = 0.0;  // H^1 x L^2 distance of the two limits
    int iterations_a = 0, iterations_b = 0;
};

struct UniquenessReport {
    std::vector<IntervalCheck> intervals;
    double worst_contraction = 0.0;
    double worst_limit_distance = 0.0;
    bool all_converged = false;
    bool contraction_ok = false;  // every factor <= 1/2
};

// Partition [0, T] by the Strichartz budget of z (cap acts as the smallness
// threshold), then on each interval run the fixed-point iteration twice:
// from the plain linear iterate and from the linear iterate offset by a
// deterministic H^1 perturbation of the given amplitude. Both runs must
// contract and land on the same endpoint; the endpoint of the unperturbed
// run seeds the next interval, marching uniqueness across [0, T].
UniquenessReport uniqueness_check(const LinearFlow& z, double T,
                                  const SolverConfig& cfg, double K, double cap,
                                  double perturbation_amplitude = 1e-3);

struct NormEquivalenceCase {
    double s = 0.0, T = 0.0;
    double ratio = 0.0;   // ||eta_T f||_{H^s(ext)} / (<T>^{d/2} ||f||_{H^s})
    double lhs_l2 = 0.0;  // sqrt(quadrature of (eta_T f)^2 over the plateau)
    double rhs_l2 = 0.0;  // same sum over the whole extended cell
};

// One cell of the cutoff norm-equivalence table. lhs_l2 <= rhs_l2 holds
// exactly in floating point: eta_T == 1 exactly on plateau grid points and
// the right side folds the same nonnegative terms plus extra ones, in the
// same order.
NormEquivalenceCase norm_equivalence_case(const SpectralField& f, double s,
                                          double T, int m_ext);

// Window of the frequency-unit decomposition: psi1 is 1 at 0, supported in
// (-1, 1), with sum_{n in Z} psi1(xi - n) == 1 identically.
double modulation_window(double xi);

// ||g||_{M^s_{2,1}} = sum_n <n>^s ||psi(D - n) g||_{L^2} with the tensor
// window psi(xi) = prod_k psi1(xi_k), n ranging over Z^d. Finite sum: each
// lattice frequency meets at most 3^d windows.
double modulation_norm(const SpectralField& g, double s);

} // namespace stochnlw
