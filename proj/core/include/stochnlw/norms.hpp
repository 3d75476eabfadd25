#pragma once

#include "stochnlw/field.hpp"

#include <vector>

// Sobolev, Lebesgue and mixed space-time norms.
//
// All space norms carry the physical volume factor (2*pi*m)^d so that Fourier
// sums and grid quadratures of integrals agree exactly (Parseval holds to
// rounding). Frequencies are physical: kappa = n/m, <kappa> = 1 + |kappa|
// with the Euclidean length, so norms computed on an extended torus (m > 1)
// are directly comparable with base-torus norms.
//
// L^infinity is the grid maximum, a lower bound on the true sup; callers can
// tighten it by passing oversample > 1 (zero-padded synthesis on a refined
// grid). Mixed norms use composite trapezoid on the trajectory's own time
// grid and are quadrature-limited by construction.

namespace stochnlw {

double sobolev_norm(const SpectralField& f, double s);
double homogeneous_sobolev_norm(const SpectralField& f, double s);

// Norm of (u0, u1) in H^s x H^{s-1}.
double pair_norm(const WavePair& p, double s);

// r in [1, inf]; pass std::numeric_limits<double>::infinity() for the sup.
double lebesgue_norm(const SpectralField& f, double r, int oversample = 1);

// Time-sampled evolution on a uniform grid. Either full states are kept, or
// (to bound memory on long Monte Carlo runs) only the scalar space norms
// ||u(t_i)||_{L^r} for one fixed r, flagged by the role tag.
struct Trajectory {
    enum class Role { states, norm_samples };

    Role role = Role::states;
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<WavePair> states;   // role == states
    std::vector<double> samples;    // role == norm_samples
    double sampled_r = 0.0;         // the r the samples were taken at

    std::size_t size() const { return role == Role::states ? states.size() : samples.size(); }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double t_end() const { return size() ? time(size() - 1) : t0; }
};

struct MixedNormSpec {
    double q = 2.0;   // time exponent, in [1, inf]
    double r = 2.0;   // space exponent, in [2, inf]
    double t0 = 0.0;
    double t1 = 1.0;
    int oversample = 1;

    void validate() const;  // throws IntervalError / ConfigError
    // Wave admissibility at regularity s:
    //   1/q + (d-1)/(2r) <= (d-1)/4  and  1/q + d/r = d/2 - s.
    void require_admissible(int dim, double s) const;  // throws AdmissibilityError
};

// ( integral_{[t0,t1]} ||u(t)||_{L^r}^q dt )^{1/q} by composite trapezoid on
// the trajectory samples (endpoints interpolated when off the sample grid);
// max over samples in the window when q = inf.
double mixed_norm(const Trajectory& traj, const MixedNormSpec& spec);

// sup over shared sample times of ||a(t) - b(t)||_{H^s x H^{s-1}}.
double ct_pair_distance(const Trajectory& a, const Trajectory& b, double s);

} // namespace stochnlw
