#pragma once

#include "stochnlw/field.hpp"

#include <vector>

// Exact linear wave propagators, diagonal in Fourier space. With k = |kappa|
// the position multiplier pair is (cos(tk), sigma(t,k)) where
// sigma(t,k) = sin(tk)/k and sigma(t,0) = t (the removable-singularity
// limit), and the velocity is the exact time derivative, so every returned
// state solves the linear equation exactly on the lattice.

namespace stochnlw {

enum class HalfWaveSign { plus, minus };

double sigma_multiplier(double t, double k);  // sin(tk)/k, = t at k = 0

WavePair s_per(double t, const WavePair& pair);

// -(k/<k>) sin(tk) u0 + (cos(tk)/<k>) u1 with <k> = 1 + k; satisfies
// <grad> s_tilde(t) = velocity of s_per(t) identically.
SpectralField s_tilde(double t, const WavePair& pair);

// Multiply by e^{+-itk}. Complex-valued in general: Hermitian flag cleared.
SpectralField half_wave(HalfWaveSign sign, double t, const SpectralField& f);

// Forcing history F(t_i) on a uniform grid, input to the Duhamel integral.
struct ForcingHistory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<SpectralField> values;
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
};

// -int_{t0}^{t} sigma(t - t', k) F(t') dt' by composite trapezoid on the
// forcing grid; t0 and t must lie on that grid. Verification-grade: the
// time stepper and the Picard solver use incremental forms instead.
SpectralField duhamel(double t0, double t, const ForcingHistory& forcing);

// Exact linear flow of one fixed initial pair.
struct LinearFlow {
    WavePair initial;
    explicit LinearFlow(WavePair p0) : initial(std::move(p0)) {}
    WavePair at(double t) const { return s_per(t, initial); }
    const GridSpec& grid() const { return initial.grid(); }
};

// Cached s_per(dt) multipliers for repeated stepping on one grid.
class DriftOp {
  public:
    DriftOp(const GridSpec& grid, double dt);
    double dt() const { return dt_; }
    const GridSpec& grid() const { return grid_; }
    void apply(WavePair& state) const;  // state <- s_per(dt, state)

  private:
    GridSpec grid_;
    double dt_;
    std::vector<double> cos_, sigma_, msin_;
};

} // namespace stochnlw
