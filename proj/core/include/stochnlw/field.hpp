#pragma once

#include <complex>
#include <vector>

#include "stochnlw/grid.hpp"

namespace stochnlw {

using cplx = std::complex<double>;

// Fourier-side representation of a function on the torus:
//   f(x) = sum_n coef[n] e^{i kappa(n) . x},  kappa(n) = n / multiplier.
//
// Invariants for a valid field with hermitian == true:
//   * coef(-n) == conj(coef(n)) wherever both sites exist, so samples are real;
//   * every Nyquist row (some axis index == -modes/2) is identically zero.
//     That row has no +modes/2 partner on the asymmetric lattice, so keeping it
//     would break conjugation symmetry and exact Parseval; fields are genuine
//     trigonometric polynomials over the symmetric sublattice.
// hermitian == false marks outputs of non-symmetric multipliers (half-wave);
// such fields synthesize to complex samples.
struct SpectralField {
    GridSpec grid;
    std::vector<cplx> coef;
    bool hermitian = true;

    SpectralField() = default;
    explicit SpectralField(const GridSpec& g, bool herm = true)
        : grid(g), coef(g.total_points(), cplx{0.0, 0.0}), hermitian(herm) {
        g.validate();
    }

    std::size_t size() const { return coef.size(); }

    cplx& at_modes(const std::array<int, kMaxDim>& n) {
        std::size_t f = 0;
        for (int a = 0; a < grid.dim; ++a)
            f = f * static_cast<std::size_t>(grid.modes) +
                static_cast<std::size_t>(grid.index_of_mode(n[a]));
        return coef[f];
    }
    const cplx& at_modes(const std::array<int, kMaxDim>& n) const {
        return const_cast<SpectralField*>(this)->at_modes(n);
    }

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double a);

    friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
    friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
    friend SpectralField operator*(double a, SpectralField f) { return f *= a; }
};

// y += a * x without temporaries (time-stepping hot path).
void add_scaled(SpectralField& y, double a, const SpectralField& x);

// Largest deviation |coef(n) - conj(coef(-n))| over the symmetric sublattice,
// plus the largest magnitude sitting on a Nyquist row.
double hermitian_defect(const SpectralField& f);

// Average-symmetrize coef(n) <- (coef(n) + conj(coef(-n)))/2 and zero the
// Nyquist rows; sets the hermitian flag. Returns the pre-repair defect.
double make_hermitian(SpectralField& f);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

// Position/velocity pair (u, dt u) sharing one grid.
struct WavePair {
    SpectralField position;
    SpectralField velocity;

    WavePair() = default;
    explicit WavePair(const GridSpec& g) : position(g), velocity(g) {}
    WavePair(SpectralField pos, SpectralField vel);

    const GridSpec& grid() const { return position.grid; }

    WavePair& operator+=(const WavePair& o) {
        position += o.position;
        velocity += o.velocity;
        return *this;
    }
    WavePair& operator-=(const WavePair& o) {
        position -= o.position;
        velocity -= o.velocity;
        return *this;
    }
    WavePair& operator*=(double a) {
        position *= a;
        velocity *= a;
        return *this;
    }
    friend WavePair operator-(WavePair a, const WavePair& b) { return a -= b; }
    friend WavePair operator+(WavePair a, const WavePair& b) { return a += b; }
};

} // namespace stochnlw
