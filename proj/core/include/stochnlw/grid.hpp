#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <numbers>

#include "stochnlw/errors.hpp"

namespace stochnlw {

inline constexpr int kMaxDim = 5;

// Periodic lattice on the torus (R / 2*pi*m Z)^d.
//
// Each axis carries `modes` Fourier modes with integer index n in
// [-modes/2, modes/2); the physical frequency of index n is kappa = n / m so
// that e^{i kappa x} is 2*pi*m periodic. Collocation points are
// x_j = j * (2*pi*m / modes), j = 0..modes-1, identical spacing on every axis.
//
// modes must be even; multiplier m must be odd so that +/- frequency pairs of
// the base torus embed exactly. Total point count is capped (desk scale).
struct GridSpec {
    int dim = 3;        // spatial dimension, 3..5
    int modes = 16;     // modes (= collocation points) per axis, even, >= 4
    int multiplier = 1; // period = 2*pi*multiplier, odd, >= 1

    // 2^24 points = 256 MB per complex field; wide periodic extensions for
    // the propagation-speed runs need up to 240^3 while staying desk scale.
    static constexpr std::size_t kMaxPoints = std::size_t(1) << 24;

    void validate() const {
        if (dim < 3 || dim > kMaxDim)
            throw GridError("grid: dim must be 3, 4 or 5");
        if (modes < 4 || modes % 2 != 0)
            throw GridError("grid: modes per axis must be even and >= 4");
        if (multiplier < 1 || multiplier % 2 == 0)
            throw GridError("grid: period multiplier must be odd and >= 1");
        double log2n = static_cast<double>(dim) * std::log2(static_cast<double>(modes));
        if (log2n > 24.0 + 1e-9)
            throw GridError("grid: total points exceed the desk-scale cap 2^24");
        (void)kMaxPoints;
    }

    std::size_t total_points() const {
        std::size_t n = 1;
        for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(modes);
        return n;
    }

    double period() const { return 2.0 * std::numbers::pi * multiplier; }
    double spacing() const { return period() / modes; }

    // Signed integer mode of storage index k in [0, modes).
    int mode_of_index(int k) const { return k < modes / 2 ? k : k - modes; }
    // Storage index of signed mode n in [-modes/2, modes/2).
    int index_of_mode(int n) const { return n >= 0 ? n : n + modes; }

    // Physical frequency of storage index k along one axis.
    double freq_of_index(int k) const {
        return static_cast<double>(mode_of_index(k)) / multiplier;
    }

    // Centered coordinate of collocation index j, in [-period/2, period/2).
    double coord_centered(int j) const {
        double x = j * spacing();
        return x >= period() / 2 ? x - period() : x;
    }

    bool operator==(const GridSpec& o) const {
        return dim == o.dim && modes == o.modes && multiplier == o.multiplier;
    }
    bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

// Odometer over the d-dimensional index cube [0, modes)^d in row-major order
// (last axis fastest), tracking signed modes per axis without div/mod.
class LatticeIter {
public:
    explicit LatticeIter(const GridSpec& g) : g_(g) {
        idx_.fill(0);
        for (int a = 0; a < g_.dim; ++a) mode_[a] = 0;
        done_ = false;
    }

    bool done() const { return done_; }
    std::size_t flat() const { return flat_; }
    const std::array<int, kMaxDim>& modes() const { return mode_; }

    // Squared Euclidean physical frequency |kappa|^2 of the current site.
    double freq_sq() const {
        double s = 0;
        for (int a = 0; a < g_.dim; ++a) {
            double f = static_cast<double>(mode_[a]) / g_.multiplier;
            s += f * f;
        }
        return s;
    }

    // True if any axis sits on the unpaired Nyquist row -modes/2.
    bool on_nyquist() const {
        for (int a = 0; a < g_.dim; ++a)
            if (mode_[a] == -g_.modes / 2) return true;
        return false;
    }

    void next() {
        ++flat_;
        for (int a = g_.dim - 1; a >= 0; --a) {
            if (++idx_[a] < g_.modes) {
                mode_[a] = g_.mode_of_index(idx_[a]);
                return;
            }
            idx_[a] = 0;
            mode_[a] = 0;
        }
        done_ = true;
    }

private:
    GridSpec g_;
    std::array<int, kMaxDim> idx_{};
    std::array<int, kMaxDim> mode_{};
    std::size_t flat_ = 0;
    bool done_ = false;
};

// Flat index of the reflected site -n (mod modes per axis). The Nyquist row
// maps to itself under this reflection.
inline std::size_t reflect_flat(const GridSpec& g, const std::array<int, kMaxDim>& modes) {
    std::size_t f = 0;
    for (int a = 0; a < g.dim; ++a) {
        int n = -modes[a];
        if (n < -g.modes / 2) n += g.modes; // -(-N/2) = N/2 wraps to -N/2
        f = f * static_cast<std::size_t>(g.modes) + static_cast<std::size_t>(g.index_of_mode(n));
    }
    return f;
}

} // namespace stochnlw
