#include "stochnlw/propagators.hpp"

#include "stochnlw/errors.hpp"

#include <cmath>

namespace stochnlw {

double sigma_multiplier(double t, double k) {
    return k == 0.0 ? t : std::sin(t * k) / k;
}

WavePair s_per(double t, const WavePair& pair) {
    WavePair out(pair.grid());
    out.position.hermitian = pair.position.hermitian;
    out.velocity.hermitian = pair.velocity.hermitian;
    for (LatticeIter it(pair.grid()); !it.done(); it.next()) {
        double k = std::sqrt(it.freq_sq());
        double c = std::cos(t * k);
        double s = sigma_multiplier(t, k);
        cplx p = pair.position.coef[it.flat()];
        cplx v = pair.velocity.coef[it.flat()];
        out.position.coef[it.flat()] = c * p + s * v;
        out.velocity.coef[it.flat()] = -k * std::sin(t * k) * p + c * v;
    }
    return out;
}

SpectralField s_tilde(double t, const WavePair& pair) {
    SpectralField out(pair.grid());
    out.hermitian = pair.position.hermitian && pair.velocity.hermitian;
    for (LatticeIter it(pair.grid()); !it.done(); it.next()) {
        double k = std::sqrt(it.freq_sq());
        double bracket = 1.0 + k;
        cplx p = pair.position.coef[it.flat()];
        cplx v = pair.velocity.coef[it.flat()];
        out.coef[it.flat()] =
            -(k / bracket) * std::sin(t * k) * p + (std::cos(t * k) / bracket) * v;
    }
    return out;
}

SpectralField half_wave(HalfWaveSign sign, double t, const SpectralField& f) {
    SpectralField out(f.grid);
    out.hermitian = false;  // e^{+-itk} breaks conjugate symmetry in general
    double dir = sign == HalfWaveSign::plus ? 1.0 : -1.0;
    for (LatticeIter it(f.grid); !it.done(); it.next()) {
        double phase = dir * t * std::sqrt(it.freq_sq());
        out.coef[it.flat()] = f.coef[it.flat()] * cplx{std::cos(phase), std::sin(phase)};
    }
    return out;
}

SpectralField duhamel(double t0, double t, const ForcingHistory& forcing) {
    if (forcing.values.empty() || forcing.dt <= 0.0)
        throw IntervalError("duhamel: empty or degenerate forcing history");
    const GridSpec& g = forcing.values.front().grid;
    for (const auto& f : forcing.values) require_same_grid(g, f.grid, "duhamel");

    auto index_of = [&](double time, const char* what) -> std::size_t {
        double x = (time - forcing.t0) / forcing.dt;
        long i = std::lround(x);
        if (i < 0 || static_cast<std::size_t>(i) >= forcing.values.size() ||
            std::abs(x - static_cast<double>(i)) > 1e-9 * (1.0 + std::abs(x)))
            throw IntervalError(std::string("duhamel: ") + what +
                                " is not on the forcing grid");
        return static_cast<std::size_t>(i);
    };
    std::size_t i0 = index_of(t0, "t0");
    std::size_t i1 = index_of(t, "t");
    if (i1 < i0) throw IntervalError("duhamel: t < t0");

    SpectralField out(g);
    if (i0 == i1) return out;
    bool herm = true;
    for (std::size_t i = i0; i <= i1; ++i) {
        herm = herm && forcing.values[i].hermitian;
        double w = forcing.dt * ((i == i0 || i == i1) ? 0.5 : 1.0);
        double tau = t - forcing.time(i);
        const SpectralField& F = forcing.values[i];
        for (LatticeIter it(g); !it.done(); it.next()) {
            double sig = sigma_multiplier(tau, std::sqrt(it.freq_sq()));
            out.coef[it.flat()] -= w * sig * F.coef[it.flat()];
        }
    }
    out.hermitian = herm;
    return out;
}

DriftOp::DriftOp(const GridSpec& grid, double dt) : grid_(grid), dt_(dt) {
    grid.validate();
    std::size_t n = grid.total_points();
    cos_.resize(n);
    sigma_.resize(n);
    msin_.resize(n);
    for (LatticeIter it(grid); !it.done(); it.next()) {
        double k = std::sqrt(it.freq_sq());
        cos_[it.flat()] = std::cos(dt * k);
        sigma_[it.flat()] = sigma_multiplier(dt, k);
        msin_[it.flat()] = -k * std::sin(dt * k);
    }
}

void DriftOp::apply(WavePair& state) const {
    require_same_grid(grid_, state.grid(), "DriftOp::apply");
    for (std::size_t i = 0; i < cos_.size(); ++i) {
        cplx p = state.position.coef[i];
        cplx v = state.velocity.coef[i];
        state.position.coef[i] = cos_[i] * p + sigma_[i] * v;
        state.velocity.coef[i] = msin_[i] * p + cos_[i] * v;
    }
}

} // namespace stochnlw
