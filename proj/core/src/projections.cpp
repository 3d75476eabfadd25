#include "stochnlw/projections.hpp"

#include "stochnlw/errors.hpp"

namespace stochnlw {

namespace {

bool is_power_of_two(int N) {
    return N >= 1 && (N & (N - 1)) == 0;
}

bool keep_mode(double k2, int N, ProjMode mode) {
    double n2 = static_cast<double>(N) * N;
    switch (mode) {
        case ProjMode::leq:
            return k2 <= n2;
        case ProjMode::gt:
            return k2 > n2;
        case ProjMode::single:
            if (N == 1) return k2 <= 1.0;
            return k2 > n2 / 4.0 && k2 <= n2;
    }
    return false;
}

} // namespace

SpectralField lp_project(const SpectralField& f, int N, ProjMode mode) {
    if (!is_power_of_two(N)) throw ConfigError("lp_project: N must be a power of two");
    SpectralField out(f.grid);
    out.hermitian = f.hermitian;
    for (LatticeIter it(f.grid); !it.done(); it.next())
        if (keep_mode(it.freq_sq(), N, mode)) out.coef[it.flat()] = f.coef[it.flat()];
    return out;
}

WavePair lp_project(const WavePair& p, int N, ProjMode mode) {
    return WavePair(lp_project(p.position, N, mode), lp_project(p.velocity, N, mode));
}

std::vector<int> dyadic_levels(const GridSpec& g) {
    g.validate();
    int half = g.modes / 2 - 1;
    double kmax2 = static_cast<double>(g.dim) * half * half /
                   (static_cast<double>(g.multiplier) * g.multiplier);
    std::vector<int> levels{1};
    while (static_cast<double>(levels.back()) * levels.back() < kmax2)
        levels.push_back(levels.back() * 2);
    return levels;
}

} // namespace stochnlw
