#include "stochnlw/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stochnlw {

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (a != b)
        throw GridMismatch(std::string(where) + ": operands live on different grids");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(grid, o.grid, "field +");
    for (std::size_t i = 0; i < coef.size(); ++i) coef[i] += o.coef[i];
    hermitian = hermitian && o.hermitian;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_grid(grid, o.grid, "field -");
    for (std::size_t i = 0; i < coef.size(); ++i) coef[i] -= o.coef[i];
    hermitian = hermitian && o.hermitian;
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (auto& c : coef) c *= a;
    return *this;
}

void add_scaled(SpectralField& y, double a, const SpectralField& x) {
    require_same_grid(y.grid, x.grid, "add_scaled");
    for (std::size_t i = 0; i < y.coef.size(); ++i) y.coef[i] += a * x.coef[i];
    y.hermitian = y.hermitian && x.hermitian;
}

double hermitian_defect(const SpectralField& f) {
    double worst = 0.0;
    for (LatticeIter it(f.grid); !it.done(); it.next()) {
        if (it.on_nyquist()) {
            worst = std::max(worst, std::abs(f.coef[it.flat()]));
            continue;
        }
        std::size_t r = reflect_flat(f.grid, it.modes());
        worst = std::max(worst, std::abs(f.coef[it.flat()] - std::conj(f.coef[r])));
    }
    return worst;
}

double make_hermitian(SpectralField& f) {
    double defect = hermitian_defect(f);
    for (LatticeIter it(f.grid); !it.done(); it.next()) {
        std::size_t i = it.flat();
        if (it.on_nyquist()) {
            f.coef[i] = 0.0;
            continue;
        }
        std::size_t r = reflect_flat(f.grid, it.modes());
        if (r < i) continue; // each symmetric pair handled once, from its lead site
        cplx avg = 0.5 * (f.coef[i] + std::conj(f.coef[r]));
        f.coef[i] = avg;
        f.coef[r] = std::conj(avg);
        if (r == i) f.coef[i] = cplx{avg.real(), 0.0}; // self-paired zero mode stays real
    }
    f.hermitian = true;
    return defect;
}

WavePair::WavePair(SpectralField pos, SpectralField vel)
    : position(std::move(pos)), velocity(std::move(vel)) {
    require_same_grid(position.grid, velocity.grid, "wave pair");
}

} // namespace stochnlw
