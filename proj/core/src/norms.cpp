#include "stochnlw/norms.hpp"

#include "stochnlw/errors.hpp"
#include "stochnlw/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stochnlw {

namespace {

double volume(const GridSpec& g) {
    return std::pow(g.period(), g.dim);
}

bool is_inf(double x) {
    return std::isinf(x);
}

} // namespace

double sobolev_norm(const SpectralField& f, double s) {
    double acc = 0.0;
    for (LatticeIter it(f.grid); !it.done(); it.next()) {
        double mag2 = std::norm(f.coef[it.flat()]);
        if (mag2 == 0.0) continue;
        double bracket = 1.0 + std::sqrt(it.freq_sq());
        acc += std::pow(bracket, 2.0 * s) * mag2;
    }
    return std::sqrt(volume(f.grid) * acc);
}

double homogeneous_sobolev_norm(const SpectralField& f, double s) {
    double acc = 0.0;
    for (LatticeIter it(f.grid); !it.done(); it.next()) {
        double k2 = it.freq_sq();
        if (k2 == 0.0) continue;  // zero mode contributes nothing
        double mag2 = std::norm(f.coef[it.flat()]);
        if (mag2 == 0.0) continue;
        acc += std::pow(k2, s) * mag2;
    }
    return std::sqrt(volume(f.grid) * acc);
}

double pair_norm(const WavePair& p, double s) {
    return std::hypot(sobolev_norm(p.position, s), sobolev_norm(p.velocity, s - 1.0));
}

double lebesgue_norm(const SpectralField& f, double r, int oversample) {
    if (r < 1.0) throw ConfigError("lebesgue_norm: r must be >= 1");
    if (oversample < 1) throw ConfigError("lebesgue_norm: oversample must be >= 1");
    std::vector<double> u =
        oversample == 1 ? synthesize(f) : synthesize_padded(f, oversample);
    double m = 0.0;
    for (double v : u) m = std::max(m, std::abs(v));
    if (is_inf(r) || m == 0.0) return m;
    // Factor out the sup before the power sum: v/m and the bracket are then
    // invariant under scaling the field by a power of two, so the norm is
    // exactly 1-homogeneous (pow alone does not commute with scaling).
    double w = std::pow(f.grid.spacing() / oversample, f.grid.dim);
    double acc = 0.0;
    if (r == 2.0) {
        for (double v : u) {
            double t = v / m;
            acc += t * t;
        }
    } else {
        for (double v : u) acc += std::pow(std::abs(v) / m, r);
    }
    return m * std::pow(w * acc, 1.0 / r);
}

void MixedNormSpec::validate() const {
    if (!(q >= 1.0)) throw ConfigError("MixedNormSpec: q must be >= 1");
    if (!(r >= 2.0)) throw ConfigError("MixedNormSpec: r must be >= 2");
    if (!(t1 > t0)) throw IntervalError("MixedNormSpec: empty time interval");
    if (oversample < 1) throw ConfigError("MixedNormSpec: oversample must be >= 1");
}

void MixedNormSpec::require_admissible(int dim, double s) const {
    validate();
    double d = static_cast<double>(dim);
    double iq = is_inf(q) ? 0.0 : 1.0 / q;
    double ir = is_inf(r) ? 0.0 : 1.0 / r;
    double gap = iq + (d - 1.0) / 2.0 * ir - (d - 1.0) / 4.0;
    double scal = iq + d * ir - (d / 2.0 - s);
    if (gap > 1e-12 || std::abs(scal) > 1e-12)
        throw AdmissibilityError("(q,r) is not s-wave admissible in dimension " +
                                 std::to_string(dim));
}

namespace {

// ||u(t_i)||_{L^r} for the i-th trajectory sample.
double space_norm_at(const Trajectory& traj, const MixedNormSpec& spec, std::size_t i) {
    if (traj.role == Trajectory::Role::norm_samples) {
        if (traj.sampled_r != spec.r)
            throw ConfigError("mixed_norm: trajectory carries norms for a different r");
        return traj.samples[i];
    }
    return lebesgue_norm(traj.states[i].position, spec.r, spec.oversample);
}

} // namespace

double mixed_norm(const Trajectory& traj, const MixedNormSpec& spec) {
    spec.validate();
    if (traj.size() < 2) throw IntervalError("mixed_norm: trajectory has fewer than 2 samples");
    double lo = traj.t0, hi = traj.t_end();
    double slack = 1e-9 * std::max(1.0, std::abs(hi));
    if (spec.t0 < lo - slack || spec.t1 > hi + slack)
        throw IntervalError("mixed_norm: requested interval exceeds trajectory range");

    // Fractional sample positions of the window endpoints.
    double a = std::clamp((spec.t0 - traj.t0) / traj.dt, 0.0, double(traj.size() - 1));
    double b = std::clamp((spec.t1 - traj.t0) / traj.dt, 0.0, double(traj.size() - 1));
    std::size_t ia = static_cast<std::size_t>(std::ceil(a - 1e-9));
    std::size_t ib = static_cast<std::size_t>(std::floor(b + 1e-9));

    if (std::isinf(spec.q)) {
        double m = 0.0;
        for (std::size_t i = ia; i <= ib; ++i) m = std::max(m, space_norm_at(traj, spec, i));
        return m;
    }

    // g(t) = ||u(t)||_{L^r}^q, composite trapezoid with linearly interpolated
    // partial end segments when the window is off the sample grid. The space
    // norms are normalized by their max first (same reason as lebesgue_norm:
    // dividing out the max keeps the result exactly 1-homogeneous).
    bool partial_a = static_cast<double>(ia) - a > 1e-9;
    bool partial_b = b - static_cast<double>(ib) > 1e-9;
    std::size_t lo_i = partial_a ? ia - 1 : ia;
    std::size_t hi_i = partial_b ? ib + 1 : ib;
    std::vector<double> sn(hi_i - lo_i + 1);
    double mx = 0.0;
    for (std::size_t i = lo_i; i <= hi_i; ++i) {
        sn[i - lo_i] = space_norm_at(traj, spec, i);
        mx = std::max(mx, sn[i - lo_i]);
    }
    if (mx == 0.0) return 0.0;
    auto g = [&](std::size_t i) { return std::pow(sn[i - lo_i] / mx, spec.q); };
    double acc = 0.0;
    for (std::size_t i = ia; i < ib; ++i)
        acc += 0.5 * (g(i) + g(i + 1)) * traj.dt;
    if (partial_a) {
        double ga = g(ia - 1) + (g(ia) - g(ia - 1)) * (a - double(ia - 1));
        acc += 0.5 * (ga + g(ia)) * (double(ia) - a) * traj.dt;
    }
    if (partial_b) {
        double gb = g(ib) + (g(ib + 1) - g(ib)) * (b - double(ib));
        acc += 0.5 * (g(ib) + gb) * (b - double(ib)) * traj.dt;
    }
    return mx * std::pow(acc, 1.0 / spec.q);
}

double ct_pair_distance(const Trajectory& a, const Trajectory& b, double s) {
    if (a.role != Trajectory::Role::states || b.role != Trajectory::Role::states)
        throw ConfigError("ct_pair_distance: both trajectories must carry states");
    if (a.size() != b.size() || std::abs(a.dt - b.dt) > 1e-12 ||
        std::abs(a.t0 - b.t0) > 1e-12)
        throw IntervalError("ct_pair_distance: time grids differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, pair_norm(a.states[i] - b.states[i], s));
    return worst;
}

} // namespace stochnlw
