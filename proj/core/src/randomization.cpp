#include "stochnlw/randomization.hpp"

#include "stochnlw/errors.hpp"
#include "stochnlw/rng.hpp"
#include "stochnlw/transform.hpp"

#include <cmath>
#include <numbers>

namespace stochnlw {

DistributionKind distribution_from_name(const std::string& name) {
    if (name == "gaussian") return DistributionKind::gaussian;
    if (name == "bernoulli") return DistributionKind::bernoulli;
    if (name == "uniform") return DistributionKind::uniform;
    throw ConfigError("unknown distribution '" + name +
                      "' (expected gaussian, bernoulli or uniform)");
}

const char* distribution_name(DistributionKind k) {
    switch (k) {
        case DistributionKind::gaussian: return "gaussian";
        case DistributionKind::bernoulli: return "bernoulli";
        case DistributionKind::uniform: return "uniform";
    }
    return "?";
}

bool in_index_set(const std::array<int, kMaxDim>& n, int dim) {
    for (int a = dim - 1; a >= 0; --a)
        if (n[a] != 0) return n[a] > 0;
    return false;  // n = 0
}

std::uint64_t mode_stream_key(const std::array<int, kMaxDim>& n, int dim) {
    std::uint64_t key = 0;
    for (int a = 0; a < dim; ++a) {
        int v = n[a];
        if (v <= -2048 || v >= 2048) throw GridError("mode_stream_key: mode out of range");
        key |= static_cast<std::uint64_t>(v + 2048) << (12 * a);
    }
    return key;
}

namespace {

constexpr double kInvSqrt2 = std::numbers::sqrt2 / 2.0;

bool is_zero_mode(const std::array<int, kMaxDim>& n, int dim) {
    for (int a = 0; a < dim; ++a)
        if (n[a] != 0) return false;
    return true;
}

} // namespace

cplx noise_at(const SeedSpec& seed, DistributionKind dist,
              const std::array<int, kMaxDim>& n, int dim, int slot) {
    SubStream ss(seed.base_seed, seed.sample, mode_stream_key(n, dim),
                 static_cast<std::uint64_t>(slot));
    bool zero = is_zero_mode(n, dim);
    switch (dist) {
        case DistributionKind::gaussian: {
            double a, b;
            ss.gaussian_pair(a, b);
            if (zero) return {a, 0.0};
            return {a * kInvSqrt2, b * kInvSqrt2};
        }
        case DistributionKind::bernoulli: {
            if (zero) return {ss.sign(), 0.0};
            double re = ss.sign(), im = ss.sign();
            return {re * kInvSqrt2, im * kInvSqrt2};
        }
        case DistributionKind::uniform: {
            if (zero) return {ss.uniform_sym(), 0.0};
            double re = ss.uniform_sym(), im = ss.uniform_sym();
            return {re * kInvSqrt2, im * kInvSqrt2};
        }
    }
    return {0.0, 0.0};
}

CoefficientNoise sample_noise(const SeedSpec& seed, const GridSpec& grid,
                              DistributionKind dist) {
    grid.validate();
    CoefficientNoise out;
    out.grid = grid;
    out.seed = seed;
    out.dist = dist;
    for (auto& v : out.values) v.assign(grid.total_points(), cplx{0.0, 0.0});

    for (LatticeIter it(grid); !it.done(); it.next()) {
        const auto& n = it.modes();
        if (it.on_nyquist()) {
            // Off the meaningful lattice (valid fields vanish here); the
            // identity multiplier keeps symmetry since these sites self-pair.
            out.values[0][it.flat()] = 1.0;
            out.values[1][it.flat()] = 1.0;
            continue;
        }
        if (is_zero_mode(n, grid.dim)) {
            for (int j = 0; j < 2; ++j)
                out.values[j][it.flat()] = noise_at(seed, dist, n, grid.dim, j);
            continue;
        }
        if (!in_index_set(n, grid.dim)) continue;  // filled from its partner
        std::size_t r = reflect_flat(grid, n);
        for (int j = 0; j < 2; ++j) {
            cplx g = noise_at(seed, dist, n, grid.dim, j);
            out.values[j][it.flat()] = g;
            out.values[j][r] = std::conj(g);
        }
    }
    return out;
}

double noise_symmetry_defect(const CoefficientNoise& noise) {
    double worst = 0.0;
    for (LatticeIter it(noise.grid); !it.done(); it.next()) {
        std::size_t r = reflect_flat(noise.grid, it.modes());
        for (int j = 0; j < 2; ++j)
            worst = std::max(worst, std::abs(noise.values[j][it.flat()] -
                                             std::conj(noise.values[j][r])));
    }
    return worst;
}

WavePair randomize_pair(const WavePair& pair, const CoefficientNoise& noise) {
    require_same_grid(pair.grid(), noise.grid, "randomize_pair");
    WavePair out = pair;
    for (std::size_t i = 0; i < out.position.coef.size(); ++i) {
        out.position.coef[i] *= noise.values[0][i];
        out.velocity.coef[i] *= noise.values[1][i];
    }
    return out;
}

WavePair randomize_pair(const WavePair& pair, const SeedSpec& seed,
                        DistributionKind dist) {
    WavePair out = pair;
    const GridSpec& g = pair.grid();
    for (LatticeIter it(g); !it.done(); it.next()) {
        const auto& n = it.modes();
        if (it.on_nyquist()) continue;  // coefficients are zero there
        if (is_zero_mode(n, g.dim)) {
            out.position.coef[it.flat()] *= noise_at(seed, dist, n, g.dim, 0);
            out.velocity.coef[it.flat()] *= noise_at(seed, dist, n, g.dim, 1);
            continue;
        }
        if (!in_index_set(n, g.dim)) continue;
        std::size_t r = reflect_flat(g, n);
        cplx g0 = noise_at(seed, dist, n, g.dim, 0);
        cplx g1 = noise_at(seed, dist, n, g.dim, 1);
        out.position.coef[it.flat()] *= g0;
        out.position.coef[r] *= std::conj(g0);
        out.velocity.coef[it.flat()] *= g1;
        out.velocity.coef[r] *= std::conj(g1);
    }
    return out;
}

MomentConditionReport moment_condition_check(DistributionKind dist,
                                             const std::vector<double>& gammas,
                                             std::size_t samples,
                                             std::uint64_t base_seed) {
    if (gammas.empty()) throw ConfigError("moment_condition_check: empty gamma grid");
    if (samples < 1000) throw ConfigError("moment_condition_check: need >= 1000 samples");

    // Scalar component laws and their analytic constants; see header.
    double c = dist == DistributionKind::gaussian ? 0.25 : 0.5;
    std::vector<double> draws(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        SubStream ss(base_seed, i, 0, 0);
        switch (dist) {
            case DistributionKind::gaussian: {
                double a, b;
                ss.gaussian_pair(a, b);
                draws[i] = a * kInvSqrt2;  // N(0, 1/2)
                break;
            }
            case DistributionKind::bernoulli:
                draws[i] = ss.sign();
                break;
            case DistributionKind::uniform:
                draws[i] = ss.uniform_sym();
                break;
        }
    }

    MomentConditionReport rep{dist, c, 0.0, 0.0, 0.0};
    for (double gamma : gammas) {
        double s1 = 0.0, s2 = 0.0;
        for (double x : draws) {
            double e = std::exp(gamma * x);
            s1 += e;
            s2 += e * e;
        }
        double mean = s1 / static_cast<double>(samples);
        double var = s2 / static_cast<double>(samples) - mean * mean;
        double se = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
        double bound = std::exp(c * gamma * gamma);
        double ratio = mean / bound;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_gamma = gamma;
            rep.std_error_at_worst = se / bound;
        }
    }
    return rep;
}

KhintchineReport khintchine_check(const SpectralField& c, double p,
                                  std::size_t samples, DistributionKind dist,
                                  std::uint64_t base_seed) {
    if (p < 2.0) throw ConfigError("khintchine_check: p must be >= 2");
    if (samples == 0) throw ConfigError("khintchine_check: need samples");
    double linf = 0.0;
    for (const cplx& v : c.coef) linf = std::max(linf, std::abs(v));
    if (!c.hermitian || hermitian_defect(c) > 1e-12 * linf)
        throw AsymmetryError("khintchine_check: coefficients not Hermitian");

    struct Site {
        std::array<int, kMaxDim> n;
        cplx coef;
        bool zero_mode;
    };
    std::vector<Site> support;
    double l2sq = 0.0;
    for (LatticeIter it(c.grid); !it.done(); it.next()) {
        cplx v = c.coef[it.flat()];
        l2sq += std::norm(v);
        if (v == cplx{0.0, 0.0}) continue;
        bool zero = is_zero_mode(it.modes(), c.grid.dim);
        if (zero || in_index_set(it.modes(), c.grid.dim))
            support.push_back({it.modes(), v, zero});
    }
    double l2 = std::sqrt(l2sq);
    if (l2 == 0.0) throw ConfigError("khintchine_check: zero coefficient sequence");

    double sum_p = 0.0, sum_2 = 0.0, sum_4 = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        SeedSpec seed{base_seed, i};
        double s = 0.0;
        for (const Site& site : support) {
            cplx g = noise_at(seed, dist, site.n, c.grid.dim, 0);
            if (site.zero_mode)
                s += g.real() * site.coef.real();
            else
                s += 2.0 * (g * site.coef).real();  // g_n c_n + conj pair
        }
        sum_p += std::pow(std::abs(s), p);
        double s2 = s * s;
        sum_2 += s2;
        sum_4 += s2 * s2;
    }
    double m = static_cast<double>(samples);
    KhintchineReport rep;
    rep.p = p;
    rep.l2 = l2;
    rep.empirical_lp = std::pow(sum_p / m, 1.0 / p);
    rep.ratio = rep.empirical_lp / (std::sqrt(p) * l2);
    rep.second_moment = sum_2 / m;
    double var = sum_4 / m - rep.second_moment * rep.second_moment;
    rep.second_moment_se = std::sqrt(std::max(var, 0.0) / m);
    return rep;
}

namespace {

double bump(double s) {
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

// Smoothstep with chi(s) + chi(1-s) = 1; 0 at s <= 0, 1 at s >= 1.
double chi(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    double a = bump(s), b = bump(1.0 - s);
    return a / (a + b);
}

} // namespace

double eta1(double t) {
    double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    return chi(2.0 - a);
}

double eta_value(const std::array<double, kMaxDim>& x, int dim, double T) {
    double bracket = 1.0 + T;
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= eta1(x[a] / bracket);
    return v;
}

SpectralField cutoff_embed(const SpectralField& f, double T, int m_ext,
                           std::vector<double>* samples_out) {
    if (f.grid.multiplier != 1)
        throw ConfigError("cutoff_embed: input must live on the base torus");
    if (T < 1.0) throw ConfigError("cutoff_embed: T must be >= 1");

    GridSpec ext{f.grid.dim, f.grid.modes * m_ext, m_ext};
    ext.validate();
    double bracket = 1.0 + T;
    if (ext.period() < 4.0 * bracket + 2.0)
        throw ExtensionTooSmall("cutoff_embed: need 2*pi*m >= 4(1+T) + 2, have period " +
                                std::to_string(ext.period()));

    std::vector<double> base = synthesize(f);
    const int d = f.grid.dim;
    const int nb = f.grid.modes;
    const int ne = ext.modes;

    // Per-axis cutoff values; the extension keeps the base grid spacing, so
    // periodized samples are plain tilings of the base samples.
    std::vector<double> eta_ax(static_cast<std::size_t>(ne));
    for (int j = 0; j < ne; ++j) eta_ax[static_cast<std::size_t>(j)] = eta1(ext.coord_centered(j) / bracket);

    std::vector<double> prod(ext.total_points());
    std::array<int, kMaxDim> idx{};
    for (std::size_t flat = 0; flat < prod.size(); ++flat) {
        double eta = 1.0;
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) {
            eta *= eta_ax[static_cast<std::size_t>(idx[a])];
            src = src * static_cast<std::size_t>(nb) +
                  static_cast<std::size_t>(idx[a] % nb);
        }
        prod[flat] = eta == 0.0 ? 0.0 : eta * base[src];
        for (int a = d - 1; a >= 0; --a) {
            if (++idx[a] < ne) break;
            idx[a] = 0;
        }
    }
    if (samples_out) *samples_out = prod;
    return analyze(ext, prod);
}

} // namespace stochnlw
