#include "stochnlw/montecarlo.hpp"

#include "stochnlw/errors.hpp"
#include "stochnlw/propagators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <boost/math/distributions/beta.hpp>

namespace stochnlw {

int resolve_worker_count(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("STOCHNLW_WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (env[0] == '\0' || end == nullptr || *end != '\0' || v < 1 || v > 256)
            throw ConfigError("STOCHNLW_WORKERS must be an integer in [1, 256]");
        return static_cast<int>(v);
    }
    return 1;
}

const char* tail_propagator_name(TailPropagator p) {
    return p == TailPropagator::s_per ? "s_per" : "s_tilde";
}

TailPropagator tail_propagator_from_name(const std::string& name) {
    if (name == "s_per") return TailPropagator::s_per;
    if (name == "s_tilde") return TailPropagator::s_tilde;
    throw ConfigError("unknown propagator '" + name + "'");
}

void TailNormSpec::validate() const {
    if (!(q >= 1.0)) throw ConfigError("tail norm: q must be >= 1");
    if (!(r >= 2.0)) throw ConfigError("tail norm: r must be >= 2");
    if (!(t1 > t0)) throw IntervalError("tail norm: need t1 > t0");
    if (!(dt > 0.0)) throw ConfigError("tail norm: dt must be positive");
    double x = (t1 - t0) / dt;
    long n = std::lround(x);
    if (n < 1 || std::abs(x - static_cast<double>(n)) > 1e-9 * (1.0 + std::abs(x)))
        throw ConfigError("tail norm: window must be a positive multiple of dt");
}

BinomialInterval clopper_pearson(std::size_t k, std::size_t M, double alpha) {
    if (M == 0 || k > M) throw ConfigError("clopper_pearson: need 0 <= k <= M, M >= 1");
    BinomialInterval out;
    double kk = static_cast<double>(k), mm = static_cast<double>(M);
    if (k == 0) {
        out.lo = 0.0;
    } else {
        boost::math::beta_distribution<double> lo_dist(kk, mm - kk + 1.0);
        out.lo = boost::math::quantile(lo_dist, alpha / 2.0);
    }
    if (k == M) {
        out.hi = 1.0;
    } else {
        boost::math::beta_distribution<double> hi_dist(kk + 1.0, mm - kk);
        out.hi = boost::math::quantile(hi_dist, 1.0 - alpha / 2.0);
    }
    return out;
}

namespace {

// Type-7 (linear interpolation) quantile of an ascending-sorted vector.
double quantile_sorted(const std::vector<double>& s, double p) {
    if (s.empty()) return 0.0;
    double h = p * static_cast<double>(s.size() - 1);
    if (h <= 0.0) return s.front();
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= s.size()) return s.back();
    return s[lo] + (h - static_cast<double>(lo)) * (s[lo + 1] - s[lo]);
}

} // namespace

double tail_sample_norm(const TailNormSpec& spec, const WavePair& data,
                        DistributionKind dist, std::uint64_t seed,
                        std::size_t index) {
    spec.validate();
    WavePair w = randomize_pair(data, SeedSpec{seed, index}, dist);
    const GridSpec& g = w.grid();
    long n = std::lround((spec.t1 - spec.t0) / spec.dt);

    std::vector<double> inv_bracket;
    if (spec.propagator == TailPropagator::s_tilde) {
        inv_bracket.resize(g.total_points());
        for (LatticeIter it(g); !it.done(); it.next())
            inv_bracket[it.flat()] = 1.0 / (1.0 + std::sqrt(it.freq_sq()));
    }

    WavePair state = spec.t0 == 0.0 ? std::move(w) : s_per(spec.t0, w);
    DriftOp drift(g, spec.dt);
    bool spectral_r2 = spec.r == 2.0;
    bool sup_in_time = std::isinf(spec.q);
    SpectralField tilde(g);
    std::vector<double> snorm;
    snorm.reserve(static_cast<std::size_t>(n) + 1);
    double mx = 0.0;
    for (long j = 0; j <= n; ++j) {
        if (j > 0) drift.apply(state);
        const SpectralField* f = &state.position;
        if (spec.propagator == TailPropagator::s_tilde) {
            // s_tilde(t) = <grad>^{-1} (velocity of s_per(t)): reuse the
            // drifted velocity instead of re-propagating from scratch.
            for (std::size_t i = 0; i < tilde.coef.size(); ++i)
                tilde.coef[i] = state.velocity.coef[i] * inv_bracket[i];
            tilde.hermitian = state.velocity.hermitian;
            f = &tilde;
        }
        double s = spectral_r2 ? sobolev_norm(*f, 0.0) : lebesgue_norm(*f, spec.r);
        mx = std::max(mx, s);
        if (!sup_in_time) snorm.push_back(s);
    }
    if (sup_in_time || mx == 0.0) return mx;
    // Trapezoid of (s/mx)^q, then scale back: keeps the sample norm exactly
    // 1-homogeneous in the data (pow does not commute with scaling by 2).
    double acc = 0.0, prev = 0.0;
    for (long j = 0; j <= n; ++j) {
        double sq = std::pow(snorm[static_cast<std::size_t>(j)] / mx, spec.q);
        if (j > 0) acc += 0.5 * spec.dt * (prev + sq);
        prev = sq;
    }
    return mx * std::pow(acc, 1.0 / spec.q);
}

TailCurve estimate_tail(const TailNormSpec& spec, const WavePair& data,
                        DistributionKind dist, std::size_t M, std::uint64_t seed,
                        int workers) {
    spec.validate();
    if (M < 1000) throw ConfigError("estimate_tail: need M >= 1000");
    TailCurve out;
    out.M = M;
    out.sample_norms = run_parallel(M, workers, [&](std::size_t i) {
        return tail_sample_norm(spec, data, dist, seed, i);
    });

    std::vector<double> sorted = out.sample_norms;
    std::sort(sorted.begin(), sorted.end());
    double lo = quantile_sorted(sorted, 0.5);
    double hi = quantile_sorted(sorted, 1.0 - 10.0 / static_cast<double>(M));

    constexpr int kGridPoints = 21;
    out.lambda.push_back(0.0);
    for (int j = 0; j < kGridPoints; ++j)
        out.lambda.push_back(lo + (hi - lo) * static_cast<double>(j) /
                                      (kGridPoints - 1.0));

    for (double l : out.lambda) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), l);
        std::size_t k = static_cast<std::size_t>(sorted.end() - it);
        out.p_hat.push_back(static_cast<double>(k) / static_cast<double>(M));
        BinomialInterval ci = clopper_pearson(k, M);
        out.ci_lo.push_back(ci.lo);
        out.ci_hi.push_back(ci.hi);
    }
    return out;
}

SubGaussianFit fit_subgaussian(const TailCurve& curve) {
    if (curve.M == 0) throw ConfigError("fit_subgaussian: empty curve");
    double pmin = 10.0 / static_cast<double>(curve.M);

    struct Pt {
        double x, y, w;
    };
    std::vector<Pt> pts;
    SubGaussianFit fit;
    fit.window_lo = std::numeric_limits<double>::infinity();
    fit.window_hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < curve.lambda.size(); ++i) {
        double p = curve.p_hat[i];
        if (p < pmin || p > 0.5) continue;
        double l = curve.lambda[i];
        pts.push_back({l * l, std::log(p),
                       static_cast<double>(curve.M) * p / (1.0 - p)});
        fit.window_lo = std::min(fit.window_lo, l);
        fit.window_hi = std::max(fit.window_hi, l);
    }
    if (pts.size() < 4)
        throw InsufficientTail("fit window holds " + std::to_string(pts.size()) +
                               " points, need >= 4");
    fit.window_points = pts.size();

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (const Pt& p : pts) {
        sw += p.w;
        swx += p.w * p.x;
        swy += p.w * p.y;
        swxx += p.w * p.x * p.x;
        swxy += p.w * p.x * p.y;
    }
    double det = swxx - swx * swx / sw;
    if (!(det > 0.0))
        throw InsufficientTail("fit window is degenerate (single abscissa)");
    fit.slope = (swxy - swx * swy / sw) / det;
    fit.intercept = (swy - fit.slope * swx) / sw;

    double ybar = swy / sw, ss_tot = 0, ss_res = 0;
    for (const Pt& p : pts) {
        double fitted = fit.intercept + fit.slope * p.x;
        ss_tot += p.w * (p.y - ybar) * (p.y - ybar);
        ss_res += p.w * (p.y - fitted) * (p.y - fitted);
    }
    fit.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

EnergyStatsReport energy_statistics(const WavePair& data, DistributionKind dist,
                                    double T, std::size_t M, std::uint64_t seed,
                                    const SolverConfig& cfg, int workers,
                                    double partition_cap) {
    cfg.validate();
    int dim = data.grid().dim;
    double x = T / cfg.dt;
    long n = std::lround(x);
    if (n < 1 || std::abs(x - static_cast<double>(n)) > 1e-9 * (1.0 + std::abs(x)))
        throw ConfigError("energy_statistics: T must be a positive multiple of dt");

    SolverConfig local = cfg;
    local.sample_stride = static_cast<int>(n);  // keep endpoints, not states
    local.record_ledger = true;

    auto task = [&](std::size_t i) -> EnergySample {
        EnergySample out;
        WavePair w = randomize_pair(data, SeedSpec{seed, i}, dist);
        LinearFlow z(std::move(w));
        SolveResult res = solve_perturbed(z, T, local);
        const EnergyLedger& led = res.ledger;
        for (double e : led.energy) out.sup_energy = std::max(out.sup_energy, e);
        if (dim == 4) {
            Trajectory z6, zinf;
            z6.role = zinf.role = Trajectory::Role::norm_samples;
            z6.dt = zinf.dt = cfg.dt;
            z6.samples = led.z_l6;
            z6.sampled_r = 6.0;
            zinf.samples = led.z_linf;
            zinf.sampled_r = std::numeric_limits<double>::infinity();
            out.bound = gronwall_bound(4, z6, zinf, T);
            out.bound_violated =
                std::sqrt(out.sup_energy) > out.bound * (1.0 + 1e-12);
            EnergyCheckReport chk = energy_inequality_check(led);
            out.step_violations = chk.violations;
            out.worst_step_margin = chk.worst_margin;
            // Zero data has K = 0; any budget covers it, so use a unit one.
            double K = pair_norm(z.initial, 0.0);
            if (K <= 0.0) K = 1.0;
            out.intervals =
                partition_by_strichartz(z6, 4, K, T, partition_cap).intervals();
        }
        return out;
    };

    std::vector<std::string> errs;
    EnergyStatsReport rep;
    rep.samples = run_parallel(M, workers, task, &errs);
    std::vector<double> clean;
    for (std::size_t i = 0; i < M; ++i) {
        if (!errs[i].empty()) {
            rep.samples[i].failed = true;
            rep.samples[i].error = errs[i];
            ++rep.failures;
            continue;
        }
        clean.push_back(rep.samples[i].sup_energy);
        if (rep.samples[i].bound_violated) ++rep.bound_violations;
        rep.step_violations += rep.samples[i].step_violations;
    }
    std::sort(clean.begin(), clean.end());
    if (!clean.empty()) {
        rep.sup_energy_q25 = quantile_sorted(clean, 0.25);
        rep.sup_energy_med = quantile_sorted(clean, 0.5);
        rep.sup_energy_q75 = quantile_sorted(clean, 0.75);
        rep.sup_energy_max = clean.back();
    }
    return rep;
}

} // namespace stochnlw
