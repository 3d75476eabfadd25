#include "stochnlw/experiments.hpp"

#include "stochnlw/errors.hpp"
#include "stochnlw/propagators.hpp"
#include "stochnlw/rng.hpp"
#include "stochnlw/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace stochnlw {

namespace {

constexpr std::uint64_t kReferencePhaseSeed = 0x9D2C5680ull;

long checked_steps(double T, double dt, const char* where) {
    if (!(dt > 0.0)) throw ConfigError(std::string(where) + ": dt must be positive");
    double x = T / dt;
    long n = std::lround(x);
    if (n < 1 || std::abs(x - static_cast<double>(n)) > 1e-9 * (1.0 + std::abs(x)))
        throw ConfigError(std::string(where) + ": T must be a positive multiple of dt");
    return n;
}

} // namespace

WavePair reference_pair(const GridSpec& g, double s, double amplitude) {
    g.validate();
    WavePair out(g);
    if (amplitude == 0.0) return out;
    double ppos = s + (g.dim + 1) / 2.0 + 0.01;
    double pvel = ppos - 1.0;
    for (LatticeIter it(g); !it.done(); it.next()) {
        if (it.on_nyquist()) continue;
        const auto& n = it.modes();
        bool origin = true;
        for (int a = 0; a < g.dim; ++a)
            if (n[a] != 0) { origin = false; break; }
        if (!origin && !in_index_set(n, g.dim)) continue;
        std::uint64_t key = mode_stream_key(n, g.dim);
        double bracket = 1.0 + std::sqrt(it.freq_sq());
        for (int slot = 0; slot < 2; ++slot) {
            double decay = std::pow(bracket, slot == 0 ? -ppos : -pvel);
            SpectralField& fld = slot == 0 ? out.position : out.velocity;
            if (origin) {
                fld.coef[it.flat()] = decay;
                continue;
            }
            double phase = 2.0 * std::numbers::pi *
                           SubStream(kReferencePhaseSeed, 0, key,
                                     static_cast<std::uint64_t>(slot))
                               .next_unit();
            cplx v = decay * cplx{std::cos(phase), std::sin(phase)};
            fld.coef[it.flat()] = v;
            fld.coef[reflect_flat(g, n)] = std::conj(v);
        }
    }
    double norm = pair_norm(out, s);
    out *= amplitude / norm;
    return out;
}

void FspConfig::validate() const {
    base.validate();
    if (base.multiplier != 1)
        throw ConfigError("fsp: base grid must have multiplier 1");
    if (extension < 1 || extension % 2 == 0)
        throw ConfigError("fsp: extension must be odd and >= 1");
    if (T < 1.0) throw ConfigError("fsp: T must be >= 1");
    if (!(horizon > 0.0) || horizon > T)
        throw ConfigError("fsp: need 0 < horizon <= T");
    if (margin_cells < 0) throw ConfigError("fsp: margin_cells must be >= 0");
    if (compare_stride < 1) throw ConfigError("fsp: compare_stride must be >= 1");
    long n = checked_steps(horizon, dt, "fsp");
    if (n % compare_stride != 0)
        throw ConfigError("fsp: step count must be a multiple of compare_stride");
    GridSpec ext{base.dim, base.modes * extension, extension};
    ext.validate();
    if (ext.period() < 4.0 * (1.0 + T) + 2.0 + 2.0 * horizon)
        throw ExtensionTooSmall(
            "fsp: cutoff support plus light cone needs period >= " +
            std::to_string(4.0 * (1.0 + T) + 2.0 + 2.0 * horizon) + ", have " +
            std::to_string(ext.period()));
}

namespace {

// Sup of |u_ext - u_base| over the product box |x_a| <= radius of extended
// grid points; extended points at the same spacing land exactly on base
// points mod the base period, so no interpolation enters.
void fsp_compare(const GridSpec& ext, int nb, double radius,
                 const std::vector<double>& se, const std::vector<double>& sb,
                 double& sup, std::size_t& npts) {
    sup = 0.0;
    npts = 0;
    if (radius <= 0.0) return;
    std::vector<int> in_ax;
    for (int j = 0; j < ext.modes; ++j)
        if (std::abs(ext.coord_centered(j)) <= radius) in_ax.push_back(j);
    if (in_ax.empty()) return;

    int d = ext.dim;
    std::array<std::size_t, kMaxDim> c{};
    for (;;) {
        std::size_t fe = 0, fb = 0;
        for (int a = 0; a < d; ++a) {
            int j = in_ax[c[a]];
            fe = fe * static_cast<std::size_t>(ext.modes) + static_cast<std::size_t>(j);
            fb = fb * static_cast<std::size_t>(nb) + static_cast<std::size_t>(j % nb);
        }
        sup = std::max(sup, std::abs(se[fe] - sb[fb]));
        ++npts;
        int a = d - 1;
        while (a >= 0 && ++c[a] == in_ax.size()) c[a--] = 0;
        if (a < 0) break;
    }
}

} // namespace

FspReport fsp_experiment(const FspConfig& cfg, const WavePair& data,
                         const SeedSpec& seed, DistributionKind dist) {
    cfg.validate();
    require_same_grid(data.grid(), cfg.base, "fsp_experiment");
    WavePair w = randomize_pair(data, seed, dist);

    GridSpec ext{cfg.base.dim, cfg.base.modes * cfg.extension, cfg.extension};
    WavePair emb(ext);
    emb.position = cutoff_embed(w.position, cfg.T, cfg.extension);
    emb.velocity = cutoff_embed(w.velocity, cfg.T, cfg.extension);

    long n = std::lround(cfg.horizon / cfg.dt);
    long stride = cfg.compare_stride;
    double dx = cfg.base.spacing();

    FspReport rep;
    auto compare_at = [&](double t, const WavePair& ub, const WavePair& ue) {
        double radius = (1.0 + cfg.T) - t -
                        (cfg.margin_cells + std::ceil(t / dx - 1e-12)) * dx;
        std::vector<double> sb = synthesize(ub.position);
        std::vector<double> se = synthesize(ue.position);
        double sup = 0.0;
        std::size_t npts = 0;
        fsp_compare(ext, cfg.base.modes, radius, se, sb, sup, npts);
        rep.times.push_back(t);
        rep.discrepancy.push_back(sup);
        rep.region_points.push_back(npts);
        rep.worst = std::max(rep.worst, sup);
    };

    if (!cfg.nonlinear) {
        for (long k = 0; k <= n; k += stride) {
            double t = cfg.dt * static_cast<double>(k);
            compare_at(t, s_per(t, w), s_per(t, emb));
        }
        return rep;
    }

    SolverConfig sc;
    sc.dt = cfg.dt;
    sc.dealias = cfg.dealias ? *cfg.dealias
                             : default_dealias(cfg.base.dim, cfg.base.modes);
    sc.record_ledger = false;
    NlwIntegrator base_run(w, sc);
    NlwIntegrator ext_run(emb, sc);
    compare_at(0.0, base_run.state(), ext_run.state());
    for (long k = 1; k <= n; ++k) {
        base_run.advance();
        ext_run.advance();
        if (k % stride == 0)
            compare_at(base_run.time(), base_run.state(), ext_run.state());
    }
    return rep;
}

ConvergenceTable truncation_convergence(const WavePair& data, const SeedSpec& seed,
                                        DistributionKind dist,
                                        const std::vector<int>& levels, double T,
                                        const SolverConfig& cfg) {
    cfg.validate();
    if (levels.empty()) throw ConfigError("truncation: need at least one level");
    for (std::size_t i = 0; i + 1 < levels.size(); ++i)
        if (levels[i] >= levels[i + 1])
            throw ConfigError("truncation: levels must be strictly increasing");
    long n = checked_steps(T, cfg.dt, "truncation");

    WavePair w = randomize_pair(data, seed, dist);
    int d = w.grid().dim;
    double q = strichartz_q(d), r = strichartz_r(d);

    SolverConfig sc = cfg;
    sc.record_ledger = false;
    NlwIntegrator ref(w, sc);
    std::vector<NlwIntegrator> runs;
    runs.reserve(levels.size());
    for (int N : levels)
        runs.emplace_back(lp_project(w, N, ProjMode::leq), sc);

    std::size_t L = levels.size();
    std::vector<double> h1_max(L, 0.0), qacc(L, 0.0), prev_sq(L, 0.0);
    auto sample = [&](long k) {
        for (std::size_t l = 0; l < L; ++l) {
            WavePair diff = ref.state() - runs[l].state();
            h1_max[l] = std::max(h1_max[l], pair_norm(diff, 1.0));
            double sq = std::pow(lebesgue_norm(diff.position, r), q);
            if (k > 0) qacc[l] += 0.5 * cfg.dt * (prev_sq[l] + sq);
            prev_sq[l] = sq;
        }
    };
    sample(0);
    for (long k = 1; k <= n; ++k) {
        ref.advance();
        for (auto& run : runs) run.advance();
        sample(k);
    }

    ConvergenceTable table;
    table.levels = levels;
    for (std::size_t l = 0; l < L; ++l) {
        table.h1_err.push_back(h1_max[l]);
        table.strichartz_err.push_back(std::pow(qacc[l], 1.0 / q));
    }
    return table;
}

UniquenessReport uniqueness_check(const LinearFlow& z, double T,
                                  const SolverConfig& cfg, double K, double cap,
                                  double perturbation_amplitude) {
    cfg.validate();
    const GridSpec& g = z.grid();
    int d = g.dim;
    long n = checked_steps(T, cfg.dt, "uniqueness");
    double r = strichartz_r(d);

    Trajectory zn;
    zn.role = Trajectory::Role::norm_samples;
    zn.dt = cfg.dt;
    zn.sampled_r = r;
    {
        WavePair st = z.initial;
        DriftOp drift(g, cfg.dt);
        for (long j = 0; j <= n; ++j) {
            if (j > 0) drift.apply(st);
            zn.samples.push_back(lebesgue_norm(st.position, r));
        }
    }
    PartitionResult part = partition_by_strichartz(zn, d, K, T, cap);

    SpectralField pert =
        reference_pair(g, 1.0, perturbation_amplitude).position;
    const SpectralField* pert_ptr =
        perturbation_amplitude > 0.0 ? &pert : nullptr;

    UniquenessReport rep;
    rep.all_converged = true;
    rep.contraction_ok = true;
    WavePair v_init(g);
    for (std::size_t j = 0; j + 1 < part.breakpoints.size(); ++j) {
        double a = part.breakpoints[j], b = part.breakpoints[j + 1];
        PicardResult run_a = picard_local(z, a, b, v_init, cfg);
        PicardResult run_b = picard_local(z, a, b, v_init, cfg, pert_ptr);
        IntervalCheck chk;
        chk.t_lo = a;
        chk.t_hi = b;
        chk.budget = part.budget[j];
        chk.contraction = std::max(run_a.contraction, run_b.contraction);
        chk.limit_distance = pair_norm(run_a.endpoint - run_b.endpoint, 1.0);
        chk.iterations_a = run_a.iterations;
        chk.iterations_b = run_b.iterations;
        rep.intervals.push_back(chk);
        rep.worst_contraction = std::max(rep.worst_contraction, chk.contraction);
        rep.worst_limit_distance =
            std::max(rep.worst_limit_distance, chk.limit_distance);
        if (!run_a.converged || !run_b.converged) rep.all_converged = false;
        if (chk.contraction > 0.5) rep.contraction_ok = false;
        v_init = run_a.endpoint;
    }
    return rep;
}

NormEquivalenceCase norm_equivalence_case(const SpectralField& f, double s,
                                          double T, int m_ext) {
    NormEquivalenceCase out;
    out.s = s;
    out.T = T;
    std::vector<double> prod;
    SpectralField emb = cutoff_embed(f, T, m_ext, &prod);
    double denom =
        std::pow(1.0 + T, f.grid.dim * 0.5) * sobolev_norm(f, s);
    out.ratio = denom > 0.0 ? sobolev_norm(emb, s) / denom : 0.0;

    const GridSpec& ext = emb.grid;
    double bracket = 1.0 + T;
    std::vector<char> flat_ax(static_cast<std::size_t>(ext.modes));
    for (int j = 0; j < ext.modes; ++j)
        flat_ax[static_cast<std::size_t>(j)] =
            eta1(ext.coord_centered(j) / bracket) == 1.0;

    // One pass, two folds: the plateau fold adds a subsequence of the same
    // nonnegative terms in the same order, so acc_plateau <= acc_all exactly
    // in floating point (adding a nonnegative term never decreases a
    // round-to-nearest sum).
    double acc_all = 0.0, acc_plateau = 0.0;
    std::array<int, kMaxDim> idx{};
    for (std::size_t flat = 0; flat < prod.size(); ++flat) {
        double t = prod[flat] * prod[flat];
        acc_all += t;
        bool plateau = true;
        for (int a = 0; a < ext.dim; ++a)
            if (!flat_ax[static_cast<std::size_t>(idx[a])]) { plateau = false; break; }
        if (plateau) acc_plateau += t;
        for (int a = ext.dim - 1; a >= 0; --a) {
            if (++idx[a] < ext.modes) break;
            idx[a] = 0;
        }
    }
    double wq = std::pow(ext.spacing(), ext.dim);
    out.lhs_l2 = std::sqrt(wq * acc_plateau);
    out.rhs_l2 = std::sqrt(wq * acc_all);
    return out;
}

double modulation_window(double xi) {
    // chi(1 - |xi|) written through the plateau profile: supported in
    // (-1, 1), equal to 1 at 0, and psi(xi) + psi(1 - xi) == 1 on [0, 1].
    return eta1(1.0 + std::abs(xi));
}

double modulation_norm(const SpectralField& g, double s) {
    const GridSpec& gr = g.grid;
    double vol = std::pow(gr.period(), gr.dim);

    // Scatter each lattice frequency's mass over the 3^d candidate unit
    // windows (at most 2^d see it, the support is open); the ordered map
    // fixes the summation order.
    std::map<std::uint64_t, double> mass;
    std::array<int, kMaxDim> cand{};
    for (LatticeIter it(gr); !it.done(); it.next()) {
        double a2 = std::norm(g.coef[it.flat()]);
        if (a2 == 0.0) continue;
        std::array<double, kMaxDim> kap{};
        std::array<int, kMaxDim> lo{}, hi{};
        for (int a = 0; a < gr.dim; ++a) {
            kap[a] = static_cast<double>(it.modes()[a]) / gr.multiplier;
            lo[a] = static_cast<int>(std::ceil(kap[a] - 1.0));
            hi[a] = static_cast<int>(std::floor(kap[a] + 1.0));
            cand[a] = lo[a];
        }
        for (;;) {
            double w = 1.0;
            for (int a = 0; a < gr.dim; ++a) {
                w *= modulation_window(kap[a] - cand[a]);
                if (w == 0.0) break;
            }
            if (w != 0.0)
                mass[mode_stream_key(cand, gr.dim)] += w * w * a2;
            int a = gr.dim - 1;
            while (a >= 0) {
                if (++cand[a] <= hi[a]) break;
                cand[a] = lo[a];
                --a;
            }
            if (a < 0) break;
        }
    }

    double total = 0.0;
    for (const auto& [key, m] : mass) {
        double nn = 0.0;
        for (int a = 0; a < gr.dim; ++a) {
            int na = static_cast<int>((key >> (12 * a)) & 0xFFFull) - 2048;
            nn += static_cast<double>(na) * static_cast<double>(na);
        }
        total += std::pow(1.0 + std::sqrt(nn), s) * std::sqrt(vol * m);
    }
    return total;
}

} // namespace stochnlw
