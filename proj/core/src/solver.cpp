#include "stochnlw/solver.hpp"

#include "stochnlw/errors.hpp"
#include "stochnlw/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stochnlw {

namespace {

// Additive slack coefficient for the per-step energy inequality check:
// allowed = slack_coeff * dt^2 * (1 + max E + max rhs). The centered
// difference of the splitting solution's energy tracks the true dE/dt to
// O(dt^2) with smooth constants, so a fixed coefficient suffices.
constexpr double kEnergySlackCoeff = 50.0;

long steps_for(double T, double dt, const char* where) {
    if (dt == 0.0) throw ConfigError(std::string(where) + ": dt must be nonzero");
    double x = T / dt;
    long n = std::lround(x);
    if (n < 1 || std::abs(x - static_cast<double>(n)) > 1e-9 * (1.0 + std::abs(x)))
        throw ConfigError(std::string(where) + ": T must be a positive multiple of dt");
    return n;
}

} // namespace

Dealias default_dealias(int dim, int modes) {
    switch (dim) {
        case 3: return modes <= 32 ? Dealias::zero_pad_3x : Dealias::two_thirds;
        case 4: return Dealias::two_thirds;
        case 5: return Dealias::none;
    }
    throw GridError("default_dealias: dimension must be 3, 4 or 5");
}

const char* dealias_name(Dealias d) {
    switch (d) {
        case Dealias::two_thirds: return "two_thirds";
        case Dealias::zero_pad_3x: return "zero_pad_3x";
        case Dealias::none: return "none";
    }
    return "?";
}

Dealias dealias_from_name(const std::string& name) {
    if (name == "two_thirds") return Dealias::two_thirds;
    if (name == "zero_pad_3x") return Dealias::zero_pad_3x;
    if (name == "none") return Dealias::none;
    throw ConfigError("unknown dealias policy '" + name + "'");
}

Dealias SolverConfig::dealias_for(const GridSpec& g) const {
    Dealias d = dealias ? *dealias : default_dealias(g.dim, g.modes);
    if (g.dim == 3 && d == Dealias::none)
        throw ConfigError("the quintic nonlinearity requires zero_pad_3x or two_thirds");
    return d;
}

void SolverConfig::validate() const {
    if (dt == 0.0) throw ConfigError("SolverConfig: dt must be nonzero");
    if (!(picard_tol > 0.0)) throw ConfigError("SolverConfig: picard_tol must be positive");
    if (picard_max_iter < 1) throw ConfigError("SolverConfig: picard_max_iter must be >= 1");
    if (!(blowup_ceiling > 0.0)) throw ConfigError("SolverConfig: blowup_ceiling must be positive");
    if (sample_stride < 1) throw ConfigError("SolverConfig: sample_stride must be >= 1");
}

namespace {

void require_energy_critical_dim(int dim) {
    if (dim < 3 || dim > 5)
        throw DimensionError("dimension must be 3, 4 or 5, got " +
                             std::to_string(dim));
}

} // namespace

double potential_coefficient(int dim) {
    require_energy_critical_dim(dim);
    return (dim - 2.0) / (2.0 * dim);
}

double potential_exponent(int dim) {
    require_energy_critical_dim(dim);
    return 2.0 * dim / (dim - 2.0);
}

namespace {

// Overwrite samples with F(u) pointwise; optionally report max |u| and the
// potential quadrature sum(coeff |u|^{2d/(d-2)}) * weight from the same pass.
void apply_force_pointwise(int dim, std::vector<double>& s, double weight,
                           KickInfo* info) {
    double mx = 0.0, pot = 0.0;
    switch (dim) {
        case 3:
            for (double& v : s) {
                double a = std::abs(v);
                if (a > mx) mx = a;
                double v2 = v * v, v4 = v2 * v2;
                pot += v4 * v2;
                v = v4 * v;
            }
            break;
        case 4:
            for (double& v : s) {
                double a = std::abs(v);
                if (a > mx) mx = a;
                double v2 = v * v;
                pot += v2 * v2;
                v = v2 * v;
            }
            break;
        case 5:
            for (double& v : s) {
                double a = std::abs(v);
                if (a > mx) mx = a;
                double p = std::pow(a, 4.0 / 3.0);
                pot += p * v * v;
                v = p * v;
            }
            break;
        default:
            throw GridError("nonlinearity: dimension must be 3, 4 or 5");
    }
    if (info) {
        info->max_abs = mx;
        info->potential = potential_coefficient(dim) * weight * pot;
    }
}

// Sharp per-axis mask |n_a| <= floor(N/3): products of two masked factors
// then alias only into the discarded band.
SpectralField mask_two_thirds(SpectralField f) {
    int cutoff = f.grid.modes / 3;
    for (LatticeIter it(f.grid); !it.done(); it.next()) {
        for (int a = 0; a < f.grid.dim; ++a) {
            int m = it.modes()[a];
            if (m > cutoff || m < -cutoff) {
                f.coef[it.flat()] = 0.0;
                break;
            }
        }
    }
    return f;
}

double quad_weight(const GridSpec& g, int pad) {
    return std::pow(g.spacing() / pad, g.dim);
}

} // namespace

SpectralField nonlinearity(const SpectralField& u, Dealias policy, KickInfo* info) {
    const GridSpec& g = u.grid;
    switch (policy) {
        case Dealias::zero_pad_3x: {
            auto s = synthesize_padded(u, 3);
            apply_force_pointwise(g.dim, s, quad_weight(g, 3), info);
            return analyze_truncated(g, s, 3);
        }
        case Dealias::two_thirds: {
            auto s = synthesize(mask_two_thirds(u));
            apply_force_pointwise(g.dim, s, quad_weight(g, 1), info);
            return mask_two_thirds(analyze(g, s));
        }
        case Dealias::none: {
            auto s = synthesize_padded(u, 2);
            apply_force_pointwise(g.dim, s, quad_weight(g, 2), info);
            return analyze_truncated(g, s, 2);
        }
    }
    throw ConfigError("nonlinearity: bad dealias policy");
}

namespace {

int potential_pad(int dim) {
    // Exact quadrature of the integer powers: u^6 needs 3x, u^4 needs 2x.
    // The d = 5 power is fractional; 2x is quadrature-limited by nature.
    return dim == 3 ? 3 : 2;
}

double kinetic_plus_gradient(const WavePair& p) {
    double vol = std::pow(p.grid().period(), p.grid().dim);
    double kin = 0.0, grad = 0.0;
    for (LatticeIter it(p.grid()); !it.done(); it.next()) {
        kin += std::norm(p.velocity.coef[it.flat()]);
        grad += it.freq_sq() * std::norm(p.position.coef[it.flat()]);
    }
    return 0.5 * vol * (kin + grad);
}

double potential_quadrature(const SpectralField& pos, double* l4_out = nullptr) {
    int dim = pos.grid.dim;
    int pad = potential_pad(dim);
    auto s = synthesize_padded(pos, pad);
    double w = quad_weight(pos.grid, pad);
    double pexp = potential_exponent(dim);
    double pot = 0.0, q4 = 0.0;
    if (dim == 5) {
        for (double v : s) {
            double v2 = v * v;
            pot += std::pow(std::abs(v), pexp);
            q4 += v2 * v2;
        }
    } else {
        for (double v : s) {
            double v2 = v * v, v4 = v2 * v2;
            pot += dim == 3 ? v4 * v2 : v4;
            q4 += v4;
        }
    }
    if (l4_out) *l4_out = std::pow(w * q4, 0.25);
    return potential_coefficient(dim) * w * pot;
}

} // namespace

double energy(const WavePair& pair) {
    return kinetic_plus_gradient(pair) + potential_quadrature(pair.position);
}

NlwIntegrator::NlwIntegrator(WavePair pair0, const SolverConfig& cfg)
    : cfg_(cfg),
      dealias_(cfg.dealias_for(pair0.grid())),
      drift_(pair0.grid(), cfg.dt),
      state_(std::move(pair0)) {
    cfg_.validate();
    recompute_force();
}

NlwIntegrator::NlwIntegrator(const LinearFlow& z, const SolverConfig& cfg)
    : cfg_(cfg),
      dealias_(cfg.dealias_for(z.grid())),
      drift_(z.grid(), cfg.dt),
      state_(z.grid()),
      z_(z.initial) {
    cfg_.validate();
    recompute_force();
}

void NlwIntegrator::recompute_force() {
    if (z_) {
        SpectralField arg = state_.position;
        add_scaled(arg, 1.0, z_->position);
        force_ = nonlinearity(arg, dealias_, &info_);
    } else {
        force_ = nonlinearity(state_.position, dealias_, &info_);
    }
}

void NlwIntegrator::advance() {
    double h = cfg_.dt;
    add_scaled(state_.velocity, -0.5 * h, force_);
    drift_.apply(state_);
    if (z_) drift_.apply(*z_);
    ++step_;
    recompute_force();
    add_scaled(state_.velocity, -0.5 * h, force_);
    if (info_.max_abs > cfg_.blowup_ceiling)
        throw BlowupGuard("sup norm " + std::to_string(info_.max_abs) +
                          " exceeded ceiling at t = " + std::to_string(time()));
}

void append_ledger_row(EnergyLedger& ledger, const NlwIntegrator& integ) {
    const WavePair& st = integ.state();
    int dim = st.grid().dim;

    double v4 = 0.0;
    double pot = potential_quadrature(st.position, &v4);
    double e = kinetic_plus_gradient(st) + pot;

    double z6 = 0.0, zinf = 0.0, rhs = 0.0;
    if (const WavePair* z = integ.z_state()) {
        auto s = synthesize_padded(z->position, 2);
        double w = quad_weight(z->grid(), 2);
        double acc6 = 0.0;
        for (double v : s) {
            double a = std::abs(v);
            if (a > zinf) zinf = a;
            double v2 = v * v;
            acc6 += v2 * v2 * v2;
        }
        z6 = std::pow(w * acc6, 1.0 / 6.0);
        if (dim == 4)
            rhs = std::sqrt(2.0 * e) *
                  (2.5 * z6 * z6 * z6 + 4.5 * zinf * v4 * v4);
    }

    ledger.t.push_back(integ.time());
    ledger.energy.push_back(e);
    ledger.h1.push_back(pair_norm(st, 1.0));
    ledger.z_l6.push_back(z6);
    ledger.z_linf.push_back(zinf);
    ledger.v_l4.push_back(v4);
    ledger.rhs.push_back(rhs);
}

namespace {

SolveResult run_integrator(NlwIntegrator& integ, double T, const SolverConfig& cfg) {
    long n = steps_for(T, cfg.dt, "solve");
    if (n % cfg.sample_stride != 0)
        throw ConfigError("solve: step count must be a multiple of sample_stride");
    SolveResult out;
    out.traj.role = Trajectory::Role::states;
    out.traj.t0 = 0.0;
    out.traj.dt = cfg.dt * cfg.sample_stride;
    out.ledger.dt = cfg.dt;
    auto record = [&](long k) {
        if (k % cfg.sample_stride == 0) out.traj.states.push_back(integ.state());
        if (cfg.record_ledger) append_ledger_row(out.ledger, integ);
    };
    record(0);
    for (long k = 1; k <= n; ++k) {
        integ.advance();
        record(k);
    }
    return out;
}

} // namespace

SolveResult solve_full(const WavePair& pair0, double T, const SolverConfig& cfg) {
    NlwIntegrator integ(pair0, cfg);
    return run_integrator(integ, T, cfg);
}

SolveResult solve_perturbed(const LinearFlow& z, double T, const SolverConfig& cfg) {
    NlwIntegrator integ(z, cfg);
    return run_integrator(integ, T, cfg);
}

double strichartz_q(int dim) {
    require_energy_critical_dim(dim);
    return (dim + 2.0) / (dim - 2.0);
}

double strichartz_r(int dim) {
    require_energy_critical_dim(dim);
    return 2.0 * (dim + 2.0) / (dim - 2.0);
}

double partition_theta(int dim) {
    require_energy_critical_dim(dim);
    return (dim - 2.0) / (2.0 * (dim + 2.0));
}

PartitionResult partition_by_strichartz(const Trajectory& z_norms, int dim,
                                        double K, double T, double cap) {
    if (z_norms.role != Trajectory::Role::norm_samples)
        throw ConfigError("partition: need per-step norm samples");
    if (z_norms.sampled_r != strichartz_r(dim))
        throw ConfigError("partition: norm samples taken at the wrong r");
    if (!(K > 0.0)) throw ConfigError("partition: K must be positive");
    if (z_norms.size() < 2) throw IntervalError("partition: need >= 2 samples");

    double dt = z_norms.dt;
    double x = (T - z_norms.t0) / dt;
    long n_end = std::lround(x);
    if (n_end < 1 || static_cast<std::size_t>(n_end) >= z_norms.size() ||
        std::abs(x - static_cast<double>(n_end)) > 1e-9 * (1.0 + std::abs(x)))
        throw IntervalError("partition: T is not on the sample grid");

    double q = strichartz_q(dim);
    PartitionResult res;
    res.theta = partition_theta(dim);
    res.K = K;
    res.cap = cap;
    res.breakpoints.push_back(z_norms.t0);

    auto sq = [&](long j) { return std::pow(z_norms.samples[static_cast<std::size_t>(j)], q); };

    long i = 0;
    while (i < n_end) {
        double acc = 0.0;
        long last_ok = i;
        double last_norm = 0.0, last_budget = 0.0;
        for (long j = i + 1; j <= n_end; ++j) {
            acc += 0.5 * dt * (sq(j - 1) + sq(j));
            double norm = std::pow(acc, 1.0 / q);
            double budget = std::min(K * std::pow(dt * (j - i), res.theta), cap);
            if (norm > budget) break;
            last_ok = j;
            last_norm = norm;
            last_budget = budget;
        }
        if (last_ok == i)
            throw DegenerateInterval("partition: budget fails on one step at t = " +
                                     std::to_string(z_norms.time(static_cast<std::size_t>(i + 1))));
        res.breakpoints.push_back(z_norms.time(static_cast<std::size_t>(last_ok)));
        res.measured.push_back(last_norm);
        res.budget.push_back(last_budget);
        i = last_ok;
    }
    return res;
}

// Constant chain for the d = 4 energy inequality. With F(u) = u^3 and
//   E(v) = int 1/2 v_t^2 + 1/2 |grad v|^2 + 1/4 v^4,
//   dE/dt = int v_t (v_tt - Lap v + v^3) = int v_t (v^3 - (v+z)^3)
//         = -int v_t (3 v^2 z + 3 v z^2 + z^3),
// so by Cauchy-Schwarz and ||v_t||_2 <= sqrt(2E):
//   |dE/dt| <= sqrt(2E) (3 ||v^2 z||_2 + 3 ||v z^2||_2 + ||z^3||_2).
// Now ||v^2 z||_2 <= ||z||_inf ||v||_4^2, ||z^3||_2 = ||z||_6^3, and
//   ||v z^2||_2 <= ||v||_4 ||z||_8^2 <= ||v||_4 ||z||_6^{3/2} ||z||_inf^{1/2}
//               <= (1/2)(||v||_4^2 ||z||_inf + ||z||_6^3),
// using L^8 interpolation between L^6 and L^inf and then Young. Hence
//   |dE/dt| <= sqrt(2E) ((5/2) ||z||_6^3 + (9/2) ||z||_inf ||v||_4^2).   (*)
// This (*) is the ledger's rhs column. For the closed bound, ||v||_4^2 <=
// sqrt(4E) = 2 sqrt(E), so y = sqrt(E) obeys
//   dy/dt <= (5 sqrt2/4) ||z(t)||_6^3 + (9 sqrt2/2) ||z(t)||_inf y,
// and integrating from y(0) = 0:
//   sup_t y <= (5 sqrt2/4) ||z||^3_{L^3_T L^6} exp((9 sqrt2/2) ||z||_{L^1_T L^inf}).
double gronwall_bound(int dim, const Trajectory& z_l6, const Trajectory& z_linf,
                      double T) {
    if (dim != 4) throw DimensionError("gronwall_bound: derived constants cover d = 4 only");
    auto check = [&](const Trajectory& tr, double r, const char* what) {
        if (tr.role != Trajectory::Role::norm_samples || tr.sampled_r != r)
            throw ConfigError(std::string("gronwall_bound: ") + what +
                              " must carry norm samples at the expected r");
    };
    check(z_l6, 6.0, "z_l6");
    check(z_linf, std::numeric_limits<double>::infinity(), "z_linf");
    if (z_l6.size() != z_linf.size() || z_l6.dt != z_linf.dt)
        throw IntervalError("gronwall_bound: sample grids differ");
    double x = (T - z_l6.t0) / z_l6.dt;
    long n = std::lround(x);
    if (n < 1 || static_cast<std::size_t>(n) >= z_l6.size() ||
        std::abs(x - static_cast<double>(n)) > 1e-9 * (1.0 + std::abs(x)))
        throw IntervalError("gronwall_bound: T is not on the sample grid");

    double i3 = 0.0, i1 = 0.0;
    for (long j = 1; j <= n; ++j) {
        double a = z_l6.samples[static_cast<std::size_t>(j - 1)];
        double b = z_l6.samples[static_cast<std::size_t>(j)];
        i3 += 0.5 * z_l6.dt * (a * a * a + b * b * b);
        i1 += 0.5 * z_l6.dt * (z_linf.samples[static_cast<std::size_t>(j - 1)] +
                               z_linf.samples[static_cast<std::size_t>(j)]);
    }
    double s2 = std::numbers::sqrt2;
    return 1.25 * s2 * i3 * std::exp(4.5 * s2 * i1);
}

EnergyCheckReport energy_inequality_check(const EnergyLedger& ledger) {
    EnergyCheckReport rep;
    std::size_t n = ledger.t.size();
    if (n < 3) return rep;
    double max_e = 0.0, max_rhs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        max_e = std::max(max_e, ledger.energy[k]);
        max_rhs = std::max(max_rhs, ledger.rhs[k]);
    }
    rep.slack = kEnergySlackCoeff * ledger.dt * ledger.dt * (1.0 + max_e + max_rhs);
    rep.steps = n - 2;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double lhs = std::abs(ledger.energy[k + 1] - ledger.energy[k - 1]) /
                     (2.0 * ledger.dt);
        double margin = lhs - ledger.rhs[k];
        rep.worst_margin = std::max(rep.worst_margin, margin);
        if (margin > rep.slack) ++rep.violations;
    }
    return rep;
}

PicardResult picard_local(const LinearFlow& z, double t_lo, double t_hi,
                          const WavePair& v_init, const SolverConfig& cfg,
                          const SpectralField* start) {
    cfg.validate();
    const GridSpec& g = z.grid();
    require_same_grid(g, v_init.grid(), "picard_local");
    if (!(t_hi > t_lo)) throw IntervalError("picard_local: empty interval");
    double dt = cfg.dt;
    long n = steps_for(t_hi - t_lo, dt, "picard_local");

    Dealias policy = cfg.dealias_for(g);
    double q = strichartz_q(g.dim);
    double r = strichartz_r(g.dim);
    std::size_t npts = g.total_points();
    std::size_t nt = static_cast<std::size_t>(n) + 1;

    // Linear part and frozen z positions at the local times tau_j = j dt.
    std::vector<WavePair> lin(nt, WavePair(g));
    std::vector<SpectralField> zpos(nt, SpectralField(g));
    for (std::size_t j = 0; j < nt; ++j) {
        lin[j] = s_per(dt * static_cast<double>(j), v_init);
        zpos[j] = z.at(t_lo + dt * static_cast<double>(j)).position;
    }

    // Per-site |kappa| and one-step rotation tables; the running (cs, sn)
    // pair tracks (cos(tau_j k), sin(tau_j k)) by exact angle addition.
    std::vector<double> kmag(npts), cd(npts), sd(npts);
    for (LatticeIter it(g); !it.done(); it.next()) {
        double k = std::sqrt(it.freq_sq());
        kmag[it.flat()] = k;
        cd[it.flat()] = std::cos(dt * k);
        sd[it.flat()] = std::sin(dt * k);
    }

    std::vector<SpectralField> cur(nt, SpectralField(g));
    for (std::size_t j = 0; j < nt; ++j) {
        cur[j] = lin[j].position;
        if (start) cur[j] += *start;
    }

    auto iterate_distance = [&](const std::vector<SpectralField>& a,
                                const std::vector<SpectralField>& b) {
        double acc = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            double s = lebesgue_norm(a[j] - b[j], r);
            double sq = std::pow(s, q);
            if (j > 0) acc += 0.5 * dt * (prev + sq);
            prev = sq;
        }
        return std::pow(acc, 1.0 / q);
    };
    auto curve_size = [&](const std::vector<SpectralField>& a) {
        double acc = 0.0, prev = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            double sq = std::pow(lebesgue_norm(a[j], r), q);
            if (j > 0) acc += 0.5 * dt * (prev + sq);
            prev = sq;
        }
        return std::pow(acc, 1.0 / q);
    };

    PicardResult res;
    res.endpoint = WavePair(g);
    std::vector<SpectralField> next(nt, SpectralField(g));
    std::vector<cplx> A(npts), B(npts);
    std::vector<double> cs(npts), sn(npts);

    for (int m = 1; m <= cfg.picard_max_iter; ++m) {
        std::fill(A.begin(), A.end(), cplx{0.0, 0.0});
        std::fill(B.begin(), B.end(), cplx{0.0, 0.0});
        std::fill(cs.begin(), cs.end(), 1.0);
        std::fill(sn.begin(), sn.end(), 0.0);
        SpectralField f_cur = nonlinearity(cur[0] + zpos[0], policy);
        SpectralField f_prev(g);
        next[0] = lin[0].position;

        for (std::size_t j = 1; j < nt; ++j) {
            f_prev = std::move(f_cur);
            f_cur = nonlinearity(cur[j] + zpos[j], policy);
            double tau = dt * static_cast<double>(j);
            double tau_prev = tau - dt;
            next[j] = lin[j].position;
            for (std::size_t i = 0; i < npts; ++i) {
                double cs_old = cs[i], sn_old = sn[i];
                double c_new = cs_old * cd[i] - sn_old * sd[i];
                double s_new = sn_old * cd[i] + cs_old * sd[i];
                cs[i] = c_new;
                sn[i] = s_new;
                double k = kmag[i];
                if (k == 0.0) {
                    // A accumulates int F0, B accumulates int tau' F0.
                    A[i] += 0.5 * dt * (f_prev.coef[i] + f_cur.coef[i]);
                    B[i] += 0.5 * dt * (tau_prev * f_prev.coef[i] + tau * f_cur.coef[i]);
                    next[j].coef[i] -= tau * A[i] - B[i];
                } else {
                    A[i] += 0.5 * dt * (cs_old * f_prev.coef[i] + c_new * f_cur.coef[i]);
                    B[i] += 0.5 * dt * (sn_old * f_prev.coef[i] + s_new * f_cur.coef[i]);
                    next[j].coef[i] -= (s_new * A[i] - c_new * B[i]) / k;
                }
            }
        }

        // Endpoint pair of this iterate: position from next[n], velocity is
        // the exact time derivative of linear part + Duhamel term.
        res.endpoint.position = next[nt - 1];
        res.endpoint.velocity = lin[nt - 1].velocity;
        for (std::size_t i = 0; i < npts; ++i) {
            if (kmag[i] == 0.0)
                res.endpoint.velocity.coef[i] -= A[i];
            else
                res.endpoint.velocity.coef[i] -= cs[i] * A[i] + sn[i] * B[i];
        }

        double dist = iterate_distance(next, cur);
        if (!std::isfinite(dist))
            throw NoContraction("picard_local: iterates diverged on [" +
                                std::to_string(t_lo) + ", " +
                                std::to_string(t_hi) + "]");
        double scale = std::max(1.0, curve_size(next));
        if (!res.iterate_distance.empty()) {
            double prev_dist = res.iterate_distance.back();
            if (prev_dist > 1e-13 * scale) {
                double factor = dist / prev_dist;
                res.contraction = std::max(res.contraction, factor);
                if (factor > 0.9)
                    throw NoContraction("picard_local: measured factor " +
                                        std::to_string(factor) + " on [" +
                                        std::to_string(t_lo) + ", " +
                                        std::to_string(t_hi) + "]");
            }
        }
        res.iterate_distance.push_back(dist);
        res.iterations = m;
        cur.swap(next);
        if (dist <= cfg.picard_tol * scale) {
            res.converged = true;
            break;
        }
    }
    return res;
}

} // namespace stochnlw
