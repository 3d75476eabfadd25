// Command line front end. Every subcommand writes byte-identical artifacts
// for a given configuration regardless of worker count or wall-clock: CSV
// columns are printed with %.17g, the JSON summary echoes the resolved
// configuration together with a SHA-256 content hash, and timing goes to
// stdout only, never into an artifact.
//
// Exit codes: 0 success, 2 configuration or validation failure, 3 a verified
// property did not hold on this run.

#include "CLI11.hpp"
#include "json.hpp"

#include "stochnlw/experiments.hpp"
#include "stochnlw/montecarlo.hpp"
#include "stochnlw/transform.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

using nlohmann::json;
using namespace stochnlw;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

// Resolved configuration as sorted key = value text; hashed into the summary
// so any two runs with equal hashes are replays of the same experiment.
std::string canonical_config(const std::map<std::string, std::string>& echo) {
    std::string out;
    for (const auto& [k, v] : echo) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

class Report {
  public:
    Report(std::string command, std::string out_dir)
        : command_(std::move(command)), dir_(std::move(out_dir)) {}

    void set(const std::string& key, const std::string& v) { echo_[key] = v; }
    void set(const std::string& key, double v) { echo_[key] = fmt(v); }
    void set(const std::string& key, int v) { echo_[key] = std::to_string(v); }
    void set(const std::string& key, std::uint64_t v) { echo_[key] = std::to_string(v); }
    void set(const std::string& key, bool v) { echo_[key] = v ? "true" : "false"; }

    void add_file(const std::string& name, std::string bytes) {
        files_.emplace_back(name, std::move(bytes));
    }

    json& results() { return results_; }

    // Writes all artifacts plus summary.json; returns the chosen exit code.
    int finish(int code) const {
        std::filesystem::create_directories(dir_);
        json summary;
        summary["command"] = command_;
        summary["exit_code"] = code;
        for (const auto& [k, v] : echo_) summary["config"][k] = v;
        summary["content_hash"] = sha256_hex(canonical_config(echo_));
        summary["results"] = results_;
        for (const auto& [name, bytes] : files_) {
            write_file(name, bytes);
            summary["outputs"][name] = sha256_hex(bytes);
        }
        write_file("summary.json", summary.dump(2) + "\n");
        return code;
    }

  private:
    void write_file(const std::string& name, const std::string& bytes) const {
        std::filesystem::path p = std::filesystem::path(dir_) / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + p.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    }

    std::string command_;
    std::string dir_;
    std::map<std::string, std::string> echo_;
    std::vector<std::pair<std::string, std::string>> files_;
    json results_;
};

struct CommonOpts {
    int d = 3;
    int N = 16;
    int m = 1;
    double s = 1.0;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
    std::string dist = "gaussian";
    std::string out_dir = ".";
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_workers = true) {
    cmd->add_option("--d", o.d, "spatial dimension (3, 4 or 5)")
        ->required()
        ->check(CLI::Range(3, 5));
    cmd->add_option("--N", o.N, "modes per axis");
    cmd->add_option("--m", o.m, "torus period multiplier");
    cmd->add_option("--s", o.s, "data regularity exponent");
    cmd->add_option("--amplitude", o.amplitude, "data pair norm in H^s x H^{s-1}");
    cmd->add_option("--seed", o.seed, "base seed of the noise substreams");
    cmd->add_option("--dist", o.dist, "noise law: gaussian, bernoulli or uniform");
    cmd->add_option("--out-dir", o.out_dir, "artifact directory");
    if (with_workers)
        cmd->add_option("--workers", o.workers,
                        "worker threads (0: use STOCHNLW_WORKERS, else 1)");
}

void echo_common(Report& rep, const CommonOpts& o) {
    rep.set("d", o.d);
    rep.set("N", o.N);
    rep.set("m", o.m);
    rep.set("s", o.s);
    rep.set("amplitude", o.amplitude);
    rep.set("seed", o.seed);
    rep.set("dist", o.dist);
}

GridSpec make_grid(const CommonOpts& o) {
    GridSpec g{o.d, o.N, o.m};
    g.validate();
    return g;
}

std::optional<Dealias> parse_dealias(const std::string& name) {
    if (name.empty() || name == "auto") return std::nullopt;
    return dealias_from_name(name);
}

// ---------------------------------------------------------------- tail ----

struct TailOpts {
    CommonOpts common;
    std::string propagator = "s_per";
    double q = 3.0;
    double r = 6.0;
    double t0 = 0.0;
    double t1 = 1.0;
    double sample_dt = 0.02;
    std::size_t M = 10000;
    double r2_min = 0.9;
};

int run_tail(const TailOpts& o) {
    Report rep("tail", o.common.out_dir);
    echo_common(rep, o.common);
    rep.set("propagator", o.propagator);
    rep.set("q", o.q);
    rep.set("r", o.r);
    rep.set("t0", o.t0);
    rep.set("t1", o.t1);
    rep.set("sample_dt", o.sample_dt);
    rep.set("M", static_cast<std::uint64_t>(o.M));
    rep.set("r2_min", o.r2_min);

    TailNormSpec spec;
    spec.propagator = tail_propagator_from_name(o.propagator);
    spec.q = o.q;
    spec.r = o.r;
    spec.t0 = o.t0;
    spec.t1 = o.t1;
    spec.dt = o.sample_dt;
    spec.validate();

    GridSpec g = make_grid(o.common);
    WavePair data = reference_pair(g, o.common.s, o.common.amplitude);
    DistributionKind dist = distribution_from_name(o.common.dist);
    int workers = resolve_worker_count(o.common.workers);

    TailCurve curve = estimate_tail(spec, data, dist, o.M, o.common.seed, workers);

    std::string csv = "lambda,p_hat,ci_lo,ci_hi\n";
    for (std::size_t j = 0; j < curve.lambda.size(); ++j)
        csv += fmt(curve.lambda[j]) + "," + fmt(curve.p_hat[j]) + "," +
               fmt(curve.ci_lo[j]) + "," + fmt(curve.ci_hi[j]) + "\n";
    rep.add_file("tail.csv", csv);

    SubGaussianFit fit = fit_subgaussian(curve);
    rep.results()["slope"] = fit.slope;
    rep.results()["intercept"] = fit.intercept;
    rep.results()["r_squared"] = fit.r_squared;
    rep.results()["window_points"] = fit.window_points;
    rep.results()["window_lo"] = fit.window_lo;
    rep.results()["window_hi"] = fit.window_hi;

    bool ok = fit.slope < 0.0 && fit.r_squared >= o.r2_min;
    rep.results()["subgaussian"] = ok;
    std::printf("tail: slope %.6g, R^2 %.6g over %zu points -> %s\n", fit.slope,
                fit.r_squared, fit.window_points, ok ? "sub-Gaussian" : "REJECTED");
    return rep.finish(ok ? 0 : 3);
}

// -------------------------------------------------------------- energy ----

struct EnergyOpts {
    CommonOpts common;
    double T = 1.0;
    double dt = 1e-2;
    std::size_t M = 200;
    std::string dealias = "auto";
    double cap = kInf;
};

int run_energy(const EnergyOpts& o) {
    Report rep("energy", o.common.out_dir);
    echo_common(rep, o.common);
    rep.set("T", o.T);
    rep.set("dt", o.dt);
    rep.set("M", static_cast<std::uint64_t>(o.M));
    rep.set("dealias", o.dealias);
    rep.set("cap", o.cap);

    GridSpec g = make_grid(o.common);
    WavePair data = reference_pair(g, o.common.s, o.common.amplitude);
    DistributionKind dist = distribution_from_name(o.common.dist);
    SolverConfig cfg;
    cfg.dt = o.dt;
    cfg.dealias = parse_dealias(o.dealias);
    cfg.validate();
    int workers = resolve_worker_count(o.common.workers);

    EnergyStatsReport stats =
        energy_statistics(data, dist, o.T, o.M, o.common.seed, cfg, workers, o.cap);

    std::string csv = "sample,sup_energy,bound,intervals,step_violations,failed\n";
    for (std::size_t i = 0; i < stats.samples.size(); ++i) {
        const EnergySample& s = stats.samples[i];
        csv += std::to_string(i) + "," + fmt(s.sup_energy) + "," + fmt(s.bound) + "," +
               std::to_string(s.intervals) + "," + std::to_string(s.step_violations) +
               "," + (s.failed ? "1" : "0") + "\n";
    }
    rep.add_file("energy_samples.csv", csv);

    rep.results()["bound_violations"] = stats.bound_violations;
    rep.results()["step_violations"] = stats.step_violations;
    rep.results()["failures"] = stats.failures;
    rep.results()["sup_energy_q25"] = stats.sup_energy_q25;
    rep.results()["sup_energy_med"] = stats.sup_energy_med;
    rep.results()["sup_energy_q75"] = stats.sup_energy_q75;
    rep.results()["sup_energy_max"] = stats.sup_energy_max;

    bool ok = stats.bound_violations == 0 && stats.step_violations == 0 &&
              stats.failures == 0;
    std::printf("energy: %zu samples, %zu bound violations, %zu step violations, "
                "%zu failures\n",
                stats.samples.size(), stats.bound_violations, stats.step_violations,
                stats.failures);
    return rep.finish(ok ? 0 : 3);
}

// --------------------------------------------------------------- solve ----

struct SolveOpts {
    CommonOpts common;
    double T = 1.0;
    double dt = 1e-2;
    std::string dealias = "auto";
    int stride = 1;
    bool randomize = false;
    bool perturbed = false;
    double drift_tol = 0.0;
};

int run_solve(const SolveOpts& o) {
    Report rep("solve", o.common.out_dir);
    echo_common(rep, o.common);
    rep.set("T", o.T);
    rep.set("dt", o.dt);
    rep.set("dealias", o.dealias);
    rep.set("stride", o.stride);
    rep.set("randomize", o.randomize);
    rep.set("perturbed", o.perturbed);
    rep.set("drift_tol", o.drift_tol);

    GridSpec g = make_grid(o.common);
    WavePair data = reference_pair(g, o.common.s, o.common.amplitude);
    DistributionKind dist = distribution_from_name(o.common.dist);
    if (o.randomize || o.perturbed)
        data = randomize_pair(data, SeedSpec{o.common.seed, 0}, dist);

    SolverConfig cfg;
    cfg.dt = o.dt;
    cfg.dealias = parse_dealias(o.dealias);
    cfg.sample_stride = o.stride;
    cfg.validate();

    SolveResult res = o.perturbed ? solve_perturbed(LinearFlow(data), o.T, cfg)
                                  : solve_full(data, o.T, cfg);

    std::string csv = "t,energy,h1_norm,rhs_bound\n";
    for (std::size_t k = 0; k < res.ledger.t.size(); ++k)
        csv += fmt(res.ledger.t[k]) + "," + fmt(res.ledger.energy[k]) + "," +
               fmt(res.ledger.h1[k]) + "," + fmt(res.ledger.rhs[k]) + "\n";
    rep.add_file("ledger.csv", csv);

    double e0 = res.ledger.energy.front();
    double drift = 0.0;
    for (double e : res.ledger.energy) drift = std::max(drift, std::abs(e - e0));
    double rel = e0 > 0.0 ? drift / e0 : drift;
    rep.results()["energy_initial"] = e0;
    rep.results()["energy_drift_rel"] = rel;
    rep.results()["h1_final"] = res.ledger.h1.back();

    bool ok = o.drift_tol <= 0.0 || rel <= o.drift_tol;
    std::printf("solve: %zu steps, relative energy drift %.3e\n",
                res.ledger.t.size() - 1, rel);
    return rep.finish(ok ? 0 : 3);
}

// ----------------------------------------------------------------- fsp ----

struct FspOpts {
    CommonOpts common;
    int extension = 3;
    double T = 1.0;
    double horizon = 1.0;
    int margin_cells = 2;
    double dt = 1e-2;
    int stride = 10;
    bool linear = false;
    std::string dealias = "auto";
    double tol = 0.0;
};

int run_fsp(const FspOpts& o) {
    Report rep("fsp", o.common.out_dir);
    echo_common(rep, o.common);
    rep.set("extension", o.extension);
    rep.set("T", o.T);
    rep.set("horizon", o.horizon);
    rep.set("margin_cells", o.margin_cells);
    rep.set("dt", o.dt);
    rep.set("stride", o.stride);
    rep.set("linear", o.linear);
    rep.set("dealias", o.dealias);
    rep.set("tol", o.tol);

    FspConfig cfg;
    cfg.base = GridSpec{o.common.d, o.common.N, 1};
    cfg.extension = o.extension;
    cfg.T = o.T;
    cfg.horizon = o.horizon;
    cfg.margin_cells = o.margin_cells;
    cfg.dt = o.dt;
    cfg.nonlinear = !o.linear;
    cfg.dealias = parse_dealias(o.dealias);
    cfg.compare_stride = o.stride;
    cfg.validate();

    WavePair data = reference_pair(cfg.base, o.common.s, o.common.amplitude);
    FspReport r = fsp_experiment(cfg, data, SeedSpec{o.common.seed, 0},
                                 distribution_from_name(o.common.dist));

    std::string csv = "t,discrepancy,region_points\n";
    for (std::size_t k = 0; k < r.times.size(); ++k)
        csv += fmt(r.times[k]) + "," + fmt(r.discrepancy[k]) + "," +
               std::to_string(r.region_points[k]) + "\n";
    rep.add_file("fsp.csv", csv);
    rep.results()["worst"] = r.worst;

    bool ok = o.tol <= 0.0 || r.worst <= o.tol;
    std::printf("fsp: worst in-cone discrepancy %.3e over %zu comparison times\n",
                r.worst, r.times.size());
    return rep.finish(ok ? 0 : 3);
}

// ------------------------------------------------------------- converge ----

struct ConvergeOpts {
    CommonOpts common;
    std::vector<int> levels{4, 8, 16};
    double T = 1.0;
    double dt = 1e-2;
    std::string dealias = "auto";
};

int run_converge(const ConvergeOpts& o) {
    Report rep("converge", o.common.out_dir);
    echo_common(rep, o.common);
    std::string lv;
    for (int N : o.levels) lv += (lv.empty() ? "" : " ") + std::to_string(N);
    rep.set("levels", lv);
    rep.set("T", o.T);
    rep.set("dt", o.dt);
    rep.set("dealias", o.dealias);

    GridSpec g = make_grid(o.common);
    WavePair data = reference_pair(g, o.common.s, o.common.amplitude);
    SolverConfig cfg;
    cfg.dt = o.dt;
    cfg.dealias = parse_dealias(o.dealias);
    cfg.record_ledger = false;
    cfg.validate();

    ConvergenceTable tab =
        truncation_convergence(data, SeedSpec{o.common.seed, 0},
                               distribution_from_name(o.common.dist), o.levels, o.T, cfg);

    std::string csv = "N,h1_err,strichartz_err\n";
    for (std::size_t i = 0; i < tab.levels.size(); ++i)
        csv += std::to_string(tab.levels[i]) + "," + fmt(tab.h1_err[i]) + "," +
               fmt(tab.strichartz_err[i]) + "\n";
    rep.add_file("convergence.csv", csv);

    bool ok = true;
    for (std::size_t i = 1; i < tab.h1_err.size(); ++i)
        if (tab.h1_err[i] > tab.h1_err[i - 1] * (1.0 + 1e-12) ||
            tab.strichartz_err[i] > tab.strichartz_err[i - 1] * (1.0 + 1e-12))
            ok = false;
    rep.results()["monotone"] = ok;
    rep.results()["h1_err_final"] = tab.h1_err.back();
    std::printf("converge: %zu levels, final H^1 error %.3e (%s)\n", tab.levels.size(),
                tab.h1_err.back(), ok ? "nonincreasing" : "NOT MONOTONE");
    return rep.finish(ok ? 0 : 3);
}

// --------------------------------------------------------------- unique ----

struct UniqueOpts {
    CommonOpts common;
    double T = 0.5;
    double dt = 1e-2;
    double K = 1.0;
    double cap = kInf;
    double perturb = 1e-3;
    double limit_tol = 1e-6;
    std::string dealias = "auto";
};

int run_unique(const UniqueOpts& o) {
    Report rep("unique", o.common.out_dir);
    echo_common(rep, o.common);
    rep.set("T", o.T);
    rep.set("dt", o.dt);
    rep.set("K", o.K);
    rep.set("cap", o.cap);
    rep.set("perturb", o.perturb);
    rep.set("limit_tol", o.limit_tol);
    rep.set("dealias", o.dealias);

    GridSpec g = make_grid(o.common);
    WavePair data =
        randomize_pair(reference_pair(g, o.common.s, o.common.amplitude),
                       SeedSpec{o.common.seed, 0}, distribution_from_name(o.common.dist));
    SolverConfig cfg;
    cfg.dt = o.dt;
    cfg.dealias = parse_dealias(o.dealias);
    cfg.validate();

    UniquenessReport r = uniqueness_check(LinearFlow(data), o.T, cfg, o.K, o.cap, o.perturb);

    std::string csv = "t_lo,t_hi,budget,contraction,limit_distance\n";
    for (const IntervalCheck& iv : r.intervals)
        csv += fmt(iv.t_lo) + "," + fmt(iv.t_hi) + "," + fmt(iv.budget) + "," +
               fmt(iv.contraction) + "," + fmt(iv.limit_distance) + "\n";
    rep.add_file("unique.csv", csv);

    rep.results()["intervals"] = r.intervals.size();
    rep.results()["worst_contraction"] = r.worst_contraction;
    rep.results()["worst_limit_distance"] = r.worst_limit_distance;
    rep.results()["all_converged"] = r.all_converged;
    rep.results()["contraction_ok"] = r.contraction_ok;

    bool ok = r.all_converged && r.contraction_ok && r.worst_limit_distance <= o.limit_tol;
    std::printf("unique: %zu intervals, worst contraction %.3g, limit split %.3e\n",
                r.intervals.size(), r.worst_contraction, r.worst_limit_distance);
    return rep.finish(ok ? 0 : 3);
}

// ------------------------------------------------------------ normcheck ----

struct NormCheckOpts {
    CommonOpts common;
    std::vector<double> s_values{0.0, 0.5, 0.9};
    std::vector<double> T_values{1.0, 2.0, 4.0};
    int fields = 20;
    double band = 10.0;
};

int smallest_extension(double T) {
    int m = 1;
    while (2.0 * std::numbers::pi * m < 4.0 * (1.0 + T) + 2.0) m += 2;
    return m;
}

int run_normcheck(const NormCheckOpts& o) {
    Report rep("normcheck", o.common.out_dir);
    echo_common(rep, o.common);
    std::string sv, tv;
    for (double s : o.s_values) sv += (sv.empty() ? "" : " ") + fmt(s);
    for (double t : o.T_values) tv += (tv.empty() ? "" : " ") + fmt(t);
    rep.set("s_values", sv);
    rep.set("T_values", tv);
    rep.set("fields", o.fields);
    rep.set("band", o.band);

    GridSpec g = make_grid(o.common);
    DistributionKind dist = distribution_from_name(o.common.dist);

    std::string csv = "s,T,sample,ratio,lhs_l2,rhs_l2\n";
    bool in_band = true, quadrature_ok = true;
    double worst_lo = kInf, worst_hi = 0.0;
    for (double s : o.s_values)
        for (double T : o.T_values) {
            int m_ext = smallest_extension(T);
            WavePair base = reference_pair(g, s, o.common.amplitude);
            for (int i = 0; i < o.fields; ++i) {
                WavePair w = randomize_pair(
                    base, SeedSpec{o.common.seed, static_cast<std::uint64_t>(i)}, dist);
                NormEquivalenceCase c = norm_equivalence_case(w.position, s, T, m_ext);
                csv += fmt(s) + "," + fmt(T) + "," + std::to_string(i) + "," +
                       fmt(c.ratio) + "," + fmt(c.lhs_l2) + "," + fmt(c.rhs_l2) + "\n";
                worst_lo = std::min(worst_lo, c.ratio);
                worst_hi = std::max(worst_hi, c.ratio);
                if (c.ratio < 1.0 / o.band || c.ratio > o.band) in_band = false;
                if (c.lhs_l2 > c.rhs_l2) quadrature_ok = false;
            }
        }
    rep.add_file("normcheck.csv", csv);

    rep.results()["ratio_min"] = worst_lo;
    rep.results()["ratio_max"] = worst_hi;
    rep.results()["in_band"] = in_band;
    rep.results()["plateau_below_cell"] = quadrature_ok;
    std::printf("normcheck: ratios in [%.4g, %.4g], band [%g, %g]\n", worst_lo, worst_hi,
                1.0 / o.band, o.band);
    return rep.finish(in_band && quadrature_ok ? 0 : 3);
}

// ----------------------------------------------------------- khintchine ----

struct KhintchineOpts {
    CommonOpts common;
    std::vector<double> p_values{2.0, 4.0, 6.0};
    std::size_t M = 10000;
};

int run_khintchine(const KhintchineOpts& o) {
    Report rep("khintchine", o.common.out_dir);
    echo_common(rep, o.common);
    std::string pv;
    for (double p : o.p_values) pv += (pv.empty() ? "" : " ") + fmt(p);
    rep.set("p_values", pv);
    rep.set("M", static_cast<std::uint64_t>(o.M));

    GridSpec g = make_grid(o.common);
    SpectralField c = reference_pair(g, o.common.s, o.common.amplitude).position;
    std::vector<std::string> dists =
        o.common.dist == "all"
            ? std::vector<std::string>{"gaussian", "bernoulli", "uniform"}
            : std::vector<std::string>{o.common.dist};

    bool ok = true;
    for (const std::string& dn : dists) {
        DistributionKind dist = distribution_from_name(dn);
        for (double p : o.p_values) {
            KhintchineReport r = khintchine_check(c, p, o.M, dist, o.common.seed);
            json cell;
            cell["l2"] = r.l2;
            cell["empirical_lp"] = r.empirical_lp;
            cell["ratio"] = r.ratio;
            cell["second_moment"] = r.second_moment;
            cell["second_moment_se"] = r.second_moment_se;
            bool cell_ok;
            if (p == 2.0) {
                cell_ok = std::abs(r.second_moment - r.l2 * r.l2) <=
                          3.0 * r.second_moment_se;
            } else {
                cell_ok = r.ratio <= 1.02;  // sqrt(p) bound plus MC headroom
            }
            cell["ok"] = cell_ok;
            ok = ok && cell_ok;
            rep.results()[dn]["p" + fmt(p)] = cell;
            std::printf("khintchine %s p=%g: ratio %.4g, E S^2 = %.6g (l2^2 %.6g) %s\n",
                        dn.c_str(), p, r.ratio, r.second_moment, r.l2 * r.l2,
                        cell_ok ? "ok" : "VIOLATED");
        }
    }
    return rep.finish(ok ? 0 : 3);
}

// ----------------------------------------------------------- momentcheck ----

struct MomentOpts {
    CommonOpts common;
    std::vector<double> gammas{0.25, 0.5, 1.0, 2.0};
    std::size_t M = 20000;
};

int run_momentcheck(const MomentOpts& o) {
    Report rep("momentcheck", o.common.out_dir);
    rep.set("seed", o.common.seed);
    rep.set("dist", o.common.dist);
    std::string gv;
    for (double gmm : o.gammas) gv += (gv.empty() ? "" : " ") + fmt(gmm);
    rep.set("gammas", gv);
    rep.set("M", static_cast<std::uint64_t>(o.M));

    std::vector<std::string> dists =
        o.common.dist == "all"
            ? std::vector<std::string>{"gaussian", "bernoulli", "uniform"}
            : std::vector<std::string>{o.common.dist};

    bool ok = true;
    for (const std::string& dn : dists) {
        MomentConditionReport r = moment_condition_check(
            distribution_from_name(dn), o.gammas, o.M, o.common.seed);
        bool cell_ok = r.worst_ratio <= 1.0 + 4.0 * r.std_error_at_worst + 1e-9;
        json cell;
        cell["c"] = r.c;
        cell["worst_ratio"] = r.worst_ratio;
        cell["worst_gamma"] = r.worst_gamma;
        cell["std_error"] = r.std_error_at_worst;
        cell["ok"] = cell_ok;
        rep.results()[dn] = cell;
        ok = ok && cell_ok;
        std::printf("momentcheck %s: worst MGF ratio %.6g at gamma %g %s\n", dn.c_str(),
                    r.worst_ratio, r.worst_gamma, cell_ok ? "ok" : "VIOLATED");
    }
    return rep.finish(ok ? 0 : 3);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral defocusing wave simulator and verification suite"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI key = value file");

    TailOpts tail;
    CLI::App* tail_cmd =
        app.add_subcommand("tail", "tail curve and sub-Gaussian fit of linear norms");
    add_common(tail_cmd, tail.common);
    tail_cmd->add_option("--propagator", tail.propagator, "s_per or s_tilde");
    tail_cmd->add_option("--q", tail.q, "time exponent");
    tail_cmd->add_option("--r", tail.r, "space exponent");
    tail_cmd->add_option("--t0", tail.t0, "window start");
    tail_cmd->add_option("--t1", tail.t1, "window end");
    tail_cmd->add_option("--sample-dt", tail.sample_dt, "time sampling step");
    tail_cmd->add_option("--M", tail.M, "Monte Carlo samples");
    tail_cmd->add_option("--r2-min", tail.r2_min, "minimum accepted fit R^2");

    EnergyOpts energy;
    CLI::App* energy_cmd =
        app.add_subcommand("energy", "perturbed-solve energy statistics and bounds");
    add_common(energy_cmd, energy.common);
    energy_cmd->add_option("--T", energy.T, "horizon");
    energy_cmd->add_option("--dt", energy.dt, "time step");
    energy_cmd->add_option("--M", energy.M, "Monte Carlo samples");
    energy_cmd->add_option("--dealias", energy.dealias,
                           "auto, two_thirds, zero_pad_3x or none");
    energy_cmd->add_option("--cap", energy.cap, "partition budget cap");

    SolveOpts solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "single solve with energy ledger");
    add_common(solve_cmd, solve.common, false);
    solve_cmd->add_option("--T", solve.T, "horizon");
    solve_cmd->add_option("--dt", solve.dt, "time step");
    solve_cmd->add_option("--dealias", solve.dealias,
                          "auto, two_thirds, zero_pad_3x or none");
    solve_cmd->add_option("--stride", solve.stride, "state sampling stride");
    solve_cmd->add_flag("--randomize", solve.randomize, "randomize the data first");
    solve_cmd->add_flag("--perturbed", solve.perturbed,
                        "solve the perturbed system around the randomized linear flow");
    solve_cmd->add_option("--drift-tol", solve.drift_tol,
                          "fail (exit 3) above this relative energy drift; 0 disables");

    FspOpts fsp;
    CLI::App* fsp_cmd =
        app.add_subcommand("fsp", "finite speed of propagation on an extended torus");
    add_common(fsp_cmd, fsp.common, false);
    fsp_cmd->add_option("--extension", fsp.extension, "extended period multiplier (odd)");
    fsp_cmd->add_option("--T", fsp.T, "cutoff scale");
    fsp_cmd->add_option("--horizon", fsp.horizon, "comparison horizon");
    fsp_cmd->add_option("--margin-cells", fsp.margin_cells, "extra cone margin in cells");
    fsp_cmd->add_option("--dt", fsp.dt, "time step");
    fsp_cmd->add_option("--stride", fsp.stride, "compare every this many steps");
    fsp_cmd->add_flag("--linear", fsp.linear, "exact linear propagator, no stepping");
    fsp_cmd->add_option("--dealias", fsp.dealias, "auto, two_thirds, zero_pad_3x or none");
    fsp_cmd->add_option("--tol", fsp.tol, "fail (exit 3) above this discrepancy; 0 disables");

    ConvergeOpts converge;
    CLI::App* converge_cmd =
        app.add_subcommand("converge", "frequency-truncation convergence table");
    add_common(converge_cmd, converge.common, false);
    converge_cmd->add_option("--levels", converge.levels, "dyadic truncation levels");
    converge_cmd->add_option("--T", converge.T, "horizon");
    converge_cmd->add_option("--dt", converge.dt, "time step");
    converge_cmd->add_option("--dealias", converge.dealias,
                             "auto, two_thirds, zero_pad_3x or none");

    UniqueOpts unique;
    CLI::App* unique_cmd =
        app.add_subcommand("unique", "uniqueness by iterated local contraction");
    add_common(unique_cmd, unique.common, false);
    unique_cmd->add_option("--T", unique.T, "horizon");
    unique_cmd->add_option("--dt", unique.dt, "Picard quadrature step");
    unique_cmd->add_option("--K", unique.K, "partition budget constant");
    unique_cmd->add_option("--cap", unique.cap, "partition budget cap");
    unique_cmd->add_option("--perturb", unique.perturb, "H^1 perturbation amplitude");
    unique_cmd->add_option("--limit-tol", unique.limit_tol,
                           "largest accepted distance between the two limits");
    unique_cmd->add_option("--dealias", unique.dealias,
                           "auto, two_thirds, zero_pad_3x or none");

    NormCheckOpts normcheck;
    CLI::App* normcheck_cmd =
        app.add_subcommand("normcheck", "cutoff norm-equivalence ratio table");
    add_common(normcheck_cmd, normcheck.common, false);
    normcheck_cmd->add_option("--s-values", normcheck.s_values, "regularity grid");
    normcheck_cmd->add_option("--T-values", normcheck.T_values, "cutoff scale grid");
    normcheck_cmd->add_option("--fields", normcheck.fields, "random fields per cell");
    normcheck_cmd->add_option("--band", normcheck.band, "accepted ratio band [1/band, band]");

    KhintchineOpts khintchine;
    CLI::App* khintchine_cmd =
        app.add_subcommand("khintchine", "Khintchine moment inequalities");
    add_common(khintchine_cmd, khintchine.common, false);
    khintchine_cmd->add_option("--p-values", khintchine.p_values, "moment exponents");
    khintchine_cmd->add_option("--M", khintchine.M, "Monte Carlo samples");

    MomentOpts moment;
    CLI::App* moment_cmd =
        app.add_subcommand("momentcheck", "exponential moment bounds of the noise laws");
    moment_cmd->add_option("--seed", moment.common.seed, "base seed");
    moment_cmd->add_option("--dist", moment.common.dist, "law, or all");
    moment_cmd->add_option("--out-dir", moment.common.out_dir, "artifact directory");
    moment_cmd->add_option("--gammas", moment.gammas, "MGF evaluation points");
    moment_cmd->add_option("--M", moment.M, "Monte Carlo samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    auto started = std::chrono::steady_clock::now();
    int code = 0;
    try {
        if (*tail_cmd) code = run_tail(tail);
        else if (*energy_cmd) code = run_energy(energy);
        else if (*solve_cmd) code = run_solve(solve);
        else if (*fsp_cmd) code = run_fsp(fsp);
        else if (*converge_cmd) code = run_converge(converge);
        else if (*unique_cmd) code = run_unique(unique);
        else if (*normcheck_cmd) code = run_normcheck(normcheck);
        else if (*khintchine_cmd) code = run_khintchine(khintchine);
        else if (*moment_cmd) code = run_momentcheck(moment);
    } catch (const BlowupGuard& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const NoContraction& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const InsufficientTail& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const DegenerateInterval& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                started)
                      .count();
    std::printf("wall clock: %.3f s\n", secs);  // stdout only, never an artifact
    return code;
}
