#pragma once

#include "stochnlw/randomization.hpp"
#include "stochnlw/solver.hpp"

#include <atomic>
#include <cstdint>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

// Monte Carlo machinery: tail curves of linear-evolution norms over noise
// samples, sub-Gaussian fits, and population statistics of the perturbed
// solve's energy bound. Everything here is deterministic given (seed, index):
// sample i draws from the substream (seed, i) no matter which thread claims
// it, and aggregation is by index, so reports are byte-identical for any
// worker count.

namespace stochnlw {

// Explicit positive flag wins, else the STOCHNLW_WORKERS environment
// variable, else 1.
int resolve_worker_count(int flag = 0);

// Run task(i), i = 0..M-1, on `workers` threads, results in index order.
// With `errors` given, a throwing sample leaves its message at its index
// (empty = clean) and the batch continues; without it the lowest-index
// failure is rethrown once all workers drain.
template <class Task>
auto run_parallel(std::size_t M, int workers, Task&& task,
                  std::vector<std::string>* errors = nullptr)
    -> std::vector<std::invoke_result_t<Task&, std::size_t>> {
    using R = std::invoke_result_t<Task&, std::size_t>;
    std::vector<R> results(M);
    if (errors) errors->assign(M, std::string());
    if (M == 0) return results;
    std::vector<std::exception_ptr> fatal(M);
    auto body = [&](std::atomic<std::size_t>& next) {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= M) return;
            try {
                results[i] = task(i);
            } catch (const std::exception& e) {
                if (errors) (*errors)[i] = e.what();
                else fatal[i] = std::current_exception();
            } catch (...) {
                if (errors) (*errors)[i] = "unrecognized failure";
                else fatal[i] = std::current_exception();
            }
        }
    };
    std::atomic<std::size_t> next{0};
    int w = workers < 1 ? 1 : workers;
    if (w == 1) {
        body(next);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(w));
        for (int t = 0; t < w; ++t) pool.emplace_back([&] { body(next); });
        for (auto& th : pool) th.join();
    }
    if (!errors)
        for (auto& ep : fatal)
            if (ep) std::rethrow_exception(ep);
    return results;
}

enum class TailPropagator { s_per, s_tilde };

const char* tail_propagator_name(TailPropagator p);
TailPropagator tail_propagator_from_name(const std::string& name);

// The scalar functional whose tail is estimated: the mixed L^q_t L^r_x norm
// of the chosen linear propagator of the randomized data, over [t0, t1]
// sampled at step dt (dense time sampling; q = inf takes the max).
struct TailNormSpec {
    TailPropagator propagator = TailPropagator::s_per;
    double q = 3.0;
    double r = 6.0;
    double t0 = 0.0;
    double t1 = 1.0;
    double dt = 0.02;

    void validate() const;  // throws ConfigError / IntervalError
};

// Empirical survival curve P(norm > lambda) over M independent samples.
// lambda[0] = 0 (sanity row, p_hat = 1 for nonzero data); the rest are 21
// points spanning the 50th through (1 - 10/M) * 100th sample percentiles,
// the statistically resolvable window.
struct TailCurve {
    std::vector<double> lambda;
    std::vector<double> p_hat;         // nonincreasing in lambda
    std::vector<double> ci_lo, ci_hi;  // two-sided 95% Clopper-Pearson
    std::size_t M = 0;
    std::vector<double> sample_norms;  // raw per-sample values, index order
};

// Exact two-sided binomial interval; preferred over the normal approximation
// because tail bins hold few counts.
struct BinomialInterval {
    double lo = 0.0;
    double hi = 1.0;
};
BinomialInterval clopper_pearson(std::size_t k, std::size_t M, double alpha = 0.05);

// The norm of one sample, evaluated without storing the trajectory. Exposed
// so scaling/homogeneity properties can be probed sample by sample.
double tail_sample_norm(const TailNormSpec& spec, const WavePair& data,
                        DistributionKind dist, std::uint64_t seed, std::size_t index);

TailCurve estimate_tail(const TailNormSpec& spec, const WavePair& data,
                        DistributionKind dist, std::size_t M, std::uint64_t seed,
                        int workers = 1);

// Weighted least squares of log p_hat against lambda^2 over the window
// 10/M <= p_hat <= 1/2, weights M p / (1 - p) (inverse delta-method variance
// of log p_hat). A sub-Gaussian tail shows up as slope < 0 with R^2 near 1.
struct SubGaussianFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::size_t window_points = 0;
    double window_lo = 0.0;  // lambda range actually used
    double window_hi = 0.0;
};
SubGaussianFit fit_subgaussian(const TailCurve& curve);  // throws InsufficientTail

// Per-sample record of the perturbed solve v_tt - Lap v + F(v + z) = 0
// against the closed energy bound (d = 4; other dimensions report raw
// statistics with the bound fields zeroed).
struct EnergySample {
    double sup_energy = 0.0;        // sup_t E(v)
    double bound = 0.0;             // closed bound on sup_t sqrt(E)
    std::size_t intervals = 0;      // Strichartz partition count for this z
    std::size_t step_violations = 0;
    double worst_step_margin = 0.0;
    bool bound_violated = false;
    bool failed = false;
    std::string error;
};

struct EnergyStatsReport {
    std::vector<EnergySample> samples;  // index order
    std::size_t bound_violations = 0;
    std::size_t step_violations = 0;
    std::size_t failures = 0;
    double sup_energy_q25 = 0.0;  // quantiles over clean samples
    double sup_energy_med = 0.0;
    double sup_energy_q75 = 0.0;
    double sup_energy_max = 0.0;
};

// M perturbed solves with noise substreams (seed, 0..M-1). Per sample the
// energy ledger yields sup_t E(v), the Gronwall-type bound evaluated from
// the same ledger's z norms, the per-step energy inequality check, and the
// Strichartz partition count with K = the sample's own data norm in
// L^2 x H^{-1} (so the count is scale-invariant). Solver failures are
// flagged per sample; the batch never aborts.
EnergyStatsReport energy_statistics(const WavePair& data, DistributionKind dist,
                                    double T, std::size_t M, std::uint64_t seed,
                                    const SolverConfig& cfg, int workers = 1,
                                    double partition_cap =
                                        std::numeric_limits<double>::infinity());

} // namespace stochnlw
