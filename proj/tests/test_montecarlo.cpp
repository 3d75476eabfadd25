#include "doctest.h"

#include "stochnlw/experiments.hpp"
#include "stochnlw/montecarlo.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <set>
#include <stdexcept>

using namespace stochnlw;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

WavePair single_cosine(const GridSpec& g) {
    WavePair p(g);
    std::array<int, kMaxDim> e1{};
    e1[0] = 1;
    std::array<int, kMaxDim> m1{};
    m1[0] = -1;
    p.position.at_modes(e1) = 1.0;
    p.position.at_modes(m1) = 1.0;
    return p;
}

TailCurve synthetic_curve(double lo, double hi, std::size_t M,
                          double (*survival)(double)) {
    TailCurve c;
    c.M = M;
    c.lambda.push_back(0.0);
    c.p_hat.push_back(1.0);
    for (int j = 0; j < 21; ++j) {
        double l = lo + (hi - lo) * j / 20.0;
        c.lambda.push_back(l);
        c.p_hat.push_back(survival(l));
    }
    c.ci_lo.assign(c.lambda.size(), 0.0);
    c.ci_hi.assign(c.lambda.size(), 1.0);
    return c;
}

} // namespace

TEST_CASE("worker count resolution order: flag, environment, one") {
    unsetenv("STOCHNLW_WORKERS");
    CHECK(resolve_worker_count() == 1);
    CHECK(resolve_worker_count(3) == 3);
    setenv("STOCHNLW_WORKERS", "5", 1);
    CHECK(resolve_worker_count() == 5);
    CHECK(resolve_worker_count(2) == 2);  // flag wins
    setenv("STOCHNLW_WORKERS", "0", 1);
    CHECK_THROWS_AS(resolve_worker_count(), ConfigError);
    setenv("STOCHNLW_WORKERS", "abc", 1);
    CHECK_THROWS_AS(resolve_worker_count(), ConfigError);
    setenv("STOCHNLW_WORKERS", "500", 1);
    CHECK_THROWS_AS(resolve_worker_count(), ConfigError);
    unsetenv("STOCHNLW_WORKERS");
}

TEST_CASE("run_parallel is deterministic in the worker count") {
    auto task = [](std::size_t i) { return static_cast<double>(i * i); };
    std::vector<double> serial = run_parallel(200, 1, task);
    std::vector<double> wide = run_parallel(200, 8, task);
    CHECK(serial == wide);
    CHECK(serial.size() == 200);
    CHECK(serial[13] == 169.0);
    CHECK(run_parallel(0, 4, task).empty());
}

TEST_CASE("run_parallel collects per-index errors or rethrows the lowest") {
    auto task = [](std::size_t i) -> int {
        if (i == 3 || i == 7) throw std::runtime_error("boom " + std::to_string(i));
        return static_cast<int>(i);
    };
    std::vector<std::string> errors;
    std::vector<int> out = run_parallel(10, 4, task, &errors);
    CHECK(errors[3] == "boom 3");
    CHECK(errors[7] == "boom 7");
    for (std::size_t i = 0; i < 10; ++i) {
        if (i == 3 || i == 7) continue;
        CHECK(errors[i].empty());
        CHECK(out[i] == static_cast<int>(i));
    }
    CHECK_THROWS_WITH(run_parallel(10, 4, task), "boom 3");
}

TEST_CASE("substreams do not collide across sample indices") {
    std::array<int, kMaxDim> e1{};
    e1[0] = 1;
    std::set<std::pair<double, double>> seen;
    for (std::size_t i = 0; i < 100000; ++i) {
        cplx g = noise_at({404, i}, DistributionKind::gaussian, e1, 3, 0);
        seen.insert({g.real(), g.imag()});
    }
    CHECK(seen.size() == 100000);
}

TEST_CASE("Clopper-Pearson intervals match reference values") {
    BinomialInterval i1 = clopper_pearson(5, 10);
    CHECK(i1.lo == doctest::Approx(0.18708602844739855).epsilon(1e-9));
    CHECK(i1.hi == doctest::Approx(0.8129139715526015).epsilon(1e-9));

    BinomialInterval i2 = clopper_pearson(1, 1000);
    CHECK(i2.lo == doctest::Approx(2.5317487491294045e-05).epsilon(1e-7));
    CHECK(i2.hi == doctest::Approx(0.005558924279826672).epsilon(1e-9));

    BinomialInterval i3 = clopper_pearson(0, 50);
    CHECK(i3.lo == 0.0);
    CHECK(i3.hi == doctest::Approx(0.07112173646419764).epsilon(1e-9));

    BinomialInterval i4 = clopper_pearson(50, 50);
    CHECK(i4.hi == 1.0);
    CHECK(i4.lo == doctest::Approx(1.0 - 0.07112173646419764).epsilon(1e-9));

    CHECK_THROWS_AS(clopper_pearson(11, 10), ConfigError);
    CHECK_THROWS_AS(clopper_pearson(0, 0), ConfigError);
}

TEST_CASE("the weighted fit nails an exact sub-Gaussian curve") {
    // p = exp(-2 lambda^2) across the resolvable window at M = 10^4.
    TailCurve c = synthetic_curve(std::sqrt(std::log(2.0) / 2.0),
                                  std::sqrt(std::log(1000.0) / 2.0), 10000,
                                  [](double l) { return std::exp(-2.0 * l * l); });
    SubGaussianFit fit = fit_subgaussian(c);
    CHECK(fit.slope == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(std::abs(fit.intercept) <= 1e-9);
    CHECK(fit.r_squared >= 1.0 - 1e-12);
    CHECK(fit.window_points == 21);
    CHECK(fit.window_lo > 0.0);
    CHECK(fit.window_hi > fit.window_lo);
}

TEST_CASE("the fit flags a polynomial tail by low R^2") {
    TailCurve c = synthetic_curve(std::sqrt(2.0) - 1.0, std::sqrt(1000.0) - 1.0, 10000,
                                  [](double l) { return std::pow(1.0 + l, -2.0); });
    SubGaussianFit fit = fit_subgaussian(c);
    CHECK(fit.window_points == 21);
    CHECK(fit.r_squared < 0.6);
}

TEST_CASE("the fit needs at least four resolvable points") {
    TailCurve c;
    c.M = 1000;
    c.lambda = {0.0, 1.0, 2.0, 3.0, 4.0};
    c.p_hat = {1.0, 0.9, 0.8, 0.3, 0.2};  // only two inside [10/M, 1/2]
    c.ci_lo.assign(5, 0.0);
    c.ci_hi.assign(5, 1.0);
    CHECK_THROWS_AS(fit_subgaussian(c), InsufficientTail);
}

TEST_CASE("tail norms of a single randomized cosine have a closed form") {
    GridSpec g{3, 8, 1};
    WavePair data = single_cosine(g);
    TailNormSpec spec;
    spec.propagator = TailPropagator::s_per;
    spec.q = kInf;
    spec.r = 2.0;
    spec.t0 = 0.0;
    spec.t1 = 1.0;
    spec.dt = 0.05;
    spec.validate();

    // u_0^omega = 2 Re(g e^{ix_1}) evolves to cos(t) times itself; the sup of
    // the L^2 norm over [0,1] sits at t = 0 and equals sqrt(2) vol^{1/2} |g|.
    double scale = std::sqrt(2.0) * std::pow(2.0 * kPi, 1.5);
    std::array<int, kMaxDim> e1{};
    e1[0] = 1;
    const std::uint64_t seed = 2024;
    for (std::size_t idx : {0ul, 5ul, 17ul}) {
        double want =
            scale * std::abs(noise_at({seed, idx}, DistributionKind::gaussian, e1, 3, 0));
        double got = tail_sample_norm(spec, data, DistributionKind::gaussian, seed, idx);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }

    // |g|^2 is Exp(1), so P(norm > lambda) = exp(-(lambda/scale)^2).
    TailCurve curve = estimate_tail(spec, data, DistributionKind::gaussian, 2000, seed);
    CHECK(curve.lambda[0] == 0.0);
    CHECK(curve.p_hat[0] == 1.0);
    CHECK(curve.lambda.size() == 22);
    for (std::size_t j = 1; j < curve.p_hat.size(); ++j)
        CHECK(curve.p_hat[j] <= curve.p_hat[j - 1]);

    std::size_t inside = 0;
    for (std::size_t j = 1; j < curve.lambda.size(); ++j) {
        double truth = std::exp(-std::pow(curve.lambda[j] / scale, 2.0));
        if (curve.ci_lo[j] <= truth && truth <= curve.ci_hi[j]) ++inside;
    }
    CHECK(inside >= 17);  // 95% intervals, 21 points

    SubGaussianFit fit = fit_subgaussian(curve);
    double true_slope = -1.0 / (scale * scale);
    CHECK(fit.slope < 0.0);
    CHECK(fit.slope == doctest::Approx(true_slope).epsilon(0.15));
    CHECK(fit.r_squared >= 0.95);
}

TEST_CASE("doubling the data doubles the tail curve exactly") {
    GridSpec g{3, 8, 1};
    WavePair data = reference_pair(g, 1.0, 1.0);
    WavePair doubled = data;
    doubled *= 2.0;
    const std::uint64_t seed = 99;
    const std::size_t M = 1500;

    for (TailNormSpec spec : {TailNormSpec{TailPropagator::s_per, kInf, 2.0, 0.0, 1.0, 0.1},
                              TailNormSpec{TailPropagator::s_per, 3.0, 6.0, 0.0, 1.0, 0.1},
                              TailNormSpec{TailPropagator::s_tilde, 5.0, 10.0, 0.0, 1.0, 0.1}}) {
        TailCurve base = estimate_tail(spec, data, DistributionKind::gaussian, M, seed);
        TailCurve twice = estimate_tail(spec, doubled, DistributionKind::gaussian, M, seed);
        double worst = 0.0;
        for (std::size_t i = 0; i < M; ++i)
            worst = std::max(worst,
                             std::abs(twice.sample_norms[i] - 2.0 * base.sample_norms[i]));
        CHECK(worst == 0.0);
        for (std::size_t j = 0; j < base.lambda.size(); ++j) {
            CHECK(twice.lambda[j] == 2.0 * base.lambda[j]);
            CHECK(twice.p_hat[j] == base.p_hat[j]);
            CHECK(twice.ci_lo[j] == base.ci_lo[j]);
            CHECK(twice.ci_hi[j] == base.ci_hi[j]);
        }
    }
}

TEST_CASE("tail estimation is deterministic in the worker count") {
    GridSpec g{3, 8, 1};
    WavePair data = reference_pair(g, 1.0, 1.0);
    TailNormSpec spec;
    spec.q = 3.0;
    spec.r = 6.0;
    spec.dt = 0.1;
    TailCurve a = estimate_tail(spec, data, DistributionKind::bernoulli, 1000, 7, 1);
    TailCurve b = estimate_tail(spec, data, DistributionKind::bernoulli, 1000, 7, 6);
    CHECK(a.sample_norms == b.sample_norms);
    CHECK(a.p_hat == b.p_hat);
    CHECK(a.lambda == b.lambda);
}

TEST_CASE("tail estimation rejects undersized batches and bad specs") {
    GridSpec g{3, 8, 1};
    WavePair data = single_cosine(g);
    TailNormSpec spec;
    CHECK_THROWS_AS(estimate_tail(spec, data, DistributionKind::gaussian, 500, 1),
                    ConfigError);
    TailNormSpec bad;
    bad.dt = 0.3;  // does not divide t1 - t0
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = TailNormSpec{};
    bad.t1 = 0.0;
    CHECK_THROWS_AS(bad.validate(), IntervalError);
    CHECK(tail_propagator_from_name("s_tilde") == TailPropagator::s_tilde);
    CHECK_THROWS_AS(tail_propagator_from_name("wave"), ConfigError);
}

TEST_CASE("energy statistics of zero data are identically zero") {
    GridSpec g{4, 8, 1};
    SolverConfig cfg;
    cfg.dt = 0.01;
    EnergyStatsReport rep =
        energy_statistics(WavePair(g), DistributionKind::gaussian, 0.05, 3, 11, cfg);
    CHECK(rep.samples.size() == 3);
    CHECK(rep.failures == 0);
    CHECK(rep.bound_violations == 0);
    CHECK(rep.step_violations == 0);
    for (const EnergySample& s : rep.samples) {
        CHECK(s.sup_energy == 0.0);
        CHECK(s.bound == 0.0);
        CHECK(!s.bound_violated);
        CHECK(s.intervals == 1);
    }
    CHECK(rep.sup_energy_max == 0.0);
}

TEST_CASE("energy statistics smoke run in d = 4") {
    GridSpec g{4, 8, 1};
    WavePair data = reference_pair(g, 1.0, 0.3);
    SolverConfig cfg;
    cfg.dt = 0.01;
    EnergyStatsReport rep =
        energy_statistics(data, DistributionKind::gaussian, 0.1, 4, 5, cfg);
    CHECK(rep.failures == 0);
    CHECK(rep.bound_violations == 0);
    CHECK(rep.step_violations == 0);
    for (const EnergySample& s : rep.samples) {
        CHECK(s.sup_energy > 0.0);
        CHECK(s.bound > 0.0);
        CHECK(s.intervals >= 1);
        CHECK(s.error.empty());
    }
    CHECK(rep.sup_energy_q25 <= rep.sup_energy_med);
    CHECK(rep.sup_energy_med <= rep.sup_energy_q75);
    CHECK(rep.sup_energy_q75 <= rep.sup_energy_max);

    EnergyStatsReport wide =
        energy_statistics(data, DistributionKind::gaussian, 0.1, 4, 5, cfg, 4);
    for (std::size_t i = 0; i < rep.samples.size(); ++i) {
        CHECK(wide.samples[i].sup_energy == rep.samples[i].sup_energy);
        CHECK(wide.samples[i].bound == rep.samples[i].bound);
    }
}

TEST_CASE("solver failures are recorded per sample, not thrown") {
    GridSpec g{4, 8, 1};
    WavePair data = reference_pair(g, 1.0, 0.3);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.blowup_ceiling = 1e-9;  // every sample trips the guard
    EnergyStatsReport rep =
        energy_statistics(data, DistributionKind::gaussian, 0.05, 3, 11, cfg);
    CHECK(rep.failures == 3);
    for (const EnergySample& s : rep.samples) {
        CHECK(s.failed);
        CHECK(!s.error.empty());
    }
}
