#include "doctest.h"

#include "stochnlw/experiments.hpp"
#include "stochnlw/norms.hpp"
#include "stochnlw/transform.hpp"

#include <cmath>
#include <numbers>

using namespace stochnlw;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_coef_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.coef[i] - b.coef[i]));
    return m;
}

} // namespace

TEST_CASE("reference pairs are normalized, Hermitian and reproducible") {
    for (int dim : {3, 4}) {
        GridSpec g{dim, 8, 1};
        WavePair p = reference_pair(g, 0.8, 2.5);
        CHECK(pair_norm(p, 0.8) == doctest::Approx(2.5).epsilon(1e-12));
        CHECK(hermitian_defect(p.position) == 0.0);
        CHECK(hermitian_defect(p.velocity) == 0.0);
        CHECK(sobolev_norm(p.velocity, 0.0) > 0.0);

        WavePair q = reference_pair(g, 0.8, 2.5);
        CHECK(max_coef_diff(p.position, q.position) == 0.0);
        CHECK(max_coef_diff(p.velocity, q.velocity) == 0.0);
    }
    WavePair zero = reference_pair(GridSpec{3, 8, 1}, 1.0, 0.0);
    CHECK(pair_norm(zero, 1.0) == 0.0);
}

TEST_CASE("finite-speed config validation") {
    FspConfig cfg;
    cfg.base = GridSpec{3, 16, 1};
    cfg.extension = 3;
    cfg.T = 1.0;
    cfg.horizon = 1.0;
    cfg.dt = 0.1;
    cfg.compare_stride = 5;
    CHECK_NOTHROW(cfg.validate());

    FspConfig small = cfg;
    small.extension = 1;  // 2 pi < 4(1+T) + 2 + 2h
    CHECK_THROWS_AS(small.validate(), ExtensionTooSmall);

    FspConfig even = cfg;
    even.extension = 4;
    CHECK_THROWS_AS(even.validate(), ConfigError);

    FspConfig multi = cfg;
    multi.base.multiplier = 3;
    CHECK_THROWS_AS(multi.validate(), ConfigError);

    FspConfig ragged = cfg;
    ragged.compare_stride = 3;  // 10 steps, stride must divide
    CHECK_THROWS_AS(ragged.validate(), ConfigError);

    FspConfig deep = cfg;
    deep.horizon = 2.0;  // beyond T
    CHECK_THROWS_AS(deep.validate(), ConfigError);
}

TEST_CASE("finite speed: zero data gives an exactly zero discrepancy") {
    FspConfig cfg;
    cfg.base = GridSpec{3, 16, 1};
    cfg.extension = 3;
    cfg.T = 1.0;
    cfg.horizon = 0.5;
    cfg.margin_cells = 1;  // keep the final comparison region nonempty
    cfg.dt = 0.05;
    cfg.compare_stride = 5;
    cfg.nonlinear = true;
    FspReport rep =
        fsp_experiment(cfg, WavePair(cfg.base), SeedSpec{3, 0}, DistributionKind::gaussian);
    CHECK(rep.times.size() == 3);
    CHECK(rep.worst == 0.0);
    for (double d : rep.discrepancy) CHECK(d == 0.0);
    for (std::size_t n : rep.region_points) CHECK(n > 0);
}

TEST_CASE("finite speed: the linear flow agrees inside the light cone") {
    FspConfig cfg;
    cfg.base = GridSpec{3, 16, 1};
    cfg.extension = 3;
    cfg.T = 1.0;
    cfg.horizon = 1.0;
    cfg.dt = 0.1;
    cfg.compare_stride = 2;
    cfg.nonlinear = false;
    WavePair data = reference_pair(cfg.base, 1.0, 0.5);
    FspReport rep = fsp_experiment(cfg, data, SeedSpec{21, 0}, DistributionKind::gaussian);
    CHECK(rep.times.front() == 0.0);
    CHECK(rep.times.back() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.worst <= 2e-3);
    CHECK(rep.worst > 0.0);
    // The comparison region shrinks with the cone.
    CHECK(rep.region_points.front() > rep.region_points.back());
}

TEST_CASE("finite speed: nonlinear evolution stays within discretization error") {
    FspConfig cfg;
    cfg.base = GridSpec{4, 8, 1};
    cfg.extension = 3;
    cfg.T = 1.0;
    cfg.horizon = 0.5;
    cfg.dt = 0.05;
    cfg.compare_stride = 5;
    cfg.nonlinear = true;
    WavePair data = reference_pair(cfg.base, 1.0, 0.2);
    FspReport rep = fsp_experiment(cfg, data, SeedSpec{22, 0}, DistributionKind::gaussian);
    CHECK(rep.worst <= 2e-3);
}

TEST_CASE("truncation convergence hits zero once the ball covers the grid") {
    GridSpec g{3, 8, 1};
    WavePair data = reference_pair(g, 1.0, 0.5);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.record_ledger = false;

    ConvergenceTable tab = truncation_convergence(data, SeedSpec{5, 0},
                                                  DistributionKind::gaussian,
                                                  {1, 2, 4, 8}, 0.1, cfg);
    REQUIRE(tab.levels.size() == 4);
    for (std::size_t i = 1; i < tab.h1_err.size(); ++i) {
        CHECK(tab.h1_err[i] <= tab.h1_err[i - 1] * (1.0 + 1e-12));
        CHECK(tab.strichartz_err[i] <= tab.strichartz_err[i - 1] * (1.0 + 1e-12));
    }
    // max physical frequency on this grid is sqrt(27) < 8, so the last level
    // reproduces the reference run bit for bit.
    CHECK(tab.h1_err.back() == 0.0);
    CHECK(tab.strichartz_err.back() == 0.0);
    CHECK(tab.h1_err.front() > 0.0);

    CHECK_THROWS_AS(truncation_convergence(data, SeedSpec{5, 0},
                                           DistributionKind::gaussian, {4, 2}, 0.1, cfg),
                    ConfigError);
    CHECK_THROWS_AS(truncation_convergence(data, SeedSpec{5, 0},
                                           DistributionKind::gaussian, {}, 0.1, cfg),
                    ConfigError);
}

TEST_CASE("uniqueness: the trivial solution is the unique limit for z = 0") {
    GridSpec g{3, 8, 1};
    LinearFlow z{WavePair(g)};
    SolverConfig cfg;
    cfg.dt = 0.05;
    UniquenessReport rep = uniqueness_check(z, 0.3, cfg, 1.0, kInf, 1e-3);
    CHECK(rep.intervals.size() == 1);
    CHECK(rep.all_converged);
    CHECK(rep.contraction_ok);
    CHECK(rep.worst_contraction <= 0.01);
    CHECK(rep.worst_limit_distance <= 1e-10);
    CHECK(rep.intervals[0].t_lo == 0.0);
    CHECK(rep.intervals[0].t_hi == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("uniqueness: both starts contract to one limit under a small z") {
    GridSpec g{3, 8, 1};
    WavePair data = randomize_pair(reference_pair(g, 1.0, 0.05), SeedSpec{8, 1},
                                   DistributionKind::gaussian);
    LinearFlow z{data};
    SolverConfig cfg;
    cfg.dt = 0.02;
    UniquenessReport rep = uniqueness_check(z, 0.2, cfg, 0.5, kInf, 1e-3);
    CHECK(rep.intervals.size() >= 1);
    CHECK(rep.all_converged);
    CHECK(rep.contraction_ok);
    CHECK(rep.worst_limit_distance <= 1e-7);
    for (const IntervalCheck& iv : rep.intervals) {
        CHECK(iv.budget > 0.0);
        CHECK(iv.iterations_a >= 1);
        CHECK(iv.iterations_b >= 1);
    }
}

TEST_CASE("cutoff norm equivalence: plateau quadrature never exceeds the cell") {
    GridSpec g{3, 8, 1};

    SpectralField one(g);
    std::array<int, kMaxDim> zero{};
    one.at_modes(zero) = 1.0;
    NormEquivalenceCase c0 = norm_equivalence_case(one, 0.0, 1.0, 3);
    CHECK(c0.lhs_l2 <= c0.rhs_l2);
    CHECK(c0.lhs_l2 > 0.0);
    CHECK(c0.ratio >= 0.1);
    CHECK(c0.ratio <= 10.0);

    WavePair p = reference_pair(g, 0.5, 1.0);
    for (double s : {0.0, 0.5}) {
        NormEquivalenceCase c = norm_equivalence_case(p.position, s, 1.0, 3);
        CHECK(c.lhs_l2 <= c.rhs_l2);
        CHECK(c.ratio >= 0.1);
        CHECK(c.ratio <= 10.0);
        CHECK(c.s == s);
        CHECK(c.T == 1.0);
    }

    // The ratio is scale invariant; the quadrature sides are linear.
    SpectralField doubled = p.position;
    doubled *= 2.0;
    NormEquivalenceCase a = norm_equivalence_case(p.position, 0.5, 1.0, 3);
    NormEquivalenceCase b = norm_equivalence_case(doubled, 0.5, 1.0, 3);
    CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-14));
    CHECK(b.lhs_l2 == doctest::Approx(2.0 * a.lhs_l2).epsilon(1e-14));
}

TEST_CASE("the modulation window tiles the line") {
    CHECK(modulation_window(0.0) == 1.0);
    CHECK(modulation_window(1.0) == 0.0);
    CHECK(modulation_window(-1.0) == 0.0);
    CHECK(modulation_window(2.7) == 0.0);
    for (double xi : {0.0, 0.3, 0.5, 1.7, -2.4, 11.03}) {
        double sum = 0.0;
        for (int n = static_cast<int>(std::floor(xi)) - 2;
             n <= static_cast<int>(std::ceil(xi)) + 2; ++n)
            sum += modulation_window(xi - n);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("the modulation norm sits between the L^2 cube bounds") {
    // Lower: the windows sum to one, so the triangle inequality gives the
    // plain L^2 norm. Upper: each frequency meets at most 2^d windows and
    // the square sums stay below l2^2, so Cauchy-Schwarz over the at most
    // 2^d * nnz windows caps the sum.
    for (GridSpec g : {GridSpec{3, 8, 1}, GridSpec{3, 8, 3}, GridSpec{4, 8, 1}}) {
        SpectralField f = reference_pair(g, 1.0, 1.0).position;
        double l2 = sobolev_norm(f, 0.0);
        double m0 = modulation_norm(f, 0.0);
        double nnz = 0.0;
        for (const cplx& v : f.coef)
            if (std::norm(v) != 0.0) nnz += 1.0;
        CHECK(m0 >= l2 * (1.0 - 1e-10));
        CHECK(m0 <= std::sqrt(std::pow(2.0, g.dim) * nnz) * l2 * (1.0 + 1e-10));
    }
}

TEST_CASE("a single integer frequency sees exactly one window") {
    GridSpec g{3, 8, 1};
    SpectralField f(g, false);  // a lone e^{3ix_1}, deliberately non-Hermitian
    std::array<int, kMaxDim> n{};
    n[0] = 3;
    f.at_modes(n) = 2.5;
    double l2 = sobolev_norm(f, 0.0);
    for (double s : {0.0, 0.5, 1.0})
        CHECK(modulation_norm(f, s) ==
              doctest::Approx(std::pow(4.0, s) * l2).epsilon(1e-12));

    // The Hermitian cosine splits over two windows of equal mass.
    SpectralField c(g);
    c.at_modes(n) = 1.0;
    std::array<int, kMaxDim> nm{};
    nm[0] = -3;
    c.at_modes(nm) = 1.0;
    double single = std::sqrt(std::pow(2.0 * std::numbers::pi, 3));
    CHECK(modulation_norm(c, 0.0) == doctest::Approx(2.0 * single).epsilon(1e-12));
}
