#include "doctest.h"

#include "stochnlw/experiments.hpp"
#include "stochnlw/norms.hpp"
#include "stochnlw/projections.hpp"
#include "stochnlw/transform.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace stochnlw;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// 2 cos(n x_axis) as a spectral field: coefficient 1 at +-n e_axis.
SpectralField two_cos(const GridSpec& g, int axis, int n) {
    SpectralField f(g);
    std::array<int, kMaxDim> m{};
    m[axis] = n;
    f.at_modes(m) = 1.0;
    m[axis] = -n;
    f.at_modes(m) = 1.0;
    return f;
}

double max_coef_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.coef[i] - b.coef[i]));
    return m;
}

} // namespace

TEST_CASE("grid validation rejects bad shapes") {
    CHECK_THROWS_AS((GridSpec{2, 8, 1}.validate()), GridError);
    CHECK_THROWS_AS((GridSpec{6, 8, 1}.validate()), GridError);
    CHECK_THROWS_AS((GridSpec{3, 7, 1}.validate()), GridError);
    CHECK_THROWS_AS((GridSpec{3, 2, 1}.validate()), GridError);
    CHECK_THROWS_AS((GridSpec{3, 8, 2}.validate()), GridError);
    CHECK_THROWS_AS((GridSpec{3, 8, 0}.validate()), GridError);
    CHECK_THROWS_AS((GridSpec{5, 64, 1}.validate()), GridError);  // 2^30 points
    CHECK_NOTHROW((GridSpec{3, 128, 3}.validate()));
    CHECK_NOTHROW((GridSpec{5, 16, 1}.validate()));
}

TEST_CASE("mode indexing round-trips and the iterator walks every site") {
    GridSpec g{3, 8, 3};
    for (int k = 0; k < g.modes; ++k) {
        int n = g.mode_of_index(k);
        CHECK(n >= -4);
        CHECK(n < 4);
        CHECK(g.index_of_mode(n) == k);
        CHECK(g.freq_of_index(k) == doctest::Approx(n / 3.0).epsilon(1e-15));
    }

    std::size_t count = 0;
    for (LatticeIter it(g); !it.done(); it.next()) {
        CHECK(it.flat() == count);
        double fs = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            double f = it.modes()[a] / 3.0;
            fs += f * f;
        }
        CHECK(it.freq_sq() == doctest::Approx(fs).epsilon(1e-15));
        ++count;
    }
    CHECK(count == g.total_points());
}

TEST_CASE("reflection is an involution and maps e1 to -e1") {
    GridSpec g{4, 8, 1};
    for (LatticeIter it(g); !it.done(); it.next()) {
        std::array<int, kMaxDim> neg{};
        for (int a = 0; a < g.dim; ++a) {
            int n = -it.modes()[a];
            if (n < -g.modes / 2) n += g.modes;
            neg[a] = n;
        }
        CHECK(reflect_flat(g, neg) == it.flat());
    }
    std::array<int, kMaxDim> e1{};
    e1[0] = 1;
    std::array<int, kMaxDim> m1{};
    m1[0] = -1;
    SpectralField probe(g);
    probe.at_modes(m1) = 1.0;
    std::size_t want = 0;
    for (std::size_t i = 0; i < probe.size(); ++i)
        if (probe.coef[i] != cplx{0.0, 0.0}) want = i;
    CHECK(reflect_flat(g, e1) == want);
}

TEST_CASE("synthesize / analyze round-trip") {
    for (GridSpec g : {GridSpec{3, 8, 1}, GridSpec{3, 16, 3}, GridSpec{4, 8, 1},
                       GridSpec{5, 8, 1}}) {
        WavePair p = reference_pair(g, 1.0, 1.0);
        SpectralField back = analyze(g, synthesize(p.position));
        double scale = sobolev_norm(p.position, 0.0);
        CHECK(max_coef_diff(back, p.position) <= 1e-12 * scale);
    }
}

TEST_CASE("analyze picks out sin(2 x_2) exactly") {
    GridSpec g{3, 8, 1};
    std::vector<double> samples(g.total_points());
    int N = g.modes;
    for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1)
            for (int j2 = 0; j2 < N; ++j2)
                samples[static_cast<std::size_t>((j0 * N + j1) * N + j2)] =
                    std::sin(2.0 * j1 * g.spacing());
    SpectralField f = analyze(g, samples);
    std::array<int, kMaxDim> up{0, 2, 0};
    std::array<int, kMaxDim> dn{0, -2, 0};
    // sin(2y) = (e^{2iy} - e^{-2iy}) / (2i)
    CHECK(std::abs(f.at_modes(up) - cplx{0.0, -0.5}) <= 1e-14);
    CHECK(std::abs(f.at_modes(dn) - cplx{0.0, 0.5}) <= 1e-14);
    double rest = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) rest += std::norm(f.coef[i]);
    CHECK(rest == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Parseval: spectral sum equals grid quadrature") {
    GridSpec g{4, 8, 1};
    WavePair p = reference_pair(g, 0.5, 2.0);
    double spectral = 0.0;
    for (std::size_t i = 0; i < p.position.size(); ++i)
        spectral += std::norm(p.position.coef[i]);
    spectral *= std::pow(g.period(), g.dim);

    std::vector<double> u = synthesize(p.position);
    double quad = 0.0;
    for (double v : u) quad += v * v;
    quad *= std::pow(g.spacing(), g.dim);

    CHECK(spectral == doctest::Approx(quad).epsilon(1e-10));
}

TEST_CASE("analyze of complex samples rejects non-real input") {
    GridSpec g{3, 8, 1};
    std::vector<cplx> samples(g.total_points());
    int N = g.modes;
    for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1)
            for (int j2 = 0; j2 < N; ++j2)
                samples[static_cast<std::size_t>((j0 * N + j1) * N + j2)] =
                    std::exp(cplx{0.0, j0 * g.spacing()});
    CHECK_THROWS_AS(analyze(g, samples), AsymmetryError);

    // Real samples passed as complex are fine and report a tiny defect.
    std::vector<cplx> real_samples(g.total_points(), cplx{1.0, 0.0});
    double defect = -1.0;
    SpectralField f = analyze(g, real_samples, &defect);
    CHECK(defect <= 1e-14);
    CHECK(f.hermitian);
}

TEST_CASE("Nyquist content is dropped by analyze") {
    GridSpec g{3, 8, 1};
    std::vector<double> samples(g.total_points());
    int N = g.modes;
    for (int j0 = 0; j0 < N; ++j0)
        for (int j1 = 0; j1 < N; ++j1)
            for (int j2 = 0; j2 < N; ++j2)
                samples[static_cast<std::size_t>((j0 * N + j1) * N + j2)] =
                    std::cos(4.0 * j0 * g.spacing());  // (-1)^{j0}, pure Nyquist
    SpectralField f = analyze(g, samples);
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f.coef[i]));
    CHECK(m <= 1e-14);
    CHECK(hermitian_defect(f) == 0.0);
}

TEST_CASE("padded synthesis refines the grid without changing the field") {
    GridSpec g{3, 8, 1};
    WavePair p = reference_pair(g, 1.0, 1.0);
    SpectralField back = analyze_truncated(g, synthesize_padded(p.position, 2), 2);
    CHECK(max_coef_diff(back, p.position) <= 1e-12);

    SpectralField c(g);
    std::array<int, kMaxDim> zero{};
    c.at_modes(zero) = 3.25;
    std::vector<double> padded = synthesize_padded(c, 3);
    CHECK(padded.size() == 24u * 24u * 24u);
    for (double v : padded) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));
}

TEST_CASE("synthesize refuses fields with a cleared hermitian flag") {
    GridSpec g{3, 8, 1};
    SpectralField f(g, false);
    CHECK_THROWS_AS(synthesize(f), NotHermitian);
    CHECK_NOTHROW(synthesize_complex(f));
}

TEST_CASE("field arithmetic enforces matching grids") {
    SpectralField a{GridSpec{3, 8, 1}};
    SpectralField b{GridSpec{3, 16, 1}};
    CHECK_THROWS_AS(a += b, GridMismatch);
    CHECK_THROWS_AS(add_scaled(a, 2.0, b), GridMismatch);
}

TEST_CASE("Sobolev norms against closed forms") {
    GridSpec g{3, 8, 1};
    double vol = std::pow(2.0 * kPi, 3);

    SpectralField f = two_cos(g, 0, 1);  // 2 cos x_1
    // <kappa> = 2 at |kappa| = 1: ||f||_{H^1}^2 = vol * 2 * 4
    CHECK(sobolev_norm(f, 1.0) ==
          doctest::Approx(2.0 * std::sqrt(2.0 * vol)).epsilon(1e-13));
    CHECK(homogeneous_sobolev_norm(f, 1.0) ==
          doctest::Approx(std::sqrt(2.0 * vol)).epsilon(1e-13));
    CHECK(homogeneous_sobolev_norm(f, 0.0) == sobolev_norm(f, 0.0));

    SpectralField c(g);
    std::array<int, kMaxDim> zero{};
    c.at_modes(zero) = -0.7;
    for (double s : {0.0, 0.5, 2.0})
        CHECK(sobolev_norm(c, s) == doctest::Approx(0.7 * std::sqrt(vol)).epsilon(1e-14));
    // The zero frequency carries no homogeneous mass.
    CHECK(homogeneous_sobolev_norm(c, 1.0) == 0.0);

    WavePair p(g);
    p.position = f;
    p.velocity = c;
    double want = std::hypot(sobolev_norm(f, 1.0), sobolev_norm(c, 0.0));
    CHECK(pair_norm(p, 1.0) == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("extended-torus norms use physical frequencies") {
    // 2 cos(x_1) lives at lattice mode 3 on the m = 3 torus but its physical
    // frequency is 1, so the H^1 norm only grows with the volume.
    GridSpec base{3, 8, 1};
    GridSpec ext{3, 24, 3};
    double r = sobolev_norm(two_cos(ext, 0, 3), 1.0) / sobolev_norm(two_cos(base, 0, 1), 1.0);
    CHECK(r == doctest::Approx(std::pow(3.0, 1.5)).epsilon(1e-13));
}

TEST_CASE("Lebesgue norms against closed forms") {
    GridSpec g{3, 16, 1};
    double vol = std::pow(2.0 * kPi, 3);

    SpectralField c(g);
    std::array<int, kMaxDim> zero{};
    c.at_modes(zero) = 1.0;
    CHECK(lebesgue_norm(c, 6.0) == doctest::Approx(std::pow(vol, 1.0 / 6.0)).epsilon(1e-14));
    CHECK(lebesgue_norm(c, kInf) == doctest::Approx(1.0).epsilon(1e-15));

    SpectralField f = two_cos(g, 0, 1);
    f *= 0.5;  // cos x_1
    // int cos^4 = (3/8) vol; the integrand has modes <= 4 so 16-point
    // quadrature is exact.
    CHECK(lebesgue_norm(f, 4.0) ==
          doctest::Approx(std::pow(0.375 * vol, 0.25)).epsilon(1e-13));
    CHECK(lebesgue_norm(f, kInf) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lebesgue_norm(f, kInf, 4) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lebesgue_norm(f, 2.0) == doctest::Approx(sobolev_norm(f, 0.0)).epsilon(1e-13));

    CHECK_THROWS_AS(lebesgue_norm(f, 0.5), ConfigError);
}

TEST_CASE("mixed space-time norms on a constant trajectory") {
    GridSpec g{3, 8, 1};
    WavePair one(g);
    std::array<int, kMaxDim> zero{};
    one.position.at_modes(zero) = 1.0;

    Trajectory traj;
    traj.t0 = 0.0;
    traj.dt = 0.25;
    traj.states.assign(9, one);  // [0, 2]

    MixedNormSpec spec{3.0, 6.0, 0.0, 2.0, 1};
    double want = std::pow(2.0, 1.0 / 3.0) * std::sqrt(2.0 * kPi);
    CHECK(mixed_norm(traj, spec) == doctest::Approx(want).epsilon(1e-13));

    spec.q = kInf;
    CHECK(mixed_norm(traj, spec) == doctest::Approx(std::sqrt(2.0 * kPi)).epsilon(1e-13));

    // Sub-window with off-sample endpoints interpolates the constant exactly.
    spec.q = 3.0;
    spec.t0 = 0.1;
    spec.t1 = 1.3;
    want = std::pow(1.2, 1.0 / 3.0) * std::sqrt(2.0 * kPi);
    CHECK(mixed_norm(traj, spec) == doctest::Approx(want).epsilon(1e-12));

    spec.t1 = 2.5;  // beyond the trajectory
    CHECK_THROWS_AS(mixed_norm(traj, spec), IntervalError);

    Trajectory scal;
    scal.role = Trajectory::Role::norm_samples;
    scal.dt = 0.25;
    scal.samples.assign(9, std::sqrt(2.0 * kPi));
    scal.sampled_r = 6.0;
    MixedNormSpec full{3.0, 6.0, 0.0, 2.0, 1};
    want = std::pow(2.0, 1.0 / 3.0) * std::sqrt(2.0 * kPi);
    CHECK(mixed_norm(scal, full) == doctest::Approx(want).epsilon(1e-13));
    scal.sampled_r = 4.0;
    CHECK_THROWS_AS(mixed_norm(scal, full), ConfigError);
}

TEST_CASE("wave admissibility accepts the diagonal pairs and rejects off-scaling") {
    MixedNormSpec d3{5.0, 10.0, 0.0, 1.0, 1};
    CHECK_NOTHROW(d3.require_admissible(3, 1.0));
    CHECK_THROWS_AS(d3.require_admissible(3, 0.9), AdmissibilityError);

    MixedNormSpec d4{3.0, 6.0, 0.0, 1.0, 1};
    CHECK_NOTHROW(d4.require_admissible(4, 1.0));

    MixedNormSpec bad{1.0, 4.0, 0.0, 1.0, 1};  // 1/q + (d-1)/(2r) > (d-1)/4
    CHECK_THROWS_AS(bad.require_admissible(3, 0.25), AdmissibilityError);
}

TEST_CASE("ct distance of a trajectory against itself is zero") {
    GridSpec g{3, 8, 1};
    Trajectory t;
    t.dt = 0.5;
    t.states.assign(3, reference_pair(g, 1.0, 1.0));
    CHECK(ct_pair_distance(t, t, 1.0) == 0.0);
}

TEST_CASE("dyadic projections resolve the identity sharply") {
    GridSpec g{3, 8, 1};

    SpectralField f = two_cos(g, 0, 3);  // |kappa| = 3
    CHECK(max_coef_diff(lp_project(f, 4, ProjMode::single), f) == 0.0);
    CHECK(sobolev_norm(lp_project(f, 2, ProjMode::single), 0.0) == 0.0);
    CHECK(sobolev_norm(lp_project(f, 1, ProjMode::single), 0.0) == 0.0);
    CHECK(max_coef_diff(lp_project(f, 2, ProjMode::gt), f) == 0.0);
    CHECK(sobolev_norm(lp_project(f, 4, ProjMode::gt), 0.0) == 0.0);
    CHECK(max_coef_diff(lp_project(f, 4, ProjMode::leq), f) == 0.0);

    std::vector<int> levels = dyadic_levels(g);
    CHECK(levels == std::vector<int>{1, 2, 4, 8});

    WavePair p = reference_pair(g, 1.0, 1.0);
    SpectralField sum(g);
    double mass2 = 0.0;
    for (int N : levels) {
        SpectralField piece = lp_project(p.position, N, ProjMode::single);
        sum += piece;
        double m = sobolev_norm(piece, 0.0);
        mass2 += m * m;
    }
    CHECK(max_coef_diff(sum, p.position) == 0.0);
    double total = sobolev_norm(p.position, 0.0);
    CHECK(mass2 == doctest::Approx(total * total).epsilon(1e-12));

    CHECK_THROWS_AS(lp_project(f, 3, ProjMode::single), ConfigError);
    CHECK_THROWS_AS(lp_project(f, 0, ProjMode::leq), ConfigError);
}
