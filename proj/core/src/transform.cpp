#include "stochnlw/transform.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace stochnlw {

namespace {

enum class PlanKind { c2c_backward, c2c_forward, r2c, c2r };

using PlanKey = std::pair<PlanKind, std::vector<int>>;

std::mutex g_plan_mutex;
std::map<PlanKey, fftw_plan> g_plans;

std::vector<int> dims_of(const GridSpec& g, int factor = 1) {
    return std::vector<int>(static_cast<std::size_t>(g.dim), g.modes * factor);
}

std::size_t points_of(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (int d : dims) n *= static_cast<std::size_t>(d);
    return n;
}

std::size_t half_points_of(const std::vector<int>& dims) {
    std::size_t n = 1;
    for (std::size_t a = 0; a + 1 < dims.size(); ++a) n *= static_cast<std::size_t>(dims[a]);
    return n * static_cast<std::size_t>(dims.back() / 2 + 1);
}

// Plans are created once per (kind, dims) on throwaway buffers and reused via
// the new-array execute interface. FFTW_UNALIGNED keeps them valid for any
// caller buffer; the planner lock is required because plan creation is not
// thread-safe even though execution is.
fftw_plan get_plan(PlanKind kind, const std::vector<int>& dims) {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto it = g_plans.find({kind, dims});
    if (it != g_plans.end()) return it->second;

    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::size_t n = points_of(dims);
    std::size_t nh = half_points_of(dims);
    int rank = static_cast<int>(dims.size());
    fftw_plan p = nullptr;
    switch (kind) {
        case PlanKind::c2c_backward:
        case PlanKind::c2c_forward: {
            fftw_complex* a = fftw_alloc_complex(n);
            fftw_complex* b = fftw_alloc_complex(n);
            int sign = (kind == PlanKind::c2c_backward) ? FFTW_BACKWARD : FFTW_FORWARD;
            p = fftw_plan_dft(rank, dims.data(), a, b, sign, flags);
            fftw_free(a);
            fftw_free(b);
            break;
        }
        case PlanKind::r2c: {
            double* a = fftw_alloc_real(n);
            fftw_complex* b = fftw_alloc_complex(nh);
            p = fftw_plan_dft_r2c(rank, dims.data(), a, b, flags);
            fftw_free(a);
            fftw_free(b);
            break;
        }
        case PlanKind::c2r: {
            fftw_complex* a = fftw_alloc_complex(nh);
            double* b = fftw_alloc_real(n);
            p = fftw_plan_dft_c2r(rank, dims.data(), a, b, flags);
            fftw_free(a);
            fftw_free(b);
            break;
        }
    }
    if (!p) throw Error("fftw plan creation failed");
    g_plans.emplace(PlanKey{kind, dims}, p);
    return p;
}

fftw_complex* as_fftw(std::vector<cplx>& v) {
    return reinterpret_cast<fftw_complex*>(v.data());
}

// Pack the non-negative half spectrum (last-axis storage index 0..M/2) of a
// full cube whose per-axis size is M. Input indices outside `src_modes`
// (when the source cube is smaller, i.e. zero padding) read as zero.
void pack_half(const GridSpec& g, int factor, const std::vector<cplx>& full,
               std::vector<cplx>& half) {
    const int d = g.dim;
    const int N = g.modes;          // source cube size per axis
    const int M = N * factor;       // target (padded) logical size per axis
    const int hlast = M / 2 + 1;

    std::vector<int> idx(static_cast<std::size_t>(d), 0); // target storage indices
    std::size_t count = half.size();
    for (std::size_t flat = 0; flat < count; ++flat) {
        // Map target index -> signed mode -> source storage index (or zero).
        bool present = true;
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) {
            int k = idx[static_cast<std::size_t>(a)];
            int n = (a == d - 1) ? k : (k < M / 2 ? k : k - M); // last axis is already 0..M/2
            if (n >= N / 2 || n < -N / 2) {
                present = false;
                break;
            }
            src = src * static_cast<std::size_t>(N) +
                  static_cast<std::size_t>(n >= 0 ? n : n + N);
        }
        half[flat] = present ? full[src] : cplx{0.0, 0.0};
        for (int a = d - 1; a >= 0; --a) {
            int lim = (a == d - 1) ? hlast : M;
            if (++idx[static_cast<std::size_t>(a)] < lim) break;
            idx[static_cast<std::size_t>(a)] = 0;
        }
    }
}

// Unpack a half spectrum of per-axis size M into the signed-mode cube of g
// (per-axis size N <= M), normalizing by the sample count and dropping
// content outside the symmetric sublattice of g.
void unpack_half(const GridSpec& g, int factor, const std::vector<cplx>& half,
                 std::vector<cplx>& full) {
    const int d = g.dim;
    const int N = g.modes;
    const int M = N * factor;
    const int hlast = M / 2 + 1;
    const double scale = 1.0 / static_cast<double>(points_of(dims_of(g, factor)));

    for (LatticeIter it(g); !it.done(); it.next()) {
        if (it.on_nyquist()) {
            full[it.flat()] = 0.0;
            continue;
        }
        const auto& n = it.modes();
        // Pick one source entry per conjugate pair (sign of the last nonzero
        // coordinate); pairs fully inside the stored half would otherwise be
        // read from two independently rounded r2c outputs, leaving a roundoff
        // asymmetry. This way the unpacked field is Hermitian exactly.
        bool conjugate = false;
        for (int a = d - 1; a >= 0; --a)
            if (n[a] != 0) {
                conjugate = n[a] < 0;
                break;
            }
        std::size_t src = 0;
        for (int a = 0; a < d; ++a) {
            int na = conjugate ? -n[a] : n[a];
            int k = (a == d - 1) ? na : (na >= 0 ? na : na + M);
            src = src * static_cast<std::size_t>(a == d - 1 ? hlast : M) +
                  static_cast<std::size_t>(k);
        }
        cplx v = half[src] * scale;
        if (it.flat() == 0) v = cplx{v.real(), 0.0};  // DC term of real data
        full[it.flat()] = conjugate ? std::conj(v) : v;
    }
}

} // namespace

std::vector<double> synthesize(const SpectralField& f) {
    if (!f.hermitian)
        throw NotHermitian("synthesize: field is not Hermitian; use synthesize_complex");
    auto dims = dims_of(f.grid);
    std::vector<cplx> half(half_points_of(dims));
    pack_half(f.grid, 1, f.coef, half);
    std::vector<double> out(points_of(dims));
    fftw_plan p = get_plan(PlanKind::c2r, dims);
    fftw_execute_dft_c2r(p, as_fftw(half), out.data());
    return out;
}

std::vector<cplx> synthesize_complex(const SpectralField& f) {
    auto dims = dims_of(f.grid);
    std::vector<cplx> in = f.coef;
    std::vector<cplx> out(in.size());
    fftw_plan p = get_plan(PlanKind::c2c_backward, dims);
    fftw_execute_dft(p, as_fftw(in), as_fftw(out));
    return out;
}

SpectralField analyze(const GridSpec& g, const std::vector<double>& samples) {
    g.validate();
    if (samples.size() != g.total_points())
        throw GridMismatch("analyze: sample count does not match grid");
    auto dims = dims_of(g);
    std::vector<double> in = samples; // r2c may destroy its input
    std::vector<cplx> half(half_points_of(dims));
    fftw_plan p = get_plan(PlanKind::r2c, dims);
    fftw_execute_dft_r2c(p, in.data(), as_fftw(half));
    SpectralField f(g);
    unpack_half(g, 1, half, f.coef);
    return f;
}

SpectralField analyze(const GridSpec& g, const std::vector<cplx>& samples, double* defect_out) {
    g.validate();
    if (samples.size() != g.total_points())
        throw GridMismatch("analyze: sample count does not match grid");
    auto dims = dims_of(g);
    std::vector<cplx> in = samples;
    std::vector<cplx> out(in.size());
    fftw_plan p = get_plan(PlanKind::c2c_forward, dims);
    fftw_execute_dft(p, as_fftw(in), as_fftw(out));
    SpectralField f(g);
    double scale = 1.0 / static_cast<double>(g.total_points());
    for (std::size_t i = 0; i < out.size(); ++i) f.coef[i] = out[i] * scale;
    f.hermitian = false;
    double defect = make_hermitian(f);
    if (defect_out) *defect_out = defect;
    if (defect > 1e-8)
        throw AsymmetryError("analyze: transform asymmetry " + std::to_string(defect) +
                             " exceeds 1e-8; input samples were not real");
    return f;
}

std::vector<double> synthesize_padded(const SpectralField& f, int factor) {
    if (!f.hermitian) throw NotHermitian("synthesize_padded: field is not Hermitian");
    if (factor < 1) throw Error("synthesize_padded: factor must be >= 1");
    if (factor == 1) return synthesize(f);
    auto dims = dims_of(f.grid, factor);
    std::vector<cplx> half(half_points_of(dims));
    pack_half(f.grid, factor, f.coef, half);
    std::vector<double> out(points_of(dims));
    fftw_plan p = get_plan(PlanKind::c2r, dims);
    fftw_execute_dft_c2r(p, as_fftw(half), out.data());
    return out;
}

SpectralField analyze_truncated(const GridSpec& g, const std::vector<double>& padded_samples,
                                int factor) {
    g.validate();
    if (factor < 1) throw Error("analyze_truncated: factor must be >= 1");
    auto dims = dims_of(g, factor);
    if (padded_samples.size() != points_of(dims))
        throw GridMismatch("analyze_truncated: sample count does not match refined grid");
    std::vector<double> in = padded_samples;
    std::vector<cplx> half(half_points_of(dims));
    fftw_plan p = get_plan(PlanKind::r2c, dims);
    fftw_execute_dft_r2c(p, in.data(), as_fftw(half));
    SpectralField f(g);
    unpack_half(g, factor, half, f.coef);
    return f;
}

void clear_plan_cache() {
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    for (auto& kv : g_plans) fftw_destroy_plan(kv.second);
    g_plans.clear();
}

} // namespace stochnlw
