#pragma once

#include "stochnlw/norms.hpp"
#include "stochnlw/propagators.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

// Time integration of u_tt - Lap u + F(u) = 0 with F(u) = |u|^{4/(d-2)} u,
// and of the perturbed system v_tt - Lap v + F(v + z) = 0 from zero data,
// by symmetric Strang splitting between the exact Fourier-space linear flow
// and the nonlinear kick. The linear substep is exact, so the only time
// discretization error is the kick splitting: clean second order, exactly
// time-reversible, and the semi-discrete system's energy is conserved up to
// O(dt^2) splitting error alone.

namespace stochnlw {

enum class Dealias { two_thirds, zero_pad_3x, none };
enum class IntegratorKind { strang, picard };

// Policy defaults per nonlinearity: exact 3x zero padding for the d = 3
// quintic on small grids (2/3 rule above N = 32 to bound the padded size),
// the 2/3 rule for the d = 4 cubic, and plain 2x-padded pointwise evaluation
// for the fractional d = 5 power, which no finite padding dealiases exactly.
Dealias default_dealias(int dim, int modes);
const char* dealias_name(Dealias d);
Dealias dealias_from_name(const std::string& name);  // throws ConfigError

struct SolverConfig {
    double dt = 1e-2;
    std::optional<Dealias> dealias;  // defaulted by dimension when unset
    IntegratorKind integrator = IntegratorKind::strang;
    double picard_tol = 1e-9;
    int picard_max_iter = 30;
    double blowup_ceiling = 1e6;
    int sample_stride = 1;     // trajectory thinning for stored states
    bool record_ledger = true;

    Dealias dealias_for(const GridSpec& g) const;
    void validate() const;  // throws ConfigError
};

double potential_coefficient(int dim);  // (d-2)/(2d): 1/6, 1/4, 3/10
double potential_exponent(int dim);     // 2d/(d-2):   6,   4,   10/3

// F(u) evaluated pointwise under the dealias policy and re-analyzed.
// info, when given, receives the grid max of |u| and the potential-energy
// quadrature ((d-2)/(2d)) int |u|^{2d/(d-2)}, both from the same synthesis
// (so under two_thirds they refer to the masked field).
struct KickInfo {
    double max_abs = 0.0;
    double potential = 0.0;
};
SpectralField nonlinearity(const SpectralField& u, Dealias policy,
                           KickInfo* info = nullptr);

// E = int (1/2)(u_t)^2 + (1/2)|grad u|^2 + ((d-2)/(2d))|u|^{2d/(d-2)} dx.
// Kinetic and gradient terms are spectral sums (exact); the potential is
// quadrature on a padded grid: 3x for d = 3 and 2x for d = 4 (exact for
// those integer powers), 2x and quadrature-limited for the d = 5 power.
double energy(const WavePair& pair);

struct EnergyLedger {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<double> energy;  // E of the integrated state (u, or v)
    std::vector<double> h1;      // pair norm of the state at s = 1
    std::vector<double> z_l6;    // ||z(t)||_{L^6}   (perturbed solves; else 0)
    std::vector<double> z_linf;  // ||z(t)||_{L^inf}
    std::vector<double> v_l4;    // ||v(t)||_{L^4}
    std::vector<double> rhs;     // right side of the energy inequality (d = 4)
};

// One solve's step engine. state() is the true state at time(): the closing
// and opening half kicks of adjacent steps share one force evaluation, since
// kicks leave positions unchanged.
class NlwIntegrator {
  public:
    NlwIntegrator(WavePair pair0, const SolverConfig& cfg);       // full equation
    NlwIntegrator(const LinearFlow& z, const SolverConfig& cfg);  // perturbed, v = 0

    const GridSpec& grid() const { return state_.grid(); }
    double time() const { return static_cast<double>(step_) * cfg_.dt; }
    std::size_t step() const { return step_; }
    const WavePair& state() const { return state_; }
    const WavePair* z_state() const { return z_ ? &*z_ : nullptr; }
    Dealias dealias() const { return dealias_; }
    double last_max_abs() const { return info_.max_abs; }

    void advance();  // one step of size cfg.dt; throws BlowupGuard

  private:
    void recompute_force();

    SolverConfig cfg_;
    Dealias dealias_;
    DriftOp drift_;
    WavePair state_;
    std::optional<WavePair> z_;
    SpectralField force_;
    KickInfo info_;
    std::size_t step_ = 0;
};

// Ledger row for the integrator's current state (oversampled quadrature for
// the Lebesgue norms; the energy inequality right side is filled for d = 4
// perturbed states and zero otherwise).
void append_ledger_row(EnergyLedger& ledger, const NlwIntegrator& integ);

struct SolveResult {
    Trajectory traj;      // states at stride cfg.sample_stride
    EnergyLedger ledger;  // every step, when cfg.record_ledger
};

SolveResult solve_full(const WavePair& pair0, double T, const SolverConfig& cfg);
SolveResult solve_perturbed(const LinearFlow& z, double T, const SolverConfig& cfg);

// Strichartz bookkeeping: the diagonal-admissible pair and the interval
// exponent used by the partition budget K |I|^theta.
double strichartz_q(int dim);      // (d+2)/(d-2)
double strichartz_r(int dim);      // 2(d+2)/(d-2)
double partition_theta(int dim);   // (d-2)/(2(d+2)): 1/10, 1/6, 3/14

struct PartitionResult {
    double theta = 0.0;
    double K = 0.0;
    double cap = 0.0;
    std::vector<double> breakpoints;  // t_0 = 0 < ... < t_J = T
    std::vector<double> measured;     // per-interval mixed norm of z
    std::vector<double> budget;       // min(K |I_j|^theta, cap)
    std::size_t intervals() const { return measured.size(); }
};

// Greedy left-to-right partition of [0, T]: extend the interval while the
// measured ||z||_{L^q_I L^r_x} stays within min(K |I|^theta, cap). z_norms
// must carry per-step L^r samples with r = strichartz_r(dim) on [0, T].
PartitionResult partition_by_strichartz(
    const Trajectory& z_norms, int dim, double K, double T,
    double cap = std::numeric_limits<double>::infinity());

// sup_t E(v)^{1/2} <= (5 sqrt2/4) ||z||^3_{L^3_T L^6_x}
//                     * exp((9 sqrt2/2) ||z||_{L^1_T L^inf_x})   (d = 4).
// The constants follow from the differential inequality below; both time
// integrals are trapezoid sums of the given per-step norm samples.
double gronwall_bound(int dim, const Trajectory& z_l6, const Trajectory& z_linf,
                      double T);

struct EnergyCheckReport {
    double slack = 0.0;         // additive O(dt^2) allowance used
    double worst_margin = 0.0;  // max over steps of lhs - rhs (without slack)
    std::size_t violations = 0; // steps with lhs > rhs + slack
    std::size_t steps = 0;
};

// Per interior step: |E_{k+1} - E_{k-1}| / (2 dt) <= rhs_k + slack with the
// ledger's recorded right side.
EnergyCheckReport energy_inequality_check(const EnergyLedger& ledger);

struct PicardResult {
    WavePair endpoint;                    // (v, v_t) at the right endpoint
    std::vector<double> iterate_distance; // successive mixed-norm distances
    double contraction = 0.0;             // worst measured distance ratio
    int iterations = 0;
    bool converged = false;
};

// Fixed-point solve of v = s_per(. - t_lo)(v_init) - Duhamel(F(v + z)) on
// [t_lo, t_hi] with time step cfg.dt. The optional start field perturbs the
// initial iterate (iterate 0 is the linear part, plus `start` at every time
// sample if given); used to probe uniqueness of the limit.
PicardResult picard_local(const LinearFlow& z, double t_lo, double t_hi,
                          const WavePair& v_init, const SolverConfig& cfg,
                          const SpectralField* start = nullptr);

} // namespace stochnlw
