#pragma once

#include <vector>

#include "stochnlw/field.hpp"

namespace stochnlw {

// Transforms between coefficients and collocation samples.
//
// Conventions (periodic, analysis-normalized):
//   synthesize:  u(x_j) = sum_n coef(n) e^{i kappa(n) . x_j}
//   analyze:     coef(n) = (1/Npts) sum_j u(x_j) e^{-i kappa(n) . x_j}
// so analyze(synthesize(f)) == f exactly (up to roundoff) for valid fields.
//
// All plans are created FFTW_ESTIMATE: plan choice must not depend on runtime
// timing, otherwise identical configurations could produce bit-different
// output between runs. Transforms are single-threaded; concurrency happens at
// the sample level above this layer.

// Real samples of a Hermitian field. Throws NotHermitian on a cleared flag.
std::vector<double> synthesize(const SpectralField& f);

// Complex samples of an arbitrary field.
std::vector<cplx> synthesize_complex(const SpectralField& f);

// Forward transform of real samples; exact Hermitian output by construction.
// Nyquist rows are zeroed (their content is not representable symmetrically).
SpectralField analyze(const GridSpec& g, const std::vector<double>& samples);

// Forward transform of complex samples. The result is symmetrized; if the
// pre-repair defect exceeds 1e-8 the input was not real and AsymmetryError is
// thrown. The measured defect is reported through *defect_out when non-null.
SpectralField analyze(const GridSpec& g, const std::vector<cplx>& samples,
                      double* defect_out = nullptr);

// Real samples of f on the grid refined by `factor` per axis (same period):
// exact zero-padded synthesis, used for dealiased products and oversampled
// sup-norm evaluation.
std::vector<double> synthesize_padded(const SpectralField& f, int factor);

// Analyze samples living on the refinement of g by `factor`, then truncate to
// the modes of g (Nyquist rows zeroed).
SpectralField analyze_truncated(const GridSpec& g, const std::vector<double>& padded_samples,
                                int factor);

// Drop all cached FFTW plans (mainly for leak-checking in tests).
void clear_plan_cache();

} // namespace stochnlw
