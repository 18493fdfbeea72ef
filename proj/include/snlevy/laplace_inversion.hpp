#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace snlevy {

using LaplaceTransform = std::function<std::complex<double>(std::complex<double>)>;

// Euler-summation-accelerated Fourier-series inversion (Abate-Whitt).  The
// transform is sampled on the vertical line Re s = a_param / (2t); suited to
// bounded, smooth originals.  terms = M, euler = E: partial sums s_M..s_{M+E}
// are binomially averaged.
struct EulerOptions {
    int terms = 64;
    int euler = 8;
    double a_param = 19.0; // aliasing error ~ e^{-a_param} for |f| <= 1
};

double euler_invert(const LaplaceTransform& F, double t, const EulerOptions& opt = {});

// Assemble the inversion value from precomputed contour samples
// re_terms[k] = Re F((A + 2 k pi i) / (2t)), k = 0..terms+euler.
double euler_combine(const std::vector<double>& re_terms, double t, const EulerOptions& opt = {});

// Batched inversion, parallel over the evaluation points.  Results are
// bit-identical regardless of thread count (each point is independent).
std::vector<double> euler_invert_grid(const LaplaceTransform& F, const std::vector<double>& ts,
                                      const EulerOptions& opt = {}, int n_threads = 0);

// Fixed-Talbot inversion (Abate-Valko).  Requires F analytic in the cut plane
// with singularities on the negative real axis; used as a cross-check.
double talbot_invert(const LaplaceTransform& F, double t, int M = 48);

// Thread count resolution: explicit argument > SNLEVY_THREADS > hardware.
int resolve_thread_count(int requested);

} // namespace snlevy
