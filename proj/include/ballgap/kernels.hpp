#pragma once

#include <cstddef>

namespace ballgap::kernels {

// Batched complex inner products against a packed table of points.
//
// Layout: a point of C^n is 2n interleaved doubles (re0, im0, re1, im1, ...);
// `pts` holds `count` consecutive points. The Hermitian inner product is
// <q, w> = sum_t q_t * conj(w_t).
//
// These are the arithmetic inner loops of the whole library (packing
// construction, conflict graphs, covering checks, nearest-center queries,
// zonal evaluation), so they come in a scalar reference version and SIMD
// variants selected once at runtime. Variants are equivalence-tested against
// the scalar kernel; any difference is limited to summation order.
struct Ops {
    // out[i] = |<q, pts[i]>|^2
    void (*abs2_batch)(const double* q, const double* pts, size_t count, size_t cdim,
                       double* out);
    // out_re[i] + i*out_im[i] = <q, pts[i]>
    void (*inner_batch)(const double* q, const double* pts, size_t count, size_t cdim,
                        double* out_re, double* out_im);
    const char* name;
};

enum class Mode { Auto, Scalar, Avx2, Neon };

// Active kernel table. Resolved on first use: explicit force() wins, then the
// BALLGAP_KERNELS environment variable (scalar|avx2|neon|auto), then CPU
// detection. The choice is process-wide and never changes afterwards.
const Ops& active();

// Test hooks.
void force(Mode mode);          // throws std::invalid_argument if unavailable
const Ops& scalar_ops();
bool avx2_available();
bool neon_available();

// Convenience reduction (fixed order, independent of kernel internals).
double max_abs2_batch(const double* q, const double* pts, size_t count, size_t cdim);

}  // namespace ballgap::kernels
