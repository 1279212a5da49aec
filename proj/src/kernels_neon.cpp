#include "kernels_detail.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace ballgap::kernels {

namespace {

// One complex coordinate per 128-bit register; accumulators stay vectorized
// across the coordinate loop and are reduced once per point.

template <bool kAbs2>
void run_batch(const double* q, const double* pts, size_t count, size_t cdim, double* out_a,
               double* out_b) {
    const size_t stride = 2 * cdim;
    const float64x2_t flip = {1.0, -1.0};
    for (size_t i = 0; i < count; ++i) {
        const double* w = pts + i * stride;
        float64x2_t acc_re = vdupq_n_f64(0.0);
        float64x2_t acc_im = vdupq_n_f64(0.0);
        for (size_t t = 0; t < cdim; ++t) {
            float64x2_t qv = vld1q_f64(q + 2 * t);   // (qr, qi)
            float64x2_t wv = vld1q_f64(w + 2 * t);   // (wr, wi)
            acc_re = vfmaq_f64(acc_re, qv, wv);      // (+qr*wr, +qi*wi)
            float64x2_t qs = vmulq_f64(vextq_f64(qv, qv, 1), flip);  // (qi, -qr)
            acc_im = vfmaq_f64(acc_im, qs, wv);      // (+qi*wr, -qr*wi)
        }
        double re = vaddvq_f64(acc_re);
        double im = vaddvq_f64(acc_im);
        if constexpr (kAbs2) {
            out_a[i] = re * re + im * im;
        } else {
            out_a[i] = re;
            out_b[i] = im;
        }
    }
}

void abs2_batch_neon(const double* q, const double* pts, size_t count, size_t cdim,
                     double* out) {
    run_batch<true>(q, pts, count, cdim, out, nullptr);
}

void inner_batch_neon(const double* q, const double* pts, size_t count, size_t cdim,
                      double* out_re, double* out_im) {
    run_batch<false>(q, pts, count, cdim, out_re, out_im);
}

constexpr Ops kNeonOps{abs2_batch_neon, inner_batch_neon, "neon"};

}  // namespace

const Ops* neon_ops_detail() { return &kNeonOps; }

}  // namespace ballgap::kernels

#else

namespace ballgap::kernels {
const Ops* neon_ops_detail() { return nullptr; }
}  // namespace ballgap::kernels

#endif
