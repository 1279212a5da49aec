#include "kernels_detail.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <vector>

namespace ballgap::kernels {

namespace {

// Hermitian inner product against interleaved complex rows, 2 complex
// coordinates per 256-bit register.
//
// With q = (qr0, qi0, qr1, qi1) and w = (wr0, wi0, wr1, wi1):
//   Re<q,w> = hsum(q * w)
//   Im<q,w> = hsum(swap_pairs(q) * (+,-,+,-) * w)
// The swapped, sign-flipped query is precomputed once per call.

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_hadd_pd(lo, lo));
}

struct QueryPrep {
    std::vector<double> data;  // per chunk: 4 doubles of q, 4 of swapped-signed q
    size_t chunks = 0;
    double tail_re = 0.0, tail_im = 0.0;  // last complex coordinate when cdim is odd
    bool has_tail = false;
};

void prepare(const double* q, size_t cdim, QueryPrep& prep) {
    prep.chunks = cdim / 2;
    prep.has_tail = (cdim % 2) != 0;
    prep.data.resize(prep.chunks * 8);
    const __m256d signmask = _mm256_set_pd(-0.0, 0.0, -0.0, 0.0);
    for (size_t c = 0; c < prep.chunks; ++c) {
        __m256d qv = _mm256_loadu_pd(q + 4 * c);
        __m256d qs = _mm256_xor_pd(_mm256_permute_pd(qv, 0b0101), signmask);
        _mm256_storeu_pd(prep.data.data() + 8 * c, qv);
        _mm256_storeu_pd(prep.data.data() + 8 * c + 4, qs);
    }
    if (prep.has_tail) {
        prep.tail_re = q[2 * cdim - 2];
        prep.tail_im = q[2 * cdim - 1];
    }
}

template <bool kAbs2>
void run_batch(const double* q, const double* pts, size_t count, size_t cdim, double* out_a,
               double* out_b) {
    thread_local QueryPrep prep;
    prepare(q, cdim, prep);
    const size_t stride = 2 * cdim;
    for (size_t i = 0; i < count; ++i) {
        const double* w = pts + i * stride;
        __m256d acc_re = _mm256_setzero_pd();
        __m256d acc_im = _mm256_setzero_pd();
        for (size_t c = 0; c < prep.chunks; ++c) {
            __m256d wv = _mm256_loadu_pd(w + 4 * c);
            __m256d qv = _mm256_loadu_pd(prep.data.data() + 8 * c);
            __m256d qs = _mm256_loadu_pd(prep.data.data() + 8 * c + 4);
            acc_re = _mm256_fmadd_pd(qv, wv, acc_re);
            acc_im = _mm256_fmadd_pd(qs, wv, acc_im);
        }
        double re = hsum(acc_re);
        double im = hsum(acc_im);
        if (prep.has_tail) {
            const double wr = w[stride - 2], wi = w[stride - 1];
            re += prep.tail_re * wr + prep.tail_im * wi;
            im += prep.tail_im * wr - prep.tail_re * wi;
        }
        if constexpr (kAbs2) {
            out_a[i] = re * re + im * im;
        } else {
            out_a[i] = re;
            out_b[i] = im;
        }
    }
}

void abs2_batch_avx2(const double* q, const double* pts, size_t count, size_t cdim,
                     double* out) {
    run_batch<true>(q, pts, count, cdim, out, nullptr);
}

void inner_batch_avx2(const double* q, const double* pts, size_t count, size_t cdim,
                      double* out_re, double* out_im) {
    run_batch<false>(q, pts, count, cdim, out_re, out_im);
}

constexpr Ops kAvx2Ops{abs2_batch_avx2, inner_batch_avx2, "avx2"};

}  // namespace

const Ops* avx2_ops_detail() {
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &kAvx2Ops : nullptr;
}

}  // namespace ballgap::kernels

#else

namespace ballgap::kernels {
const Ops* avx2_ops_detail() { return nullptr; }
}  // namespace ballgap::kernels

#endif
