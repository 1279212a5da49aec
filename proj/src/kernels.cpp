#include "ballgap/kernels.hpp"

#include "kernels_detail.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace ballgap::kernels {

namespace {

void abs2_batch_scalar(const double* q, const double* pts, size_t count, size_t cdim,
                       double* out) {
    const size_t stride = 2 * cdim;
    for (size_t i = 0; i < count; ++i) {
        const double* w = pts + i * stride;
        double re = 0.0, im = 0.0;
        for (size_t t = 0; t < cdim; ++t) {
            const double qr = q[2 * t], qi = q[2 * t + 1];
            const double wr = w[2 * t], wi = w[2 * t + 1];
            re += qr * wr + qi * wi;
            im += qi * wr - qr * wi;
        }
        out[i] = re * re + im * im;
    }
}

void inner_batch_scalar(const double* q, const double* pts, size_t count, size_t cdim,
                        double* out_re, double* out_im) {
    const size_t stride = 2 * cdim;
    for (size_t i = 0; i < count; ++i) {
        const double* w = pts + i * stride;
        double re = 0.0, im = 0.0;
        for (size_t t = 0; t < cdim; ++t) {
            const double qr = q[2 * t], qi = q[2 * t + 1];
            const double wr = w[2 * t], wi = w[2 * t + 1];
            re += qr * wr + qi * wi;
            im += qi * wr - qr * wi;
        }
        out_re[i] = re;
        out_im[i] = im;
    }
}

constexpr Ops kScalarOps{abs2_batch_scalar, inner_batch_scalar, "scalar"};

Mode g_forced = Mode::Auto;
const Ops* g_active = nullptr;

Mode env_mode() {
    const char* e = std::getenv("BALLGAP_KERNELS");
    if (!e) return Mode::Auto;
    std::string v(e);
    if (v == "scalar") return Mode::Scalar;
    if (v == "avx2") return Mode::Avx2;
    if (v == "neon") return Mode::Neon;
    return Mode::Auto;
}

const Ops* resolve(Mode mode) {
    switch (mode) {
        case Mode::Scalar:
            return &kScalarOps;
        case Mode::Avx2:
            if (!avx2_available()) throw std::invalid_argument("AVX2 kernels unavailable");
            return avx2_ops_detail();
        case Mode::Neon:
            if (!neon_available()) throw std::invalid_argument("NEON kernels unavailable");
            return neon_ops_detail();
        case Mode::Auto:
            if (avx2_available()) return avx2_ops_detail();
            if (neon_available()) return neon_ops_detail();
            return &kScalarOps;
    }
    return &kScalarOps;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

bool avx2_available() { return avx2_ops_detail() != nullptr; }
bool neon_available() { return neon_ops_detail() != nullptr; }

void force(Mode mode) {
    g_active = resolve(mode);
    g_forced = mode;
}

const Ops& active() {
    if (!g_active) g_active = resolve(g_forced == Mode::Auto ? env_mode() : g_forced);
    return *g_active;
}

double max_abs2_batch(const double* q, const double* pts, size_t count, size_t cdim) {
    if (count == 0) return 0.0;
    constexpr size_t kChunk = 4096;
    std::vector<double> buf(std::min(count, kChunk));
    const Ops& ops = active();
    double best = 0.0;
    for (size_t off = 0; off < count; off += kChunk) {
        size_t len = std::min(kChunk, count - off);
        ops.abs2_batch(q, pts + off * 2 * cdim, len, cdim, buf.data());
        for (size_t i = 0; i < len; ++i) best = std::max(best, buf[i]);
    }
    return best;
}

}  // namespace ballgap::kernels
