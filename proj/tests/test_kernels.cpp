#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballgap/kernels.hpp"
#include "ballgap/rng.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace ballgap;

namespace {

// plain std::complex reference, independent of the kernel code paths
std::complex<double> reference_inner(const double* q, const double* w, size_t cdim) {
    std::complex<double> acc(0.0, 0.0);
    for (size_t t = 0; t < cdim; ++t) {
        std::complex<double> a(q[2 * t], q[2 * t + 1]);
        std::complex<double> b(w[2 * t], w[2 * t + 1]);
        acc += a * std::conj(b);
    }
    return acc;
}

std::vector<double> random_rows(Rng& rng, size_t count, size_t cdim, bool normalize) {
    std::vector<double> rows(count * 2 * cdim);
    for (size_t i = 0; i < count; ++i) {
        if (normalize) {
            rng.unit_vector(rows.data() + i * 2 * cdim, cdim);
        } else {
            for (size_t t = 0; t < 2 * cdim; ++t)
                rows[i * 2 * cdim + t] = 2.0 * rng.uniform01() - 1.0;
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("scalar kernels match the std::complex reference") {
    Rng rng(42);
    for (size_t cdim : {1, 2, 3, 4, 5, 8}) {
        for (size_t count : {0, 1, 3, 17, 100}) {
            auto q = random_rows(rng, 1, cdim, true);
            auto pts = random_rows(rng, count, cdim, false);
            std::vector<double> abs2(count), re(count), im(count);
            kernels::scalar_ops().abs2_batch(q.data(), pts.data(), count, cdim, abs2.data());
            kernels::scalar_ops().inner_batch(q.data(), pts.data(), count, cdim, re.data(),
                                              im.data());
            for (size_t i = 0; i < count; ++i) {
                const auto ref = reference_inner(q.data(), pts.data() + i * 2 * cdim, cdim);
                CHECK(re[i] == doctest::Approx(ref.real()).epsilon(1e-13));
                CHECK(im[i] == doctest::Approx(ref.imag()).epsilon(1e-13));
                CHECK(abs2[i] == doctest::Approx(std::norm(ref)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("SIMD variants agree with the scalar reference") {
    if (!kernels::avx2_available() && !kernels::neon_available()) {
        MESSAGE("no SIMD variant compiled for this target; skipping");
        return;
    }
    const kernels::Ops& simd = kernels::avx2_available()
                                   ? *[] {
                                         kernels::force(kernels::Mode::Avx2);
                                         return &kernels::active();
                                     }()
                                   : *[] {
                                         kernels::force(kernels::Mode::Neon);
                                         return &kernels::active();
                                     }();
    Rng rng(7);
    for (size_t cdim : {1, 2, 3, 4, 6, 7, 9}) {
        for (size_t count : {1, 2, 5, 64, 513}) {
            auto q = random_rows(rng, 1, cdim, true);
            auto pts = random_rows(rng, count, cdim, true);
            std::vector<double> a_s(count), a_v(count), re_s(count), re_v(count), im_s(count),
                im_v(count);
            kernels::scalar_ops().abs2_batch(q.data(), pts.data(), count, cdim, a_s.data());
            simd.abs2_batch(q.data(), pts.data(), count, cdim, a_v.data());
            kernels::scalar_ops().inner_batch(q.data(), pts.data(), count, cdim, re_s.data(),
                                              im_s.data());
            simd.inner_batch(q.data(), pts.data(), count, cdim, re_v.data(), im_v.data());
            for (size_t i = 0; i < count; ++i) {
                CHECK(a_v[i] == doctest::Approx(a_s[i]).epsilon(1e-12));
                CHECK(re_v[i] == doctest::Approx(re_s[i]).epsilon(1e-12));
                CHECK(im_v[i] == doctest::Approx(im_s[i]).epsilon(1e-12));
            }
        }
    }
    kernels::force(kernels::Mode::Auto);
}

TEST_CASE("abs2 of a unit vector against itself is 1") {
    Rng rng(3);
    for (size_t cdim : {1, 2, 4}) {
        auto q = random_rows(rng, 1, cdim, true);
        double out = 0.0;
        kernels::active().abs2_batch(q.data(), q.data(), 1, cdim, &out);
        CHECK(out == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("max_abs2_batch reduces over chunk boundaries") {
    Rng rng(11);
    const size_t cdim = 2, count = 5000;
    auto q = random_rows(rng, 1, cdim, true);
    auto pts = random_rows(rng, count, cdim, true);
    std::vector<double> all(count);
    kernels::active().abs2_batch(q.data(), pts.data(), count, cdim, all.data());
    double expect = 0.0;
    for (double v : all) expect = std::max(expect, v);
    CHECK(kernels::max_abs2_batch(q.data(), pts.data(), count, cdim) == expect);
}
