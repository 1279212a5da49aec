#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>

namespace ballgap {

// Counter-friendly generator: cheap to seed, so every Monte Carlo sample can
// own an independent stream derived from (master seed, stream id, counter).
// That makes all sampling loops order-independent and prefix-stable: sample i
// is the same no matter how many samples are requested or how work is split
// across threads.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

inline uint64_t mix_seed(uint64_t a, uint64_t b, uint64_t c = 0, uint64_t d = 0) {
    SplitMix64 s(a);
    s.state ^= s.next() + b;
    s.state ^= s.next() + c;
    s.state ^= s.next() + d;
    return s.next();
}

class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

    // standard normal via Box-Muller (implementation-independent, unlike
    // std::normal_distribution)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double m = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = m * std::sin(a);
        have_spare_ = true;
        return m * std::cos(a);
    }

    // uniform point on the unit sphere of C^n, written as 2n interleaved
    // reals (re0, im0, re1, im1, ...)
    void unit_vector(double* out, size_t cdim) {
        for (;;) {
            double norm2 = 0.0;
            for (size_t t = 0; t < 2 * cdim; ++t) {
                out[t] = normal();
                norm2 += out[t] * out[t];
            }
            if (norm2 > 1e-30) {
                double inv = 1.0 / std::sqrt(norm2);
                for (size_t t = 0; t < 2 * cdim; ++t) out[t] *= inv;
                return;
            }
        }
    }

  private:
    SplitMix64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ballgap
