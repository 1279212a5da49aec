#include "ballgap/polyseries.hpp"

#include "ballgap/kernels.hpp"
#include "ballgap/parallel.hpp"
#include "ballgap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ballgap {

namespace {

double norm2_of(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

void check_point(const ZonalPolynomial& P, std::span<const double> z) {
    if (z.size() != 2 * P.cdim) throw std::invalid_argument("zonal: dimension mismatch");
    if (norm2_of(z) > 1.0 + 1e-12) throw std::domain_error("zonal: |z| > 1");
}

}  // namespace

std::complex<double> cpow_int(std::complex<double> z, uint64_t k) {
    std::complex<double> acc(1.0, 0.0);
    while (k) {
        if (k & 1) acc *= z;
        z *= z;
        k >>= 1;
    }
    return acc;
}

std::complex<double> eval_zonal(const ZonalPolynomial& P, std::span<const double> z) {
    check_point(P, z);
    const size_t count = P.size();
    std::vector<double> re(count), im(count);
    kernels::active().inner_batch(z.data(), P.centers.data(), count, P.cdim, re.data(),
                                  im.data());
    std::complex<double> sum(0.0, 0.0);
    for (size_t i = 0; i < count; ++i)
        sum += P.coeff(i) * cpow_int({re[i], im[i]}, P.degree);
    return sum;
}

double zonal_abs_sum(const ZonalPolynomial& P, std::span<const double> z, double degree) {
    check_point(P, z);
    const double k = degree < 0.0 ? static_cast<double>(P.degree) : degree;
    const size_t count = P.size();
    std::vector<double> abs2(count);
    kernels::active().abs2_batch(z.data(), P.centers.data(), count, P.cdim, abs2.data());
    double sum = 0.0;
    for (size_t i = 0; i < count; ++i) {
        if (abs2[i] <= 0.0) {
            if (k == 0.0) sum += std::abs(P.coeff(i));
            continue;
        }
        sum += std::abs(P.coeff(i)) * std::exp(0.5 * k * std::log(std::min(abs2[i], 1.0)));
    }
    return sum;
}

double coeff_upper_bound(const ZonalPolynomial& P) {
    double s = 0.0;
    for (size_t i = 0; i < P.size(); ++i) s += std::abs(P.coeff(i));
    return s;
}

namespace {

// d|P|^2 at xi, as a real gradient over the 2n interleaved coordinates.
// With G_t = conj(P) * dP/dz_t: grad_x = 2 Re G_t, grad_y = -2 Im G_t.
void abs2_gradient(const ZonalPolynomial& P, std::span<const double> z, double* grad) {
    const size_t count = P.size();
    std::vector<double> re(count), im(count);
    kernels::active().inner_batch(z.data(), P.centers.data(), count, P.cdim, re.data(),
                                  im.data());
    std::complex<double> value(0.0, 0.0);
    std::vector<std::complex<double>> pw(count);
    for (size_t i = 0; i < count; ++i) {
        std::complex<double> ip(re[i], im[i]);
        std::complex<double> low =
            P.degree == 0 ? std::complex<double>(0.0, 0.0) : cpow_int(ip, P.degree - 1);
        pw[i] = P.coeff(i) * static_cast<double>(P.degree) * low;
        value += P.coeff(i) * (P.degree == 0 ? std::complex<double>(1.0, 0.0) : low * ip);
    }
    const std::complex<double> pbar = std::conj(value);
    for (size_t t = 0; t < P.cdim; ++t) {
        std::complex<double> g(0.0, 0.0);
        for (size_t i = 0; i < count; ++i) {
            const double zr = P.centers[i * 2 * P.cdim + 2 * t];
            const double zi = P.centers[i * 2 * P.cdim + 2 * t + 1];
            g += pw[i] * std::complex<double>(zr, -zi);  // conj(zeta_t)
        }
        g *= pbar;
        grad[2 * t] = 2.0 * g.real();
        grad[2 * t + 1] = -2.0 * g.imag();
    }
}

}  // namespace

SupNormEstimate sup_norm(const ZonalPolynomial& P, size_t samples, size_t polish_iters,
                         uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("sup_norm: samples must be >= 1");
    const size_t dim = 2 * P.cdim;

    const size_t kBlock = 512;
    const size_t n_blocks = (samples + kBlock - 1) / kBlock;
    std::vector<double> best_val(n_blocks, -1.0);
    std::vector<std::vector<double>> best_pt(n_blocks);

    parallel_blocks(samples, kBlock, [&](size_t b, size_t begin, size_t end) {
        std::vector<double> pt(dim);
        double bv = -1.0;
        std::vector<double> bp(dim, 0.0);
        for (size_t i = begin; i < end; ++i) {
            Rng rng(mix_seed(seed, 0x7375706eULL, i));
            rng.unit_vector(pt.data(), P.cdim);
            const double v = std::abs(eval_zonal(P, pt));
            if (v > bv) {
                bv = v;
                bp = pt;
            }
        }
        best_val[b] = bv;
        best_pt[b] = std::move(bp);
    });

    size_t best_b = 0;
    for (size_t b = 1; b < n_blocks; ++b)
        if (best_val[b] > best_val[best_b]) best_b = b;

    std::vector<double> x = best_pt[best_b];
    double fx = best_val[best_b];

    // projected ascent with backtracking; the step is scaled by the degree
    // since |P| oscillates on an angular scale ~ 1/k along the sphere
    double step = 0.5 / (static_cast<double>(P.degree) + 1.0);
    std::vector<double> grad(dim), trial(dim);
    for (size_t it = 0; it < polish_iters; ++it) {
        abs2_gradient(P, x, grad.data());
        double dot = 0.0;
        for (size_t t = 0; t < dim; ++t) dot += grad[t] * x[t];
        double gnorm2 = 0.0;
        for (size_t t = 0; t < dim; ++t) {
            grad[t] -= dot * x[t];
            gnorm2 += grad[t] * grad[t];
        }
        if (gnorm2 < 1e-30) break;
        const double gnorm = std::sqrt(gnorm2);
        bool improved = false;
        for (int back = 0; back < 8; ++back) {
            double norm2 = 0.0;
            for (size_t t = 0; t < dim; ++t) {
                trial[t] = x[t] + step * grad[t] / gnorm;
                norm2 += trial[t] * trial[t];
            }
            const double inv = 1.0 / std::sqrt(norm2);
            for (size_t t = 0; t < dim; ++t) trial[t] *= inv;
            const double ft = std::abs(eval_zonal(P, trial));
            if (ft > fx) {
                x = trial;
                fx = ft;
                step *= 1.3;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved && step < 1e-18) break;
    }
    return {fx, std::move(x)};
}

double zonal_sum_bound(size_t n, double delta, double k) {
    if (n < 1) throw std::invalid_argument("zonal_sum_bound: n must be >= 1");
    if (!(delta > 0.0) || !(k >= 1.0))
        throw std::invalid_argument("zonal_sum_bound: need delta > 0, k >= 1");
    const double c = 0.5 * delta * delta * k;
    const double expo = 2.0 * static_cast<double>(n) - 2.0;
    double sum = 1.0;
    for (long long m = 1; m <= 20'000'000; ++m) {
        const double md = static_cast<double>(m);
        const double log_t = expo * std::log(md + 2.0) - md * md * c;
        const double t = std::exp(log_t);
        sum += t;
        if (!std::isfinite(sum)) return std::numeric_limits<double>::infinity();
        // consecutive-term ratio; decreasing in m, so once below 1 it caps a
        // geometric tail
        const double q =
            std::pow((md + 3.0) / (md + 2.0), expo) * std::exp(-(2.0 * md + 1.0) * c);
        if (q < 1.0) {
            const double tail = t * q / (1.0 - q);
            if (tail < 1e-15 * sum) return sum + tail;
        }
    }
    return std::numeric_limits<double>::infinity();
}

HadamardCheck check_hadamard(const GapSeries& f) {
    HadamardCheck h;
    if (f.terms.size() < 2) {
        h.is_gap = true;
        h.c = std::numeric_limits<double>::infinity();
        return h;
    }
    double c = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < f.terms.size(); ++i) {
        if (f.terms[i + 1].degree <= f.terms[i].degree)
            throw std::invalid_argument("gap series: degrees must strictly increase");
        c = std::min(c, static_cast<double>(f.terms[i + 1].degree) /
                            static_cast<double>(f.terms[i].degree));
    }
    h.c = c;
    h.is_gap = c > 1.0;
    return h;
}

namespace {

double term_upper(const GapTerm& t) {
    return t.supnorm_hint ? *t.supnorm_hint : coeff_upper_bound(t.poly);
}

}  // namespace

SeriesValue eval_series(const GapSeries& f, std::span<const double> z, double tol) {
    (void)tol;  // the caller compares tail_bound against its own tolerance
    SeriesValue out;
    if (f.terms.empty()) return out;
    const double zn = std::sqrt(norm2_of(z));
    if (zn >= 1.0) throw std::domain_error("eval_series: need |z| < 1");

    for (const auto& t : f.terms) out.value += eval_zonal(t.poly, z);

    double ratio = f.gap_ratio.value_or(0.0);
    if (ratio <= 1.0) {
        if (f.terms.size() < 2) return out;  // finite series, nothing to extrapolate
        ratio = check_hadamard(f).c;
        if (!(ratio > 1.0)) {
            out.tail_bound = std::numeric_limits<double>::infinity();
            return out;
        }
    }

    double u_max = 0.0;
    for (const auto& t : f.terms) u_max = std::max(u_max, term_upper(t));
    const double n_last = static_cast<double>(f.terms.back().degree);
    if (zn == 0.0) return out;
    const double log_z = std::log(zn);
    // degrees beyond the last stored one satisfy m_i >= n_last * ratio^i and
    // ratio^i >= ratio * (1 + (i-1)(ratio-1)), giving a geometric majorant
    const double rho = std::exp(n_last * ratio * (ratio - 1.0) * log_z);
    const double first = std::exp(n_last * ratio * log_z);
    out.tail_bound = u_max * first / (1.0 - rho);
    return out;
}

Profile membership_profile(const GapSeries& f, const NormalWeight& w,
                           const MembershipOptions& opt) {
    const auto had = check_hadamard(f);
    if (!had.is_gap)
        throw std::invalid_argument("membership_profile: series lacks Hadamard gaps");
    if (f.terms.empty()) throw std::invalid_argument("membership_profile: empty series");

    Profile prof;
    prof.little_threshold = opt.little_threshold;
    prof.rows.reserve(f.terms.size());
    for (size_t k = 0; k < f.terms.size(); ++k) {
        const auto& t = f.terms[k];
        const double mu = t.degree <= 1
                              ? w.eval(0.0)
                              : w.eval_one_minus(1.0 / static_cast<double>(t.degree));
        double up = term_upper(t);
        double lo;
        if (t.supnorm_hint) {
            lo = *t.supnorm_hint;
        } else {
            lo = sup_norm(t.poly, opt.supnorm_samples, opt.supnorm_polish,
                          mix_seed(opt.seed, k))
                     .lower;
        }
        prof.rows.push_back({t.degree, mu * lo, mu * up});
    }

    double sup_up = 0.0, min_up = std::numeric_limits<double>::infinity();
    for (const auto& r : prof.rows) {
        sup_up = std::max(sup_up, r.a_upper);
        min_up = std::min(min_up, r.a_upper);
    }
    prof.sup_upper = sup_up;

    const size_t K = prof.rows.size();
    const size_t tail_start = K - (K + 2) / 3;
    bool noninc = true, nondec = true;
    constexpr double tol = 1e-9;
    for (size_t k = std::max<size_t>(tail_start, 1); k < K; ++k) {
        const double prev = prof.rows[k - 1].a_upper;
        const double cur = prof.rows[k].a_upper;
        if (cur > prev * (1.0 + tol)) noninc = false;
        if (cur < prev * (1.0 - tol)) nondec = false;
    }
    if (noninc) {
        prof.in_hmu = HmuVerdict::Yes;
    } else if (nondec && prof.rows.back().a_upper >= 2.0 * min_up) {
        prof.in_hmu = HmuVerdict::No;
    } else {
        prof.in_hmu = HmuVerdict::ReportedSup;
    }

    bool little = true;
    for (size_t k = tail_start; k < K; ++k)
        if (!(prof.rows[k].a_upper < opt.little_threshold)) little = false;
    prof.in_little = little ? LittleVerdict::Yes : LittleVerdict::No;
    return prof;
}

double cauchy_coefficient_bound(double norm_f, const NormalWeight& w, uint64_t k, double r) {
    if (!(r > 0.0 && r < 1.0))
        throw std::domain_error("cauchy_coefficient_bound: r outside (0,1)");
    if (k < 1) throw std::invalid_argument("cauchy_coefficient_bound: k must be >= 1");
    double rk;
    if (k <= 1024) {
        rk = 1.0;
        double base = r;
        uint64_t e = k;
        while (e) {
            if (e & 1) rk *= base;
            base *= base;
            e >>= 1;
        }
    } else {
        rk = std::exp(static_cast<double>(k) * std::log(r));
    }
    return norm_f / (rk * w.eval(r));
}

double cauchy_worst_constant(uint64_t k) {
    if (k < 2) throw std::invalid_argument("cauchy_worst_constant: k must be >= 2");
    const double base = 1.0 - 1.0 / static_cast<double>(k);
    double acc = 1.0, b = base;
    uint64_t e = k;
    while (e) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return 1.0 / acc;
}

double coefficient_bound_patched(double norm_f, double mu0_m1) {
    return std::max(mu0_m1, 4.0 * norm_f);
}

}  // namespace ballgap
