#pragma once

#include "ballgap/weights.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ballgap {

// Homogeneous polynomial of degree k in zonal form,
//   P(z) = sum_zeta c_zeta <z, zeta>^k,
// over unit-norm centers zeta (2n interleaved reals per row).
struct ZonalPolynomial {
    uint64_t degree = 0;
    size_t cdim = 0;
    std::vector<double> centers;                // count * 2*cdim
    std::vector<std::complex<double>> coeffs;   // empty = all ones

    size_t size() const { return cdim == 0 ? 0 : centers.size() / (2 * cdim); }
    std::complex<double> coeff(size_t i) const {
        return coeffs.empty() ? std::complex<double>(1.0, 0.0) : coeffs[i];
    }
};

// z to an integer power by repeated squaring (stable for the degree range we
// evaluate directly; magnitudes-only paths go through logs instead).
std::complex<double> cpow_int(std::complex<double> z, uint64_t k);

// Term-by-term evaluation at |z| <= 1. Degree 0 returns the coefficient sum.
std::complex<double> eval_zonal(const ZonalPolynomial& P, std::span<const double> z);

// sum_zeta |c_zeta| |<z,zeta>|^k with the powers taken in the log domain, so
// arbitrarily large degrees are fine. This dominates |P(z)| and is the
// quantity the separated-set sum bound actually controls.
double zonal_abs_sum(const ZonalPolynomial& P, std::span<const double> z, double degree = -1.0);

// Triangle-inequality upper bound sum |c_zeta| (each |<z,zeta>| <= 1).
double coeff_upper_bound(const ZonalPolynomial& P);

struct SupNormEstimate {
    double lower = 0.0;           // certified lower bound on sup_S |P|
    std::vector<double> argmax;   // attaining point
};

// Lower bound on M_k = sup_S |P|: max over uniform samples, then projected
// gradient ascent on the sphere from the best sample. Never exceeds the true
// sup.
SupNormEstimate sup_norm(const ZonalPolynomial& P, size_t samples, size_t polish_iters,
                         uint64_t seed = 1);

// Upper bound for zonal sums over a delta-separated center set of degree k:
//   1 + sum_{m>=1} (m+2)^{2n-2} exp(-m^2 delta^2 k / 2),
// evaluated with a certified geometric tail (cut once the remainder is below
// 1e-15 of the partial sum; the tail bound is added to the result).
double zonal_sum_bound(size_t n, double delta, double k);

struct GapTerm {
    uint64_t degree = 0;
    ZonalPolynomial poly;
    std::optional<double> supnorm_hint;  // exact M_{n_k} when known
};

// Lacunary series sum_k P_{n_k} with strictly increasing degrees. gap_ratio,
// when present, asserts n_{k+1}/n_k >= gap_ratio beyond the stored terms.
struct GapSeries {
    std::vector<GapTerm> terms;
    std::optional<double> gap_ratio;
};

struct HadamardCheck {
    bool is_gap = false;
    double c = 0.0;  // min of n_{k+1}/n_k over stored pairs; +inf for < 2 terms
};

HadamardCheck check_hadamard(const GapSeries& f);

struct SeriesValue {
    std::complex<double> value{0.0, 0.0};
    double tail_bound = 0.0;
};

// Sums the stored terms and bounds the omitted remainder assuming the stored
// gap pattern continues (degrees growing by the certified ratio, sup norms no
// larger than the largest stored upper bound). With one stored term and no
// ratio certificate there is nothing to extrapolate and the tail is 0. The
// tail bound is honest: it may exceed `tol`, in which case the caller knows
// the stored terms are insufficient at this |z|.
SeriesValue eval_series(const GapSeries& f, std::span<const double> z, double tol);

enum class HmuVerdict { Yes, No, ReportedSup };
enum class LittleVerdict { Yes, No };

struct ProfileRow {
    uint64_t degree = 0;
    double a_lower = 0.0;  // mu(1 - 1/n_k) * (lower bound on M_{n_k})
    double a_upper = 0.0;
};

struct Profile {
    std::vector<ProfileRow> rows;
    HmuVerdict in_hmu = HmuVerdict::ReportedSup;
    LittleVerdict in_little = LittleVerdict::No;
    double sup_upper = 0.0;        // sup over stored a_k upper bounds
    double little_threshold = 0.1;
};

struct MembershipOptions {
    double little_threshold = 0.1;
    size_t supnorm_samples = 4000;
    size_t supnorm_polish = 60;
    uint64_t seed = 1;
};

// Bracketed membership profile a_k = mu(1-1/n_k) M_{n_k} for a gap series.
// Verdicts over finitely many terms are trend heuristics; the raw sequence is
// always returned so they can be audited. Degenerate degrees <= 1 use mu(0).
Profile membership_profile(const GapSeries& f, const NormalWeight& w,
                           const MembershipOptions& opt = {});

// ||f|| / (r^k mu(r)) — the radius-r coefficient bound for degree k.
double cauchy_coefficient_bound(double norm_f, const NormalWeight& w, uint64_t k, double r);

// (1 - 1/k)^{-k}: the constant appearing at r = 1 - 1/k. Equals 4 at k = 2
// and decreases toward e.
double cauchy_worst_constant(uint64_t k);

// max(mu(0) * M_1, 4 * ||f||) — the small-degree patch of the coefficient
// bound.
double coefficient_bound_patched(double norm_f, double mu0_m1);

}  // namespace ballgap
