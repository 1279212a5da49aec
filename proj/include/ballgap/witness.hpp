#pragma once

#include "ballgap/polyseries.hpp"
#include "ballgap/sphere.hpp"
#include "ballgap/weights.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ballgap {

// Growth-rate witness machinery: two ladders of lacunary families built on
// maximal separated sets,
//   g_{i,j}(z) = sum_v P_{i,vM+j}(z) / mu(1 - p^{-(vM+j)}),   deg p^{vM+j}
//   h_{i,j}(z) = sum_v Q_{i,vM+j}(z) / mu(1 - 1/q_{vM+j}),    deg q_{vM+j}
// with q_k the least integer >= p^{k+1/2}, P/Q zonal sums over the color
// classes of maximal packings, and certified evaluation machinery for the
// lower bound  sum |g_{i,j}(z)| >= C / mu(|z|)  on dyadic shells.

enum class WitnessMode { Strict, Desk, Micro };
enum class LadderKind { G, H };

struct WitnessParams {
    size_t n = 2;          // complex dimension, >= 2
    double A = 0.3;        // separation shape parameter in (0,1]
    int p = 6;             // lacunary base, >= 2
    int M = 1;             // color count / index period, >= 1
    WitnessMode mode = WitnessMode::Desk;
    int V = 0;             // levels v = 0..V
    NormalWeight weight = NormalWeight::power(0.5, 0.4, 0.6, 0.5);
};

// Largest grid multiple A with sum_{m>=1} (m+2)^{2n-2} e^{-m^2/(2A^2)} <= bound.
// The sum is increasing in A, so the scan answer is unique. The printed
// inequality starts this sum at m = 0, which is impossible (the first term
// alone is 2^{2n-2}); the m >= 1 form is what the zonal bound actually uses.
double select_A(size_t n, double grid, double bound = 1.0 / 27.0);

struct PConstraintMask {
    bool use_delta = true;  // 1 - 1/p >= delta0
    bool use_power = true;  // 1/3 <= (1-1/p)^p <= 1/2
    bool use_alpha = true;  // 1/(p^{alpha M} - 1) <= c_alpha
    bool use_beta = true;   // p^{beta M} 2^{-p^{M-1/2}} / (1 - ...) <= c_beta
};

struct PConstraintEval {
    bool delta_ok = false, power_ok = false, alpha_ok = false, beta_ok = false;
    bool all(const PConstraintMask& m) const {
        return (!m.use_delta || delta_ok) && (!m.use_power || power_ok) &&
               (!m.use_alpha || alpha_ok) && (!m.use_beta || beta_ok);
    }
};

PConstraintEval eval_p_constraints(const NormalWeight& w, int M, long long p,
                                   double c_alpha = 1.0 / 200.0, double c_beta = 1.0 / 200.0);

// Smallest integer p >= 2 satisfying the masked constraints; scans upward and
// throws (naming the constraints still failing) past 10^6.
int select_p(const NormalWeight& w, int M, PConstraintMask mask = {},
             double c_alpha = 1.0 / 200.0, double c_beta = 1.0 / 200.0);

// Empirical color count M_n(A/2): for each probe delta, decompose a maximal
// (A/2 delta)-separated set into delta-separated classes and report the
// largest class count seen.
int estimate_M(size_t n, double A, const std::vector<double>& probe_seps, uint64_t seed,
               size_t budget = 800);

// delta_{j,v} = 1 / (A p^{(vM+j)/2}); satisfies A^2 p^{vM+j} delta^2 = 1 and
// the step recursion delta_{j,v} = delta_{j,v-1} / p^{M/2}.
double delta_schedule(double A, int p, int M, int j, int v);

// i-fold iterate of the cycle tau(j) = j+1 (j < M), tau(M) = 1.
int tau_power(int M, long long i, int j);

// Degree of ladder level e: p^e for G, ceil(p^{e+1/2}) for H. Exact integers
// where they fit; otherwise certified long-double enclosures (the ceil
// ambiguity is folded into hi for the H kind).
struct DegreeVal {
    long double lo = 0.0L;
    long double hi = 0.0L;
    bool exact = false;
    uint64_t exact_value = 0;
};

DegreeVal ladder_degree(LadderKind kind, int p, long long e);

struct WitnessLevel {
    LadderKind kind = LadderKind::G;
    int j = 0, v = 0;
    long long e = 0;  // vM + j
    DegreeVal degree;
    double delta = 0.0;      // schedule value (delta_{j,v} or eps_{j,v})
    double delta_eff = 0.0;  // min(delta, 1)
    bool degenerate = false;
    bool constructed = false;
    std::string skip_reason;
    SeparatedSet gamma{0, 1.0, 0};           // maximal at A*delta_eff/2
    std::vector<SeparatedSet> classes;       // decomposition at delta_eff
    std::vector<int> class_of;               // point -> class
    bool ownership_complete = true;          // class count <= M
    double lemma_bound = 0.0;                // separated-sum bound at (delta_eff, degree)
    double sampled_max = 0.0;                // sampled max of the class abs-sums
    bool le2 = false;
};

struct WitnessFamily {
    WitnessParams params;
    uint64_t seed = 0;
    size_t budget = 0;
    std::vector<WitnessLevel> g_levels, h_levels;  // index (j-1)*(V+1) + v

    const WitnessLevel& level(LadderKind kind, int j, int v) const;
    WitnessLevel& level(LadderKind kind, int j, int v);
    // true when every level v = 0..V of ladder (kind, j) is constructed with
    // small exact degrees, so the series can be evaluated with full complex
    // arithmetic
    bool direct_available(LadderKind kind, int j, uint64_t max_degree = 10000) const;
};

// n < 2 is rejected: the pseudo-metric collapses on the disk and the
// construction needs genuinely separated directions.
WitnessFamily build_witness_family(const WitnessParams& params, size_t cardinality_budget,
                                   uint64_t seed);

struct LevelUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoundParts {
    double I1_lower = 0.0;
    double I2_upper = 0.0;
    double I3_upper = 0.0;
    int i_index = 0;       // 1-based series index owning the nearest center
    size_t zeta_index = 0; // index of that center in the level's point set
};

struct CertifiedBound {
    double bound = 0.0;  // I1_lower - I2_upper - I3_upper; may be <= 0
    BoundParts parts;
};

// Certified lower bound on |g_{i,j}(z eta)| (or |h_{i,j}|) for the series
// owning the center nearest to eta, valid whenever z_modulus lies in the
// level's shell. Everything runs on magnitudes in the log domain; no complex
// phase enters, so arbitrarily large degrees are fine.
CertifiedBound certified_lower_bound(const WitnessFamily& fam, LadderKind kind, double z_modulus,
                                     int j, int v, std::span<const double> eta);

// Full-precision complex evaluation of one series (all ladder levels must be
// constructed with directly evaluable degrees).
std::complex<double> eval_series_direct(const WitnessFamily& fam, LadderKind kind, int i, int j,
                                        std::span<const double> z);

// sum_{i,j} |series_{i,j}(z)| over the requested ladder.
double direct_sum_abs(const WitnessFamily& fam, LadderKind kind, std::span<const double> z);

struct ShellSample {
    double r = 0.0;
    double mu_cert = 0.0;    // mu(r) * certified bound
    double mu_direct = 0.0;  // mu(r) * sum_{i,j} |series(z)|, when available
};

struct ShellRow {
    LadderKind kind = LadderKind::G;
    int j = 0, v = 0;
    long long e = 0;
    double shell_lo = 0.0, shell_hi = 0.0;
    bool verified = false;
    std::string flag;  // e.g. "unverified: cardinality budget"
    size_t samples = 0;
    double min_mu_cert = 0.0;
    double min_mu_direct = 0.0;
    bool direct_available = false;
    double argmin_r = 0.0;
    std::vector<double> argmin_eta;
    double strict_target = 0.0;      // 1/(20 p^{beta/2}) on G rows
    bool meets_strict_target = false;
    // samples where the recomputed I1 fell below the cited 2/(27 mu(1-1/deg))
    // chain constant (expected 0 whenever the strict constants hold)
    size_t i1_below_chain = 0;
    std::vector<ShellSample> trace;  // per-sample values for plot tables
};

struct GrowthReport {
    std::vector<ShellRow> rows;
    double C_cert = 0.0;  // min over verified rows of min_mu_cert
    double C_emp = 0.0;   // min over rows with direct evaluation of min_mu_direct
    bool any_direct = false;
    bool all_requested_verified = false;
};

// For each requested (j,v): samples the g-shell [1-p^{-e}, 1-p^{-e-1/2}]
// against the G ladder and the h-shell [1-p^{-e-1/2}, 1-p^{-e-1}] against the
// H ladder. Unconstructed levels produce flagged, unverified rows so coverage
// is explicit.
GrowthReport verify_growth(const WitnessFamily& fam,
                           const std::vector<std::pair<int, int>>& shells,
                           size_t samples_per_shell, uint64_t seed);

}  // namespace ballgap
