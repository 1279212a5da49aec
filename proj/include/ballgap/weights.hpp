#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace ballgap {

enum class WeightKind { Power, Tabulated };

// Radial weight mu on [0,1) with declared normality parameters (alpha, beta,
// delta0): mu(r)/(1-r^2)^alpha should be nonincreasing to 0 and
// mu(r)/(1-r^2)^beta nondecreasing to infinity on [delta0, 1). The parameters
// are user-declared and validated by verify_normality, never inferred.
//
// Kinds:
//   Power      mu(r) = (1 - r^2)^gamma, gamma > 0
//   Tabulated  monotone-r grid of (r, mu) pairs, piecewise-linear in between,
//              power-law extrapolation beyond the last grid point (slope
//              fitted to the last segment in log(1-r) / log(mu) coordinates)
class NormalWeight {
  public:
    static NormalWeight power(double gamma, double alpha, double beta, double delta0);
    static NormalWeight tabulated(std::vector<std::pair<double, double>> points, double alpha,
                                  double beta, double delta0);

    double eval(double r) const;            // mu(r), r in [0,1)
    double eval_one_minus(double x) const;  // mu(1-x), x in (0,1]; exact near the edge
    // ln mu(1-x) given ln x; works for gaps far below DBL_MIN. Used by the
    // closed-form lacunary tail bounds where 1 - p^{-e} is not representable.
    double log_mu_at_log_gap(double log_x) const;

    WeightKind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    double delta0() const { return delta0_; }
    const std::vector<std::pair<double, double>>& table() const { return table_; }

  private:
    NormalWeight() = default;
    void validate_common() const;

    WeightKind kind_ = WeightKind::Power;
    double gamma_ = 0.0;
    double alpha_ = 0.0, beta_ = 0.0, delta0_ = 0.0;
    std::vector<std::pair<double, double>> table_;  // sorted by r, starts at r = 0
    double tail_slope_ = 0.0;                       // d ln(mu) / d ln(1-r) on the last segment
};

struct NormalityReport {
    bool alpha_ratio_nonincreasing = false;
    bool beta_ratio_nondecreasing = false;
    bool alpha_trend_to_zero = false;
    bool beta_trend_to_infinity = false;
    bool pass = false;
    double max_alpha_violation = 0.0;  // worst relative increase of mu/(1-r^2)^alpha
    double max_beta_violation = 0.0;   // worst relative decrease of mu/(1-r^2)^beta
    int grid_size = 0;
};

// Samples [delta0, 1 - 1/grid_size] on a uniform grid and checks both
// monotonicity conditions (adjacent-ratio violations below 1e-12 relative are
// floating-point noise and ignored) plus the limit trends (sign of the
// last-decile slope).
NormalityReport verify_normality(const NormalWeight& w, int grid_size);

// Eq-style bracket for the dyadic weight ratio: with r_s = 1 - p^{-(sM+j)},
// normality pins mu(r_s)/mu(r_{s+1}) between p^{M alpha} and p^{M beta} (up to
// the (1+r) correction, which the verdict absorbs by direct evaluation).
// Requires r_s >= delta0.
struct RatioBracket {
    double lower = 0.0;
    double ratio = 0.0;
    double upper = 0.0;
    bool pass = false;
};

RatioBracket weight_ratio_bracket(const NormalWeight& w, int p, int M, int j, long long s);

}  // namespace ballgap
