#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ballgap {

// Geometry of the unit sphere S of C^n under the pseudo-metric
//   d(xi, zeta) = (1 - |<xi, zeta>|^2)^{1/2},
// which satisfies the triangle inequality and is unitarily invariant. Points
// are stored as 2n interleaved reals per row. All comparisons against a
// separation threshold are done on |<.,.>|^2 (d >= s iff abs2 <= 1 - s^2), so
// construction and invariant checks share the exact same arithmetic.

double pseudo_distance(std::span<const double> x, std::span<const double> y);

class SeparatedSet {
  public:
    SeparatedSet(size_t cdim, double separation, uint64_t seed)
        : cdim_(cdim), separation_(separation), seed_(seed) {}

    size_t cdim() const { return cdim_; }
    double separation() const { return separation_; }
    uint64_t seed() const { return seed_; }
    bool maximal() const { return maximal_; }
    bool degenerate() const { return degenerate_; }
    void set_maximal(bool m) { maximal_ = m; }
    void set_degenerate(bool d) { degenerate_ = d; }

    size_t size() const { return pts_.empty() ? 0 : pts_.size() / (2 * cdim_); }
    const double* point(size_t i) const { return pts_.data() + i * 2 * cdim_; }
    std::span<const double> point_span(size_t i) const { return {point(i), 2 * cdim_}; }
    const std::vector<double>& raw() const { return pts_; }
    void append(const double* p) { pts_.insert(pts_.end(), p, p + 2 * cdim_); }

    // Pairwise d >= separation, exhaustive for n <= 10^4 points, sampled pairs
    // above. Returns the worst pair distance found through `worst` if given.
    bool check_pairwise(double* worst = nullptr) const;

  private:
    size_t cdim_;
    double separation_;
    uint64_t seed_;
    bool maximal_ = false;
    bool degenerate_ = false;
    std::vector<double> pts_;
};

// Greedy maximal packing: draw uniform points, keep those at d >= sep from
// everything kept so far, stop after `budget` consecutive rejections (or when
// `max_points` is hit, in which case the set is NOT marked maximal). For n=1
// the pseudo-metric vanishes identically and the set degenerates to a flagged
// singleton.
SeparatedSet maximal_separated_set(size_t n, double sep, uint64_t seed, size_t budget,
                                   size_t max_points = SIZE_MAX);

// Greedy coloring of the conflict graph (edge when d < target) in insertion
// order: point i gets the smallest color absent among its already-colored
// neighbors. Requires target >= g.separation().
std::vector<int> greedy_coloring(const SeparatedSet& g, double target);

// Color classes of greedy_coloring, each a `target`-separated set. The
// classes partition the input.
std::vector<SeparatedSet> decompose_separated(const SeparatedSet& g, double target);

struct CoverReport {
    double fraction = 0.0;       // share of samples with d < radius of some point
    double worst_nearest = 0.0;  // largest nearest-distance seen
    size_t samples = 0;
};

CoverReport covering_check(const SeparatedSet& g, double radius, size_t samples,
                           uint64_t seed = 0);

}  // namespace ballgap
