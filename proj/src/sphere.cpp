#include "ballgap/sphere.hpp"

#include "ballgap/kernels.hpp"
#include "ballgap/parallel.hpp"
#include "ballgap/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ballgap {

namespace {
// one shared comparison slack so construction, coloring and invariant checks
// agree bit-for-bit about which pairs count as separated
constexpr double kSepEps = 1e-12;
}  // namespace

double pseudo_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() % 2 != 0)
        throw std::invalid_argument("pseudo_distance: dimension mismatch");
    const size_t cdim = x.size() / 2;
    double abs2 = 0.0;
    kernels::active().abs2_batch(x.data(), y.data(), 1, cdim, &abs2);
    return std::sqrt(std::max(0.0, 1.0 - abs2));
}

bool SeparatedSet::check_pairwise(double* worst) const {
    const size_t n = size();
    const double thr = 1.0 - separation_ * separation_ + kSepEps;
    double worst_abs2 = 0.0;
    bool ok = true;
    if (n < 2) {
        if (worst) *worst = 1.0;
        return true;
    }
    const size_t stride = 2 * cdim_;
    if (n <= 10000) {
        std::vector<double> buf(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) {
            kernels::active().abs2_batch(point(i), pts_.data() + (i + 1) * stride, n - 1 - i,
                                         cdim_, buf.data());
            for (size_t k = 0; k < n - 1 - i; ++k) {
                if (buf[k] > thr) ok = false;
                worst_abs2 = std::max(worst_abs2, buf[k]);
            }
        }
    } else {
        Rng rng(mix_seed(seed_, 0x70617773ULL));
        std::vector<double> buf(1);
        for (size_t trial = 0; trial < 2'000'000; ++trial) {
            size_t i = static_cast<size_t>(rng.uniform01() * n);
            size_t j = static_cast<size_t>(rng.uniform01() * n);
            if (i == j || i >= n || j >= n) continue;
            kernels::active().abs2_batch(point(i), point(j), 1, cdim_, buf.data());
            if (buf[0] > thr) ok = false;
            worst_abs2 = std::max(worst_abs2, buf[0]);
        }
    }
    if (worst) *worst = std::sqrt(std::max(0.0, 1.0 - worst_abs2));
    return ok;
}

SeparatedSet maximal_separated_set(size_t n, double sep, uint64_t seed, size_t budget,
                                   size_t max_points) {
    if (n < 1) throw std::invalid_argument("maximal_separated_set: n must be >= 1");
    if (!(sep > 0.0 && sep <= 1.0))
        throw std::invalid_argument("maximal_separated_set: sep must lie in (0,1]");
    if (budget < 1) throw std::invalid_argument("maximal_separated_set: budget must be >= 1");

    SeparatedSet set(n, sep, seed);
    Rng rng(mix_seed(seed, 0x7061636bULL));
    std::vector<double> cand(2 * n);

    rng.unit_vector(cand.data(), n);
    set.append(cand.data());
    if (n == 1) {
        // |<xi, zeta>| = 1 for any two unit scalars, so d vanishes identically
        set.set_degenerate(true);
        set.set_maximal(true);
        return set;
    }

    const double thr = 1.0 - sep * sep + kSepEps;
    // sep = 1 demands exact pairwise orthogonality, which uniform candidates
    // hit with probability zero; proposals are projected onto the orthogonal
    // complement of the accepted frame instead (still greedy, still seeded)
    const bool orthogonal_frame = sep == 1.0;
    std::vector<double> abs2;
    size_t rejections = 0;
    while (rejections < budget) {
        if (set.size() >= max_points) return set;  // budget-capped, not maximal
        rng.unit_vector(cand.data(), n);
        if (orthogonal_frame) {
            for (size_t i = 0; i < set.size(); ++i) {
                const double* zeta = set.point(i);
                double ip_re = 0.0, ip_im = 0.0;
                kernels::active().inner_batch(cand.data(), zeta, 1, n, &ip_re, &ip_im);
                for (size_t t = 0; t < n; ++t) {
                    const double zr = zeta[2 * t], zi = zeta[2 * t + 1];
                    cand[2 * t] -= ip_re * zr - ip_im * zi;
                    cand[2 * t + 1] -= ip_re * zi + ip_im * zr;
                }
            }
            double norm2 = 0.0;
            for (double v : cand) norm2 += v * v;
            if (norm2 < 1e-16) {  // accepted frame already spans C^n
                ++rejections;
                continue;
            }
            const double inv = 1.0 / std::sqrt(norm2);
            for (double& v : cand) v *= inv;
        }
        abs2.resize(set.size());
        kernels::active().abs2_batch(cand.data(), set.raw().data(), set.size(), n, abs2.data());
        bool ok = true;
        for (double a : abs2) {
            if (a > thr) {
                ok = false;
                break;
            }
        }
        if (ok) {
            set.append(cand.data());
            rejections = 0;
        } else {
            ++rejections;
        }
    }
    set.set_maximal(true);
    return set;
}

std::vector<int> greedy_coloring(const SeparatedSet& g, double target) {
    if (!(target > 0.0 && target <= 1.0))
        throw std::invalid_argument("decompose_separated: target must lie in (0,1]");
    if (target < g.separation())
        throw std::invalid_argument("decompose_separated: target below input separation");

    const size_t n = g.size();
    const size_t cdim = g.cdim();
    // conflict iff abs2 > thr (d < target); same slack as the pairwise check
    const double conflict_thr = 1.0 - target * target + kSepEps;

    std::vector<int> color(n, -1);
    int n_colors = 0;
    std::vector<double> abs2(n);
    std::vector<char> used;
    for (size_t i = 0; i < n; ++i) {
        used.assign(static_cast<size_t>(n_colors) + 1, 0);
        if (i > 0)
            kernels::active().abs2_batch(g.point(i), g.raw().data(), i, cdim, abs2.data());
        for (size_t j = 0; j < i; ++j)
            if (abs2[j] > conflict_thr) used[static_cast<size_t>(color[j])] = 1;
        int c = 0;
        while (used[static_cast<size_t>(c)]) ++c;
        color[i] = c;
        n_colors = std::max(n_colors, c + 1);
    }
    return color;
}

std::vector<SeparatedSet> decompose_separated(const SeparatedSet& g, double target) {
    const std::vector<int> color = greedy_coloring(g, target);
    int n_colors = 0;
    for (int c : color) n_colors = std::max(n_colors, c + 1);

    std::vector<SeparatedSet> classes;
    classes.reserve(static_cast<size_t>(n_colors));
    for (int c = 0; c < n_colors; ++c) {
        classes.emplace_back(g.cdim(), target, g.seed());
        classes.back().set_degenerate(g.degenerate());
    }
    for (size_t i = 0; i < g.size(); ++i)
        classes[static_cast<size_t>(color[i])].append(g.point(i));
    return classes;
}

CoverReport covering_check(const SeparatedSet& g, double radius, size_t samples, uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("covering_check: samples must be >= 1");
    if (!(radius > 0.0 && radius <= 1.0))
        throw std::invalid_argument("covering_check: radius must lie in (0,1]");
    if (g.size() == 0) throw std::invalid_argument("covering_check: empty set");

    const double thr = 1.0 - radius * radius;  // covered iff max abs2 > thr (d < radius)
    const size_t kBlock = 512;
    const size_t n_blocks = (samples + kBlock - 1) / kBlock;
    std::vector<size_t> covered(n_blocks, 0);
    std::vector<double> worst(n_blocks, 1.0);  // min over block of max-abs2

    parallel_blocks(samples, kBlock, [&](size_t b, size_t begin, size_t end) {
        std::vector<double> pt(2 * g.cdim());
        double block_min = 1.0;
        size_t block_cov = 0;
        for (size_t i = begin; i < end; ++i) {
            Rng rng(mix_seed(seed, 0x636f7665ULL, i));
            rng.unit_vector(pt.data(), g.cdim());
            double best = kernels::max_abs2_batch(pt.data(), g.raw().data(), g.size(), g.cdim());
            if (best > thr) ++block_cov;
            block_min = std::min(block_min, best);
        }
        covered[b] = block_cov;
        worst[b] = block_min;
    });

    CoverReport rep;
    rep.samples = samples;
    size_t total = 0;
    double min_abs2 = 1.0;
    for (size_t b = 0; b < n_blocks; ++b) {
        total += covered[b];
        min_abs2 = std::min(min_abs2, worst[b]);
    }
    rep.fraction = static_cast<double>(total) / static_cast<double>(samples);
    rep.worst_nearest = std::sqrt(std::max(0.0, 1.0 - min_abs2));
    return rep;
}

}  // namespace ballgap
