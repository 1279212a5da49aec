#include "ballgap/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ballgap {

namespace {
constexpr double kMonotoneTol = 1e-12;  // relative; absorbs rounding noise
}

void NormalWeight::validate_common() const {
    if (!(alpha_ > 0.0 && beta_ > 0.0 && alpha_ < beta_))
        throw std::invalid_argument("weight: need 0 < alpha < beta");
    if (!(delta0_ > 0.0 && delta0_ < 1.0))
        throw std::invalid_argument("weight: delta0 must lie in (0,1)");
}

NormalWeight NormalWeight::power(double gamma, double alpha, double beta, double delta0) {
    if (!(gamma > 0.0)) throw std::invalid_argument("weight: power exponent must be positive");
    NormalWeight w;
    w.kind_ = WeightKind::Power;
    w.gamma_ = gamma;
    w.alpha_ = alpha;
    w.beta_ = beta;
    w.delta0_ = delta0;
    w.validate_common();
    return w;
}

NormalWeight NormalWeight::tabulated(std::vector<std::pair<double, double>> points, double alpha,
                                     double beta, double delta0) {
    if (points.size() < 2) throw std::invalid_argument("weight: table needs >= 2 points");
    std::sort(points.begin(), points.end());
    if (points.front().first != 0.0)
        throw std::invalid_argument("weight: table must start at r = 0");
    for (size_t i = 0; i < points.size(); ++i) {
        auto [r, mu] = points[i];
        if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("weight: table r outside [0,1)");
        if (!(mu > 0.0)) throw std::invalid_argument("weight: table values must be positive");
        if (i > 0 && !(r > points[i - 1].first))
            throw std::invalid_argument("weight: duplicate table abscissa");
    }
    NormalWeight w;
    w.kind_ = WeightKind::Tabulated;
    w.alpha_ = alpha;
    w.beta_ = beta;
    w.delta0_ = delta0;
    w.table_ = std::move(points);
    w.validate_common();

    const auto& a = w.table_[w.table_.size() - 2];
    const auto& b = w.table_.back();
    w.tail_slope_ = (std::log(b.second) - std::log(a.second)) /
                    (std::log(1.0 - b.first) - std::log(1.0 - a.first));
    return w;
}

double NormalWeight::eval(double r) const {
    if (!(r >= 0.0 && r < 1.0)) throw std::domain_error("weight: r outside [0,1)");
    return eval_one_minus(1.0 - r);
}

double NormalWeight::eval_one_minus(double x) const {
    if (!(x > 0.0 && x <= 1.0)) throw std::domain_error("weight: gap outside (0,1]");
    if (kind_ == WeightKind::Power) {
        // 1 - r^2 = x (2 - x), computed from the gap to stay exact near r = 1
        return std::pow(x * (2.0 - x), gamma_);
    }
    const double r = 1.0 - x;
    if (r >= table_.back().first) return std::exp(log_mu_at_log_gap(std::log(x)));
    auto it = std::upper_bound(table_.begin(), table_.end(), std::make_pair(r, 0.0));
    if (it == table_.begin()) return table_.front().second;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double t = (r - lo.first) / (hi.first - lo.first);
    return lo.second + t * (hi.second - lo.second);
}

double NormalWeight::log_mu_at_log_gap(double log_x) const {
    if (kind_ == WeightKind::Power) {
        const double x = std::exp(log_x);  // may round to 0; ln(2-x) is still fine
        return gamma_ * (log_x + std::log(2.0 - x));
    }
    const double log_gap_last = std::log(1.0 - table_.back().first);
    if (log_x >= log_gap_last) {
        const double x = std::exp(log_x);
        return std::log(eval_one_minus(x));
    }
    return std::log(table_.back().second) + tail_slope_ * (log_x - log_gap_last);
}

NormalityReport verify_normality(const NormalWeight& w, int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("verify_normality: grid_size must be >= 2");
    NormalityReport rep;
    rep.grid_size = grid_size;

    const double lo = w.delta0();
    const double hi = 1.0 - 1.0 / static_cast<double>(grid_size);
    if (hi <= lo) throw std::invalid_argument("verify_normality: grid too coarse for delta0");

    const int g = grid_size;
    std::vector<double> f_alpha(g), f_beta(g);
    for (int i = 0; i < g; ++i) {
        const double r = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g - 1);
        const double mu = w.eval(r);
        const double one_minus_r2 = (1.0 - r) * (1.0 + r);
        f_alpha[i] = mu / std::pow(one_minus_r2, w.alpha());
        f_beta[i] = mu / std::pow(one_minus_r2, w.beta());
    }

    double worst_a = 0.0, worst_b = 0.0;
    for (int i = 0; i + 1 < g; ++i) {
        worst_a = std::max(worst_a, f_alpha[i + 1] / f_alpha[i] - 1.0);
        worst_b = std::max(worst_b, f_beta[i] / f_beta[i + 1] - 1.0);
    }
    rep.max_alpha_violation = worst_a;
    rep.max_beta_violation = worst_b;
    rep.alpha_ratio_nonincreasing = worst_a <= kMonotoneTol;
    rep.beta_ratio_nondecreasing = worst_b <= kMonotoneTol;

    const int decile = std::max(1, g / 10);
    rep.alpha_trend_to_zero = f_alpha[g - 1] < f_alpha[g - decile];
    rep.beta_trend_to_infinity = f_beta[g - 1] > f_beta[g - decile];

    rep.pass = rep.alpha_ratio_nonincreasing && rep.beta_ratio_nondecreasing &&
               rep.alpha_trend_to_zero && rep.beta_trend_to_infinity;
    return rep;
}

RatioBracket weight_ratio_bracket(const NormalWeight& w, int p, int M, int j, long long s) {
    if (p < 2 || M < 1 || s < 0) throw std::invalid_argument("weight_ratio_bracket: bad indices");
    const double e1 = static_cast<double>(s) * M + j;
    const double e2 = e1 + static_cast<double>(M);
    const double log_p = std::log(static_cast<double>(p));
    const double gap1 = std::exp(-e1 * log_p);
    if (1.0 - gap1 < w.delta0())
        throw std::domain_error("weight_ratio_bracket: 1 - p^{-(sM+j)} below delta0");

    RatioBracket b;
    b.lower = std::pow(static_cast<double>(p), M * w.alpha());
    b.upper = std::pow(static_cast<double>(p), M * w.beta());
    b.ratio = std::exp(w.log_mu_at_log_gap(-e1 * log_p) - w.log_mu_at_log_gap(-e2 * log_p));
    b.pass = b.lower <= b.ratio && b.ratio <= b.upper;
    return b;
}

}  // namespace ballgap
