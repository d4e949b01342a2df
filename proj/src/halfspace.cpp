#include "hsprg/halfspace.hpp"

#include "hsprg/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hsprg {

namespace {

constexpr double kUnitRoundoff = 0x1.0p-53;
constexpr std::size_t kMaxTableBits = 20;

void require_finite(const Halfspace& h) {
    for (double w : h.weights) {
        if (!std::isfinite(w)) {
            throw InvalidInput("halfspace weights must be finite");
        }
    }
    if (!std::isfinite(h.theta)) {
        throw InvalidInput("halfspace threshold must be finite");
    }
}

} // namespace

bool Halfspace::is_constant() const {
    return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; });
}

double Halfspace::norm() const {
    double scale = 0.0;
    for (double w : weights) {
        scale = std::max(scale, std::abs(w));
    }
    if (scale == 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (double w : weights) {
        const double r = w / scale;
        sum += r * r;
    }
    return scale * std::sqrt(sum);
}

Halfspace make_halfspace(std::vector<double> weights, double theta) {
    if (weights.empty()) {
        throw InvalidInput("halfspace needs at least one weight");
    }
    Halfspace h{std::move(weights), theta};
    require_finite(h);
    return h;
}

Halfspace normalize(const Halfspace& h) {
    require_finite(h);
    if (h.is_constant()) {
        return h;
    }
    const double norm = h.norm();
    Halfspace out = h;
    for (double& w : out.weights) {
        w /= norm;
    }
    out.theta /= norm;
    return out;
}

bool is_normalized(const Halfspace& h, double tol) {
    double sum = 0.0;
    for (double w : h.weights) {
        sum += w * w;
    }
    return std::abs(sum - 1.0) <= tol;
}

namespace {

// -1, 0 or +1 for the exact real sum of the terms.
int exact_signum(std::span<const double> terms) {
    // Shewchuk's non-overlapping expansion (as in Python's math.fsum): after
    // each step the partials sum exactly to the running total.
    std::vector<double> partials;
    partials.reserve(8);
    for (double x : terms) {
        std::size_t used = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) {
                std::swap(x, y);
            }
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) {
                partials[used++] = lo;
            }
            x = hi;
        }
        partials.resize(used);
        partials.push_back(x);
    }
    for (auto it = partials.rbegin(); it != partials.rend(); ++it) {
        if (*it != 0.0) {
            return *it > 0.0 ? 1 : -1;
        }
    }
    return 0;
}

} // namespace

int exact_sign(std::span<const double> terms) { return exact_signum(terms) >= 0 ? 1 : -1; }

int evaluate(const Halfspace& h, std::span<const std::int8_t> x) {
    if (x.size() != h.dim()) {
        throw InvalidInput("point dimension " + std::to_string(x.size()) + " does not match halfspace dimension " +
                           std::to_string(h.dim()));
    }
    std::vector<double> terms;
    terms.reserve(x.size() + 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] != 1 && x[i] != -1) {
            throw InvalidInput("cube points must have +1/-1 coordinates");
        }
        terms.push_back(x[i] > 0 ? h.weights[i] : -h.weights[i]);
    }
    terms.push_back(-h.theta);
    return exact_sign(terms);
}

std::vector<std::int8_t> mask_to_point(std::uint64_t mask, std::size_t n) {
    std::vector<std::int8_t> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = ((mask >> i) & 1U) ? -1 : 1;
    }
    return x;
}

std::uint64_t point_to_mask(std::span<const std::int8_t> x) {
    if (x.size() > 64) {
        throw InvalidInput("mask points support n <= 64");
    }
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0) {
            mask |= std::uint64_t{1} << i;
        }
    }
    return mask;
}

CubeEvaluator::CubeEvaluator(const Halfspace& h, std::size_t tie_coordinate)
    : n_(h.dim()), weights_(h.weights), theta_(h.theta), tie_(tie_coordinate) {
    require_finite(h);
    if (n_ > 64) {
        throw InvalidInput("CubeEvaluator supports n <= 64");
    }
    if (tie_ > n_) {
        throw InvalidInput("tie coordinate out of range");
    }
    const bool tabulate = n_ <= 2 * kMaxTableBits;
    low_bits_ = tabulate ? (n_ + 1) / 2 : 0;
    low_mask_ = low_bits_ == 0 ? 0 : (std::uint64_t{1} << low_bits_) - 1;

    // Sequential sums in coordinate order; each entry carries at most
    // (#terms) roundings.
    auto build = [&](std::size_t first, std::size_t count) {
        std::vector<double> table(std::size_t{1} << count, 0.0);
        for (std::size_t j = 0; j < count; ++j) {
            const double w = weights_[first + j];
            const std::size_t half = std::size_t{1} << j;
            for (std::size_t mask = 0; mask < half; ++mask) {
                table[mask | half] = table[mask] - w;
                table[mask] = table[mask] + w;
            }
        }
        return table;
    };
    if (tabulate) {
        low_ = build(0, low_bits_);
        high_ = build(low_bits_, n_ - low_bits_);
    }
    double abs_sum = std::abs(theta_);
    for (double w : weights_) {
        abs_sum += std::abs(w);
    }
    bound_ = 1.01 * static_cast<double>(n_ + 3) * kUnitRoundoff * abs_sum + 1e-300;
}

double CubeEvaluator::margin(std::uint64_t mask) const {
    if (!low_.empty() || !high_.empty()) {
        return (low_[mask & low_mask_] + high_[mask >> low_bits_]) - theta_;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        sum += ((mask >> i) & 1U) ? -weights_[i] : weights_[i];
    }
    return sum - theta_;
}

int CubeEvaluator::operator()(std::uint64_t mask) const {
    const double v = margin(mask);
    if (v > bound_) {
        return 1;
    }
    if (v < -bound_) {
        return -1;
    }
    return exact(mask);
}

int CubeEvaluator::exact(std::uint64_t mask) const {
    std::vector<double> terms;
    terms.reserve(n_ + 1);
    for (std::size_t i = 0; i < n_; ++i) {
        terms.push_back(((mask >> i) & 1U) ? -weights_[i] : weights_[i]);
    }
    terms.push_back(-theta_);
    const int s = exact_signum(terms);
    if (s != 0) {
        return s;
    }
    if (tie_ == 0) {
        return 1;
    }
    return ((mask >> (tie_ - 1)) & 1U) ? -1 : 1;
}

std::vector<std::int8_t> SortedHalfspace::to_original(std::span<const std::int8_t> sorted_point) const {
    if (sorted_point.size() != dim()) {
        throw InvalidInput("point dimension mismatch");
    }
    std::vector<std::int8_t> x(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
        x[perm[j] - 1] = sorted_point[j];
    }
    return x;
}

SortedHalfspace sort_weights(const Halfspace& h) {
    require_finite(h);
    const std::size_t n = h.dim();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return std::abs(h.weights[l]) > std::abs(h.weights[r]); });

    SortedHalfspace sh;
    sh.base.theta = h.theta;
    sh.base.weights.resize(n);
    sh.perm.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        sh.base.weights[j] = h.weights[order[j]];
        sh.perm[j] = order[j] + 1;
    }
    sh.suffix_sq.assign(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) {
        sh.suffix_sq[j] = sh.suffix_sq[j + 1] + sh.base.weights[j] * sh.base.weights[j];
    }
    return sh;
}

double tail_norm(const SortedHalfspace& sh, std::size_t k) {
    if (k < 1 || k > sh.dim()) {
        throw InvalidInput("tail index " + std::to_string(k) + " outside [1, " + std::to_string(sh.dim()) + "]");
    }
    return std::sqrt(sh.suffix_sq[k - 1]);
}

std::optional<std::size_t> critical_index(const SortedHalfspace& sh, double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InvalidInput("tau must be positive and finite");
    }
    for (std::size_t i = 1; i <= sh.dim(); ++i) {
        if (std::abs(sh.base.weights[i - 1]) <= tau * tail_norm(sh, i)) {
            return i;
        }
    }
    return std::nullopt;
}

SeparatedSet separated_coordinates(double eps, int t_sep, std::size_t limit) {
    SeparatedSet g;
    g.spacing = 4.0 / (eps * eps) * std::log(1.0 / eps);
    g.requested = t_sep;
    for (int i = 0; i < t_sep; ++i) {
        const double k = 1.0 + std::ceil(static_cast<double>(i) * g.spacing);
        if (k > static_cast<double>(limit)) {
            g.clipped = true;
            break;
        }
        g.indices.push_back(static_cast<std::size_t>(k));
    }
    return g;
}

namespace {

void check_schedule(double eps, const ParamSchedule& schedule) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InvalidInput("eps must lie in (0, 1)");
    }
    if (schedule.eps != eps) {
        throw PreconditionFailed("schedule was derived for a different eps");
    }
}

} // namespace

DecompositionReport decompose_with_head(const SortedHalfspace& sh, double eps, const ParamSchedule& schedule,
                                        std::size_t head_size) {
    check_schedule(eps, schedule);
    const std::size_t n = sh.dim();
    DecompositionReport r;
    r.tau = eps;
    r.crit_index = critical_index(sh, eps);
    r.sigma.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        r.sigma.push_back(tail_norm(sh, k));
    }
    r.L = schedule.L;
    r.t_sep = schedule.t_sep;
    const std::size_t h = std::min(head_size, n);
    for (std::size_t i = 1; i <= n; ++i) {
        (i <= h ? r.head : r.tail).push_back(i);
    }
    r.head_covers_all = r.tail.empty();
    r.separated = separated_coordinates(eps, schedule.t_sep, h);
    return r;
}

DecompositionReport decompose(const SortedHalfspace& sh, double eps, const ParamSchedule& schedule) {
    const auto head = schedule.L > static_cast<std::int64_t>(sh.dim()) ? sh.dim() : static_cast<std::size_t>(schedule.L);
    return decompose_with_head(sh, eps, schedule, head);
}

SeparationResult separation_gap(std::span<const double> v) {
    if (v.empty() || v.size() > 20) {
        throw InvalidInput("separation check needs 1 <= t <= 20 weights");
    }
    const std::size_t t = v.size();
    std::vector<double> sums(std::size_t{1} << t);
    for (std::size_t mask = 0; mask < sums.size(); ++mask) {
        double s = 0.0;
        for (std::size_t i = 0; i < t; ++i) {
            s += ((mask >> i) & 1U) ? -v[i] : v[i];
        }
        sums[mask] = s;
    }
    std::sort(sums.begin(), sums.end());
    SeparationResult r;
    r.min_gap = sums.back() - sums.front();
    for (std::size_t i = 1; i < sums.size(); ++i) {
        r.min_gap = std::min(r.min_gap, sums[i] - sums[i - 1]);
    }
    r.smallest_weight = std::abs(v.back());
    r.ratio_condition = true;
    for (std::size_t i = 0; i + 1 < t; ++i) {
        if (!(std::abs(v[i + 1]) <= std::abs(v[i]) / 3.0)) {
            r.ratio_condition = false;
        }
    }
    return r;
}

bool DecayReport::passed() const {
    if (!violations.empty()) return false;
    if (spaced_clause_applicable && !spaced_violations.empty()) return false;
    if (separation_checked && separated_ratio_ok && !separation_ok) return false;
    return true;
}

DecayReport check_geometric_decay(const SortedHalfspace& sh, double eps, const ParamSchedule& schedule) {
    check_schedule(eps, schedule);
    constexpr double kRel = 1e-12;
    const std::size_t n = sh.dim();
    DecayReport r;
    r.crit_index = critical_index(sh, eps);
    // The per-step contraction sigma_{k+1}^2 < (1-eps^2) sigma_k^2 needs
    // |w_k| > eps sigma_k, i.e. k < l; chains therefore end at j <= l.
    const std::size_t upper = r.crit_index ? std::min(*r.crit_index, n) : n;
    const double rho = std::sqrt(1.0 - eps * eps);
    const double spacing = 4.0 / (eps * eps) * std::log(1.0 / eps);
    r.spaced_clause_applicable = eps <= 1.0 / 3.0;

    auto w = [&](std::size_t i) { return std::abs(sh.base.weights[i - 1]); };
    for (std::size_t i = 1; i <= upper; ++i) {
        const double sigma_i = tail_norm(sh, i);
        for (std::size_t j = i + 1; j <= upper; ++j) {
            ++r.pairs_checked;
            const double sigma_j = tail_norm(sh, j);
            const double contraction = std::pow(rho, static_cast<double>(j - i));
            if (!(w(j) <= sigma_j * (1.0 + kRel))) {
                r.violations.push_back({i, j, w(j), sigma_j, "|w_j| <= sigma_j"});
            }
            if (!(sigma_j < contraction * sigma_i * (1.0 + kRel))) {
                r.violations.push_back({i, j, sigma_j, contraction * sigma_i, "sigma_j < rho^(j-i) sigma_i"});
            }
            if (!(contraction * sigma_i <= contraction * w(i) / eps * (1.0 + kRel))) {
                r.violations.push_back(
                    {i, j, contraction * sigma_i, contraction * w(i) / eps, "rho^(j-i) sigma_i <= rho^(j-i) |w_i|/eps"});
            }
            if (static_cast<double>(j) >= static_cast<double>(i) + spacing) {
                ++r.spaced_pairs_checked;
                if (!(w(j) <= w(i) / 3.0 * (1.0 + kRel))) {
                    r.spaced_violations.push_back({i, j, w(j), w(i) / 3.0, "|w_j| <= |w_i|/3"});
                }
            }
        }
    }

    const auto head = schedule.L > static_cast<std::int64_t>(n) ? n : static_cast<std::size_t>(schedule.L);
    const auto g = separated_coordinates(eps, schedule.t_sep, head);
    r.separated = g.indices;
    if (g.indices.size() > 20) {
        r.separation_skipped = true;
        return r;
    }
    if (!g.indices.empty()) {
        std::vector<double> v;
        for (std::size_t k : g.indices) {
            v.push_back(w(k));
        }
        const auto sep = separation_gap(v);
        r.separation_checked = true;
        r.separated_ratio_ok = sep.ratio_condition;
        r.separation_gap = sep.min_gap;
        r.separation_bound = sep.smallest_weight;
        r.separation_ok = sep.min_gap >= sep.smallest_weight * (1.0 - kRel);
    }
    return r;
}

} // namespace hsprg
