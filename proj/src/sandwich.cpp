#include "hsprg/sandwich.hpp"

#include <algorithm>
#include <cmath>

namespace hsprg {

std::string to_string(Branch b) { return b == Branch::small_theta ? "small_theta" : "large_theta"; }

std::string to_string(GapMode m) { return m == GapMode::exhaustive ? "exhaustive" : "montecarlo"; }

GapMode parse_gap_mode(const std::string& text) {
    if (text == "exhaustive") return GapMode::exhaustive;
    if (text == "montecarlo") return GapMode::montecarlo;
    throw InvalidInput("unknown gap mode '" + text + "'");
}

namespace {

CompositionRecord poly_side(int out_sign, std::vector<double> weights, double offset, double Z) {
    CompositionRecord r;
    r.out_sign = out_sign;
    r.weights = std::move(weights);
    r.offset = offset;
    r.Z = Z;
    return r;
}

CompositionRecord constant_side(double c) {
    CompositionRecord r;
    r.is_constant = true;
    r.constant = c;
    return r;
}

std::vector<double> negated(const std::vector<double>& w) {
    std::vector<double> out(w.size());
    std::transform(w.begin(), w.end(), out.begin(), [](double v) { return -v; });
    return out;
}

// w.x - offset over mask points from two half tables.
class LinearForm {
  public:
    explicit LinearForm(const CompositionRecord& side) : side_(side) {
        const std::size_t n = side.weights.size();
        low_bits_ = n / 2;
        low_ = table(0, low_bits_);
        high_ = table(low_bits_, n);
    }
    double operator()(std::uint64_t mask, const UpperApprox& P) const {
        if (side_.is_constant) return side_.constant;
        const double lin = low_[mask & ((std::uint64_t{1} << low_bits_) - 1)] + high_[mask >> low_bits_];
        return side_.out_sign * P((lin - side_.offset) / side_.Z);
    }

  private:
    std::vector<double> table(std::size_t from, std::size_t to) const {
        std::vector<double> t(std::size_t{1} << (to - from), 0.0);
        if (side_.is_constant) return t;
        for (std::size_t m = 0; m < t.size(); ++m) {
            double s = 0.0;
            for (std::size_t i = from; i < to; ++i) {
                s += ((m >> (i - from)) & 1U) ? -side_.weights[i] : side_.weights[i];
            }
            t[m] = s;
        }
        return t;
    }

    const CompositionRecord& side_;
    std::size_t low_bits_ = 0;
    std::vector<double> low_;
    std::vector<double> high_;
};

void check_exhaustive(std::size_t n, const Limits& limits) {
    limits.validate();
    const std::size_t cap = limits.unsafe ? 40 : 24;
    if (n > cap) {
        throw ResourceLimit("exhaustive sandwich evaluation needs n <= 24 (got " + std::to_string(n) +
                            "); supply a point sample or use Monte Carlo");
    }
}

struct Neumaier {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace

SandwichPair build_sandwich(const Halfspace& h, const UpperApprox& P, const ParamSchedule& schedule,
                            const SandwichOptions& options) {
    if (!is_normalized(h)) {
        throw PreconditionFailed("sandwich construction needs a normalized halfspace");
    }
    if (P.eps != schedule.eps || std::abs(P.a - schedule.a) > 1e-12 * schedule.a) {
        throw PreconditionFailed("P was built for a different schedule");
    }
    if (options.require_regular) {
        const auto ci = critical_index(sort_weights(h), schedule.eps);
        if (!ci || *ci != 1) {
            throw PreconditionFailed("halfspace is not eps-regular at eps = " + decimal_string(schedule.eps));
        }
    }
    SandwichPair pair;
    pair.h = h;
    pair.P = P;
    pair.eps = schedule.eps;
    pair.Z = schedule.Z;
    pair.degree = P.P.degree();
    const double Z = schedule.Z;
    const double quarter = Z / 4.0;
    if (std::abs(h.theta) <= quarter) {
        pair.branch = Branch::small_theta;
        pair.upper = poly_side(+1, h.weights, h.theta, Z);
        pair.lower = poly_side(-1, negated(h.weights), -h.theta, Z);
    } else if (h.theta > quarter) {
        pair.branch = Branch::large_theta;
        pair.upper = poly_side(+1, h.weights, quarter, Z);
        pair.lower = constant_side(-1.0);
    } else {
        // h(x) >= -sign(theta - w.x) >= -P((-w.x - Z/4)/Z), and h <= 1.
        pair.branch = Branch::large_theta;
        pair.mirrored = true;
        pair.upper = constant_side(1.0);
        pair.lower = poly_side(-1, negated(h.weights), quarter, Z);
    }
    return pair;
}

double evaluate_side(const CompositionRecord& side, const UpperApprox& P, std::span<const std::int8_t> x) {
    if (side.is_constant) {
        return side.constant;
    }
    if (x.size() != side.weights.size()) {
        throw InvalidInput("point dimension does not match the sandwich");
    }
    double lin = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lin += side.weights[i] * x[i];
    }
    return side.out_sign * P((lin - side.offset) / side.Z);
}

PointwiseReport verify_pointwise(const SandwichPair& pair, const Limits& limits) {
    const std::size_t n = pair.h.dim();
    check_exhaustive(n, limits);
    const CubeEvaluator h(pair.h);
    const LinearForm up(pair.upper);
    const LinearForm lo(pair.lower);
    PointwiseReport rep;
    std::uint64_t worst_u = 0;
    std::uint64_t worst_l = 0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        const int hv = h(mask);
        const double mu = up(mask, pair.P) - hv;
        const double ml = hv - lo(mask, pair.P);
        if (mask == 0 || mu < rep.min_upper_margin) {
            rep.min_upper_margin = mu;
            worst_u = mask;
        }
        if (mask == 0 || ml < rep.min_lower_margin) {
            rep.min_lower_margin = ml;
            worst_l = mask;
        }
    }
    rep.points = total;
    rep.worst_upper_point = mask_to_point(worst_u, n);
    rep.worst_lower_point = mask_to_point(worst_l, n);
    rep.passed = rep.min_upper_margin >= rep.tolerance && rep.min_lower_margin >= rep.tolerance;
    return rep;
}

PointwiseReport verify_pointwise(const SandwichPair& pair, const std::vector<std::vector<std::int8_t>>& points) {
    PointwiseReport rep;
    bool first = true;
    for (const auto& x : points) {
        const int hv = evaluate(pair.h, x);
        const double mu = evaluate_side(pair.upper, pair.P, x) - hv;
        const double ml = hv - evaluate_side(pair.lower, pair.P, x);
        if (first || mu < rep.min_upper_margin) {
            rep.min_upper_margin = mu;
            rep.worst_upper_point = x;
        }
        if (first || ml < rep.min_lower_margin) {
            rep.min_lower_margin = ml;
            rep.worst_lower_point = x;
        }
        first = false;
        ++rep.points;
    }
    rep.passed = rep.min_upper_margin >= rep.tolerance && rep.min_lower_margin >= rep.tolerance;
    return rep;
}

GapReport expected_gap(const SandwichPair& pair, const ParamSchedule& schedule, GapMode mode, std::uint64_t samples,
                       std::uint64_t seed, const Limits& limits) {
    GapReport rep;
    rep.branch = pair.branch;
    rep.mirrored = pair.mirrored;
    rep.mode = mode;
    const double eps = pair.eps;
    rep.bound_10eps = 10.0 * eps;
    if (pair.branch == Branch::small_theta) {
        rep.bound_u = rep.bound_l = 10.0 * eps;
    } else if (!pair.mirrored) {
        rep.bound_u = 12.0 * eps;
        rep.bound_l = 2.0 * eps;
    } else {
        rep.bound_u = 2.0 * eps;
        rep.bound_l = 12.0 * eps;
    }
    const std::size_t n = pair.h.dim();
    const CubeEvaluator h(pair.h);
    const LinearForm up(pair.upper);
    const LinearForm lo(pair.lower);
    if (mode == GapMode::exhaustive) {
        check_exhaustive(n, limits);
        const std::uint64_t total = std::uint64_t{1} << n;
        Neumaier su;
        Neumaier sl;
        std::uint64_t plus = 0;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            const int hv = h(mask);
            plus += hv > 0 ? 1 : 0;
            su.add(up(mask, pair.P) - hv);
            sl.add(hv - lo(mask, pair.P));
        }
        rep.samples = total;
        rep.plus_count = plus;
        rep.gap_u = su.value() / static_cast<double>(total);
        rep.gap_l = sl.value() / static_cast<double>(total);
    } else {
        if (samples < 2) {
            throw InvalidInput("Monte Carlo gap estimation needs at least 2 samples");
        }
        if (n > 64) {
            throw InvalidInput("Monte Carlo gap estimation supports n <= 64");
        }
        CounterRng rng(seed);
        Neumaier su, sl, qu, ql;
        const std::uint64_t keep = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
        for (std::uint64_t i = 0; i < samples; ++i) {
            const std::uint64_t mask = rng.next() & keep;
            const int hv = h(mask);
            const double du = up(mask, pair.P) - hv;
            const double dl = hv - lo(mask, pair.P);
            su.add(du);
            sl.add(dl);
            qu.add(du * du);
            ql.add(dl * dl);
        }
        const double N = static_cast<double>(samples);
        rep.samples = samples;
        rep.gap_u = su.value() / N;
        rep.gap_l = sl.value() / N;
        auto half_width = [N](double mean, double sq) {
            const double var = std::max(0.0, (sq - N * mean * mean) / (N - 1.0));
            return 2.576 * std::sqrt(var / N);
        };
        rep.ci_u = half_width(rep.gap_u, qu.value());
        rep.ci_l = half_width(rep.gap_l, ql.value());
    }
    rep.within_bound = rep.gap_u <= rep.bound_u && rep.gap_l <= rep.bound_l;
    rep.bound_asserted = schedule.mode == ScheduleMode::theorem;
    return rep;
}

Halfspace random_regular_halfspace(std::size_t n, double tau, double theta, CounterRng& rng) {
    if (n < 1) {
        throw InvalidInput("dimension must be positive");
    }
    if (!(tau > 0.0) || !std::isfinite(theta)) {
        throw InvalidInput("tau must be positive and theta finite");
    }
    const double floor_tau = 1.0 / std::sqrt(static_cast<double>(n));
    if (tau < floor_tau) {
        throw PreconditionFailed("no unit vector in dimension " + std::to_string(n) + " has all |w_i| <= " +
                                 decimal_string(tau) + " (the minimum possible max|w_i| is 1/sqrt(n) = " +
                                 decimal_string(floor_tau) + ")");
    }
    std::vector<double> g(n);
    for (auto& v : g) {
        v = std::abs(rng.normal());
    }
    const double target = tau * (1.0 - 1e-9);
    auto ratio = [&](double c) {
        double sq = 0.0;
        double mx = 0.0;
        for (double v : g) {
            sq += (c + v) * (c + v);
            mx = std::max(mx, c + v);
        }
        return mx / std::sqrt(sq);
    };
    double c = 0.0;
    if (ratio(0.0) > target) {
        double hi = 1.0;
        while (ratio(hi) > target && hi < 1e12) {
            hi *= 2.0;
        }
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ratio(mid) > target ? lo : hi) = mid;
        }
        c = hi;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = (rng.next() & 1U) ? -(c + g[i]) : (c + g[i]);
    }
    Halfspace raw = make_halfspace(std::move(w), 0.0);
    Halfspace out = normalize(raw);
    out.theta = theta;
    return out;
}

} // namespace hsprg
