#include "hsprg/fooling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace hsprg {

namespace {

void check_cube(std::size_t n, const Limits& limits) {
    limits.validate();
    if (n > static_cast<std::size_t>(limits.max_cube_dim) || n > 40) {
        throw ResourceLimit("exhaustive enumeration of 2^" + std::to_string(n) + " points exceeds the guard n <= " +
                            std::to_string(limits.max_cube_dim) + "; use Monte Carlo estimation instead");
    }
}

void check_match(const Halfspace& h, const KWiseSpace& space) {
    if (h.dim() != space.n) {
        throw InvalidInput("halfspace dimension " + std::to_string(h.dim()) + " does not match space dimension " +
                           std::to_string(space.n));
    }
}

Rational ratio(std::int64_t num, std::uint64_t den) { return Rational(num, static_cast<std::int64_t>(den)); }

} // namespace

std::string space_tag(const KWiseSpace& space) {
    return to_string(space.construction) + "(n=" + std::to_string(space.n) + ",k=" + std::to_string(space.k) +
           ",s=" + std::to_string(space.s) + ")";
}

BiasReport exact_bias(const Halfspace& h, const Limits& limits) {
    check_cube(h.dim(), limits);
    const CubeEvaluator eval(h);
    BiasReport rep;
    rep.total = std::uint64_t{1} << h.dim();
    for (std::uint64_t mask = 0; mask < rep.total; ++mask) {
        rep.plus_count += eval(mask) > 0 ? 1 : 0;
    }
    rep.bias = ratio(2 * static_cast<std::int64_t>(rep.plus_count) - static_cast<std::int64_t>(rep.total), rep.total);
    rep.distribution = "uniform";
    return rep;
}

BiasReport bias_under_space(const Halfspace& h, const KWiseSpace& space, const Limits& limits) {
    check_match(h, space);
    const CubeEvaluator eval(h);
    BiasReport rep;
    for_each_support_point(space, limits, [&](std::uint64_t, std::uint64_t mask) {
        rep.plus_count += eval(mask) > 0 ? 1 : 0;
    });
    rep.total = space.support_size();
    rep.bias = ratio(2 * static_cast<std::int64_t>(rep.plus_count) - static_cast<std::int64_t>(rep.total), rep.total);
    rep.distribution = space_tag(space);
    return rep;
}

Rational fooling_error(const Halfspace& h, const KWiseSpace& space, const Limits& limits) {
    const Rational d = bias_under_space(h, space, limits).bias - exact_bias(h, limits).bias;
    return d < 0 ? -d : d;
}

std::string to_string(FamilyName f) {
    switch (f) {
    case FamilyName::majority: return "majority";
    case FamilyName::geometric: return "geometric";
    case FamilyName::exponential: return "exponential";
    case FamilyName::gaussian_random: return "gaussian_random";
    }
    return "";
}

FamilyName parse_family(const std::string& text) {
    for (auto f : {FamilyName::majority, FamilyName::geometric, FamilyName::exponential, FamilyName::gaussian_random}) {
        if (to_string(f) == text) return f;
    }
    throw InvalidInput("unknown family '" + text + "'");
}

Halfspace family(const FamilySpec& spec) {
    if (spec.n < 1) {
        throw InvalidInput("family dimension must be positive");
    }
    if (!std::isfinite(spec.theta)) {
        throw InvalidInput("family threshold must be finite");
    }
    std::vector<double> w(spec.n);
    switch (spec.name) {
    case FamilyName::majority:
        std::fill(w.begin(), w.end(), 1.0);
        break;
    case FamilyName::geometric:
        if (!(spec.rho > 0.0) || !std::isfinite(spec.rho)) {
            throw InvalidInput("geometric ratio rho must be positive and finite");
        }
        for (std::size_t i = 0; i < spec.n; ++i) {
            w[i] = std::pow(spec.rho, static_cast<double>(i + 1));
        }
        break;
    case FamilyName::exponential:
        if (spec.n > 1000) {
            throw InvalidInput("exponential family limited to n <= 1000 (weights underflow)");
        }
        for (std::size_t i = 0; i < spec.n; ++i) {
            w[i] = std::ldexp(1.0, -static_cast<int>(i + 1));
        }
        break;
    case FamilyName::gaussian_random: {
        CounterRng rng(spec.rng_seed);
        for (auto& v : w) {
            v = rng.normal();
        }
        break;
    }
    }
    Halfspace h = normalize(make_halfspace(std::move(w), 0.0));
    if (spec.name == FamilyName::majority) {
        // 1/sqrt(n) exactly as documented rather than 1 / ||(1,...,1)||.
        std::fill(h.weights.begin(), h.weights.end(), 1.0 / std::sqrt(static_cast<double>(spec.n)));
    }
    h.theta = spec.theta;
    return h;
}

SweepTable sweep(const FamilySpec& spec, const std::vector<std::size_t>& k_range, const std::vector<double>& eps_grid,
                 const Limits& limits) {
    const Halfspace h = family(spec);
    const std::set<std::size_t> ks(k_range.begin(), k_range.end());
    SweepTable table;
    const Rational bu = exact_bias(h, limits).bias;
    for (std::size_t k : ks) {
        const KWiseSpace space = build_space(spec.n, k);
        SweepRow row;
        row.family = to_string(spec.name);
        row.n = spec.n;
        row.k = k;
        row.s = space.s;
        row.bias_uniform = bu;
        row.bias_space = bias_under_space(h, space, limits).bias;
        const Rational d = row.bias_space - bu;
        row.error = d < 0 ? -d : d;
        table.rows.push_back(row);
    }
    for (double eps : eps_grid) {
        if (!(eps > 0.0) || !std::isfinite(eps)) {
            throw InvalidInput("sweep eps values must be positive");
        }
        SweepThreshold t;
        t.eps = eps;
        for (const auto& row : table.rows) {
            if (boost::rational_cast<double>(row.error) <= eps) {
                t.min_k = row.k;
                break;
            }
        }
        table.thresholds.push_back(t);
    }
    return table;
}

std::string sweep_csv(const SweepTable& table) {
    std::ostringstream out;
    out << "family,n,k,s,bias_uniform,bias_space,fooling_error_exact,fooling_error_float\n";
    for (const auto& r : table.rows) {
        out << r.family << ',' << r.n << ',' << r.k << ',' << r.s << ',' << to_string(r.bias_uniform) << ','
            << to_string(r.bias_space) << ',' << to_string(r.error) << ','
            << decimal_string(boost::rational_cast<double>(r.error)) << '\n';
    }
    return out.str();
}

std::string to_string(InfluenceMethod m) {
    switch (m) {
    case InfluenceMethod::direct: return "direct";
    case InfluenceMethod::halfspace_identity: return "halfspace_identity";
    case InfluenceMethod::via_space: return "via_space";
    }
    return "";
}

Halfspace influence_halfspace(const Halfspace& h, std::size_t i) {
    if (i < 1 || i > h.dim()) {
        throw InvalidInput("coordinate index must lie in [1, n]");
    }
    Halfspace hp = h;
    hp.weights[i - 1] = -h.theta;
    hp.theta = -std::abs(h.weights[i - 1]);
    return hp;
}

InfluenceReport influence(const Halfspace& h, std::size_t i, InfluenceMethod method, const KWiseSpace* space,
                          const Limits& limits) {
    if (i < 1 || i > h.dim()) {
        throw InvalidInput("coordinate index must lie in [1, n]");
    }
    InfluenceReport rep;
    rep.method = method;
    rep.index = i;
    const std::size_t n = h.dim();
    if (method == InfluenceMethod::direct) {
        check_cube(n, limits);
        const CubeEvaluator eval(h);
        const std::uint64_t bit = std::uint64_t{1} << (i - 1);
        const std::uint64_t total = std::uint64_t{1} << n;
        std::int64_t flips = 0;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            if ((mask & bit) == 0 && eval(mask) != eval(mask | bit)) {
                ++flips;
            }
        }
        rep.value = ratio(flips, total >> 1);
        return rep;
    }
    const CubeEvaluator eval(influence_halfspace(h, i), i);
    std::int64_t plus = 0;
    std::uint64_t total = 0;
    if (method == InfluenceMethod::halfspace_identity) {
        check_cube(n, limits);
        total = std::uint64_t{1} << n;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            plus += eval(mask) > 0 ? 1 : 0;
        }
    } else {
        if (space == nullptr) {
            throw InvalidInput("via_space influence needs a sample space");
        }
        check_match(h, *space);
        for_each_support_point(*space, limits, [&](std::uint64_t, std::uint64_t mask) {
            plus += eval(mask) > 0 ? 1 : 0;
        });
        total = space->support_size();
    }
    rep.value = ratio(2 * plus - static_cast<std::int64_t>(total), total);
    return rep;
}

std::vector<Rational> chow_parameters(const Halfspace& h, const KWiseSpace* space, const Limits& limits) {
    const std::size_t n = h.dim();
    const CubeEvaluator eval(h);
    std::vector<std::int64_t> sums(n + 1, 0);
    auto add = [&](std::uint64_t mask) {
        const int v = eval(mask);
        sums[0] += v;
        for (std::size_t i = 0; i < n; ++i) {
            sums[i + 1] += ((mask >> i) & 1U) ? -v : v;
        }
    };
    std::uint64_t total = 0;
    if (space == nullptr) {
        check_cube(n, limits);
        total = std::uint64_t{1} << n;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            add(mask);
        }
    } else {
        check_match(h, *space);
        for_each_support_point(*space, limits, [&](std::uint64_t, std::uint64_t mask) { add(mask); });
        total = space->support_size();
    }
    std::vector<Rational> out;
    out.reserve(n + 1);
    for (auto s : sums) {
        out.push_back(ratio(s, total));
    }
    return out;
}

CountEstimate approx_count(const Halfspace& h, const KWiseSpace& space, const Limits& limits) {
    CountEstimate out;
    out.estimate = (Rational(1) + bias_under_space(h, space, limits).bias) / 2;
    if (h.dim() <= static_cast<std::size_t>(limits.max_cube_dim)) {
        const Rational exact = (Rational(1) + exact_bias(h, limits).bias) / 2;
        const Rational d = out.estimate - exact;
        out.exact = exact;
        out.realized_error = d < 0 ? -d : d;
    }
    return out;
}

bool LargeCritReport::passed() const {
    return !skipped && bad_event_ok && tail_norm_ok && decay.passed() && tails_ok;
}

namespace {

std::vector<double> subset_sums(const std::vector<double>& w, std::size_t from, std::size_t count) {
    std::vector<double> sums(std::size_t{1} << count);
    for (std::size_t m = 0; m < sums.size(); ++m) {
        double s = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            s += ((m >> j) & 1U) ? -w[from + j] : w[from + j];
        }
        sums[m] = s;
    }
    return sums;
}

// #{v in sorted : v >= x}
std::size_t count_at_least(const std::vector<double>& sorted, double x) {
    return static_cast<std::size_t>(sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), x));
}

std::size_t count_below(const std::vector<double>& sorted, double x) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin());
}

const std::vector<double> kHoeffdingGammas{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
const std::vector<double> kChebyshevLevels{1.5, 2.0, 3.0, 4.0};

} // namespace

LargeCritReport large_crit_experiment(const Halfspace& h, const ParamSchedule& schedule, const KWiseSpace& space,
                                      const LargeCritOptions& options, const Limits& limits) {
    check_match(h, space);
    limits.validate();
    LargeCritReport rep;
    const double eps = schedule.eps;
    rep.eps = eps;
    rep.eps_over_10 = eps / 10.0;
    rep.bound_9eps = 9.0 * eps;

    const Halfspace hn = normalize(h);
    const SortedHalfspace sh = sort_weights(hn);
    const std::size_t n = sh.dim();
    const KWiseSpace sspace = permute_columns(space, sh.perm);
    const DecompositionReport dec =
        options.head_size == 0 ? decompose(sh, eps, schedule) : decompose_with_head(sh, eps, schedule, options.head_size);
    rep.crit_index = dec.crit_index;
    rep.L = dec.L;
    rep.head_size = dec.head.size();
    rep.tail_size = dec.tail.size();
    rep.separated = dec.separated.indices;

    if (!options.ignore_crit_precondition && rep.crit_index && static_cast<std::int64_t>(*rep.crit_index) <= rep.L) {
        rep.skipped = true;
        rep.skip_reason = "critical index " + std::to_string(*rep.crit_index) + " <= L = " + std::to_string(rep.L);
        return rep;
    }
    if (rep.head_size > static_cast<std::size_t>(limits.max_head)) {
        rep.skipped = true;
        rep.skip_reason = "head size " + std::to_string(rep.head_size) + " exceeds the guard |H| <= " +
                          std::to_string(limits.max_head);
        return rep;
    }
    if (rep.tail_size > 24 || n > static_cast<std::size_t>(limits.max_cube_dim)) {
        rep.skipped = true;
        rep.skip_reason = "tail or cube too large for exhaustive enumeration";
        return rep;
    }
    if (sspace.s > 26 && !limits.unsafe) {
        rep.skipped = true;
        rep.skip_reason = "space support 2^" + std::to_string(sspace.s) + " too large to group by head setting";
        return rep;
    }
    if (rep.separated.empty()) {
        rep.skipped = true;
        rep.skip_reason = "no separated coordinates";
        return rep;
    }

    const auto& w = sh.base.weights;
    const double theta = sh.base.theta;
    rep.k_t = rep.separated.back();
    rep.w_kt = std::abs(w[rep.k_t - 1]);
    rep.sigma_T = rep.tail_size == 0 ? 0.0 : tail_norm(sh, rep.head_size + 1);
    rep.tail_norm_ok = rep.sigma_T < eps * rep.w_kt;
    rep.decay = check_geometric_decay(sh, eps, schedule);
    rep.separation_bound = std::ldexp(1.0, -static_cast<int>(rep.separated.size()));

    const std::size_t H = rep.head_size;
    const std::size_t T = rep.tail_size;
    const std::vector<double> head_sums = subset_sums(w, 0, H);
    const std::vector<double> tail_sums = subset_sums(w, H, T);
    std::vector<double> tail_sorted = tail_sums;
    std::sort(tail_sorted.begin(), tail_sorted.end());
    const double tail_total = static_cast<double>(tail_sums.size());

    // Bad event over the uniform head marginal.
    rep.head_assignments = head_sums.size();
    std::vector<char> good(head_sums.size());
    for (std::size_t a = 0; a < head_sums.size(); ++a) {
        const double tp = theta - head_sums[a];
        good[a] = std::abs(tp) > rep.w_kt / 4.0;
        rep.bad_assignments += good[a] ? 0 : 1;
    }
    rep.bad_frequency = static_cast<double>(rep.bad_assignments) / static_cast<double>(rep.head_assignments);
    rep.bad_event_ok = rep.bad_frequency <= rep.eps_over_10;
    rep.bad_part = 2.0 * rep.bad_frequency;
    rep.fooling_error = fooling_error(hn, sspace, limits);

    const double quoted_level = rep.sigma_T / (4.0 * eps);
    rep.quoted_uniform_bound = 2.0 * std::exp(-1.0 / (32.0 * eps * eps));
    rep.quoted_space_bound = 16.0 * eps * eps;
    rep.pairwise_tail = space.k >= H + 2;

    // Conditional space distribution: seeds grouped by head setting.
    const std::uint64_t head_mask = (std::uint64_t{1} << H) - 1;
    std::vector<std::uint32_t> group_count(head_sums.size() + 1, 0);
    std::vector<std::uint64_t> seed_masks(sspace.support_size());
    for (std::uint64_t seed = 0; seed < seed_masks.size(); ++seed) {
        seed_masks[seed] = sample_mask(sspace, seed);
        ++group_count[(seed_masks[seed] & head_mask) + 1];
    }
    for (std::size_t a = 1; a < group_count.size(); ++a) {
        group_count[a] += group_count[a - 1];
    }
    std::vector<std::uint32_t> tail_of(seed_masks.size());
    {
        std::vector<std::uint32_t> cursor(group_count.begin(), group_count.end() - 1);
        for (std::uint64_t mask : seed_masks) {
            tail_of[cursor[mask & head_mask]++] = static_cast<std::uint32_t>(mask >> H);
        }
    }
    bool all_groups_present = true;

    if (T == 0) {
        rep.tails_vacuous = true;
    } else {
        for (double g : kHoeffdingGammas) {
            const double lvl = g * rep.sigma_T;
            TailCheck c;
            c.level = g;
            c.bound = std::exp(-g * g / 2.0);
            const double up = static_cast<double>(count_at_least(tail_sorted, lvl)) / tail_total;
            const double down =
                static_cast<double>(tail_sorted.size() - count_at_least(tail_sorted, std::nextafter(-lvl, 1e300))) /
                tail_total;
            c.measured = std::max(up, down);
            c.ok = c.measured <= c.bound;
            rep.hoeffding.push_back(c);
        }
        std::size_t big = 0;
        for (double v : tail_sums) {
            big += std::abs(v) >= quoted_level ? 1 : 0;
        }
        rep.quoted_uniform_tail = static_cast<double>(big) / tail_total;
        for (double k : kChebyshevLevels) {
            TailCheck c;
            c.level = k;
            c.bound = 1.0 / (k * k);
            rep.chebyshev.push_back(c);
        }
    }

    for (std::size_t a = 0; a < head_sums.size(); ++a) {
        const std::uint32_t begin = group_count[a];
        const std::uint32_t end = group_count[a + 1];
        if (begin == end) {
            all_groups_present = false;
            continue;
        }
        ++rep.space_fixings;
        const double count = static_cast<double>(end - begin);
        const double tp = theta - head_sums[a];
        if (T > 0) {
            double mean = 0.0;
            for (std::uint32_t j = begin; j < end; ++j) mean += tail_sums[tail_of[j]];
            mean /= count;
            double var = 0.0;
            for (std::uint32_t j = begin; j < end; ++j) {
                const double d = tail_sums[tail_of[j]] - mean;
                var += d * d;
            }
            var /= count;
            rep.max_abs_mean = std::max(rep.max_abs_mean, std::abs(mean));
            rep.max_var_deviation = std::max(rep.max_var_deviation, std::abs(var - rep.sigma_T * rep.sigma_T));
            const double sd = std::sqrt(var);
            for (auto& c : rep.chebyshev) {
                if (sd == 0.0) break;
                std::size_t far = 0;
                for (std::uint32_t j = begin; j < end; ++j) {
                    far += std::abs(tail_sums[tail_of[j]] - mean) >= c.level * sd ? 1 : 0;
                }
                const double pr = static_cast<double>(far) / count;
                c.measured = std::max(c.measured, pr);
                c.ok = c.ok && pr <= c.bound;
            }
            if (good[a]) {
                std::size_t big = 0;
                for (std::uint32_t j = begin; j < end; ++j) {
                    big += std::abs(tail_sums[tail_of[j]]) >= quoted_level ? 1 : 0;
                }
                rep.quoted_space_tail = std::max(rep.quoted_space_tail, static_cast<double>(big) / count);
            }
        }
        if (!good[a]) continue;
        // h'(x_T) = sign(S_T - theta'); a flip is h' != -sign(theta').
        const std::size_t plus_u = count_at_least(tail_sorted, tp);
        const double e_u = (2.0 * static_cast<double>(plus_u) - tail_total) / tail_total;
        const double flip_u =
            static_cast<double>(tp > 0 ? plus_u : count_below(tail_sorted, tp)) / tail_total;
        std::size_t plus_d = 0;
        for (std::uint32_t j = begin; j < end; ++j) {
            plus_d += tail_sums[tail_of[j]] - tp >= 0.0 ? 1 : 0;
        }
        const double e_d = (2.0 * static_cast<double>(plus_d) - count) / count;
        const double flip_d = static_cast<double>(tp > 0 ? plus_d : (end - begin) - plus_d) / count;
        rep.max_flip_uniform = std::max(rep.max_flip_uniform, flip_u);
        rep.max_flip_space = std::max(rep.max_flip_space, flip_d);
        rep.good_part += std::abs(e_d - e_u) / static_cast<double>(head_sums.size());
    }

    if (T == 0) {
        rep.tails_ok = true;
    } else {
        bool ok = std::all_of(rep.hoeffding.begin(), rep.hoeffding.end(), [](const TailCheck& c) { return c.ok; }) &&
                  std::all_of(rep.chebyshev.begin(), rep.chebyshev.end(), [](const TailCheck& c) { return c.ok; }) &&
                  rep.quoted_uniform_tail <= rep.quoted_uniform_bound && all_groups_present;
        if (rep.pairwise_tail) {
            ok = ok && rep.max_abs_mean <= 1e-9 && rep.max_var_deviation <= 1e-9 &&
                 rep.quoted_space_tail <= rep.quoted_space_bound;
        }
        rep.tails_ok = ok;
    }
    return rep;
}

} // namespace hsprg
