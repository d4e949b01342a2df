#include "hsprg/cli.hpp"

#include "hsprg/approx.hpp"
#include "hsprg/fooling.hpp"
#include "hsprg/io.hpp"
#include "hsprg/remez.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>

namespace hsprg::cli {

namespace {

class UsageError : public InvalidInput {
  public:
    using InvalidInput::InvalidInput;
};

struct HalfspaceSource {
    std::string path;
    std::string family;
    std::size_t n = 0;
    double rho = 0.5;
    double theta = 0.0;
    std::uint64_t family_seed = 1;
};

struct SpaceSource {
    std::string path;
    std::size_t k = 0;
};

struct Context {
    RunConfig cfg;
    HalfspaceSource hs;
    SpaceSource sp;
    std::ostream* out = nullptr;
};

void add_guards(CLI::App* sub, Context& ctx) {
    sub->add_flag("--unsafe", ctx.cfg.limits.unsafe, "Acknowledge lifting the resource guards");
    sub->add_option("--max-cube-dim", ctx.cfg.limits.max_cube_dim, "Largest n for exhaustive cube enumeration");
    sub->add_option("--max-seed-bits", ctx.cfg.limits.max_seed_bits, "Largest seed length s to enumerate");
    sub->add_option("--max-head", ctx.cfg.limits.max_head, "Largest head size |H| to enumerate");
    sub->add_option("-o,--output", ctx.cfg.output, "Write the report here instead of stdout");
}

void add_schedule(CLI::App* sub, Context& ctx) {
    sub->add_option("--eps", ctx.cfg.eps, "Accuracy target");
    sub->add_option("--C", ctx.cfg.C_const, "Large constant C");
    sub->add_option("--c", ctx.cfg.c_const, "Small constant c");
    sub->add_option("--mode", ctx.cfg.mode, "theorem | empirical")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, ScheduleMode>{{"theorem", ScheduleMode::theorem},
                                                {"empirical", ScheduleMode::empirical}}));
    sub->add_option("--log-base", ctx.cfg.log_base, "natural | two")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, LogBase>{
                {"natural", LogBase::natural}, {"e", LogBase::natural}, {"two", LogBase::two}, {"2", LogBase::two}}));
    sub->add_option("--bits", ctx.cfg.precision_bits, "Working precision in bits (0: default)");
}

void add_halfspace(CLI::App* sub, Context& ctx) {
    sub->add_option("--halfspace", ctx.hs.path, "Halfspace JSON file");
    sub->add_option("--family", ctx.hs.family, "majority | geometric | exponential | gaussian_random");
    sub->add_option("--n", ctx.hs.n, "Dimension");
    sub->add_option("--rho", ctx.hs.rho, "Ratio of the geometric family");
    sub->add_option("--theta", ctx.hs.theta, "Threshold of a family member");
    sub->add_option("--family-seed", ctx.hs.family_seed, "Seed of the gaussian_random family");
}

void add_space(CLI::App* sub, Context& ctx) {
    sub->add_option("--k", ctx.sp.k, "Independence level of the built space");
    sub->add_option("--space", ctx.sp.path, "Space descriptor JSON file");
}

Halfspace load_halfspace(const Context& ctx) {
    if (!ctx.hs.path.empty()) {
        if (!ctx.hs.family.empty()) {
            throw UsageError("give either --halfspace or --family, not both");
        }
        return halfspace_from_json(read_json_file(ctx.hs.path));
    }
    if (ctx.hs.family.empty()) {
        throw UsageError("a halfspace is required (--halfspace FILE or --family NAME --n N)");
    }
    if (ctx.hs.n == 0) {
        throw UsageError("--family needs --n");
    }
    FamilySpec spec;
    spec.name = parse_family(ctx.hs.family);
    spec.n = ctx.hs.n;
    spec.rho = ctx.hs.rho;
    spec.theta = ctx.hs.theta;
    spec.rng_seed = ctx.hs.family_seed;
    return family(spec);
}

std::optional<KWiseSpace> load_space(const Context& ctx, std::size_t n) {
    if (!ctx.sp.path.empty()) {
        KWiseSpace space = from_descriptor(descriptor_from_json(read_json_file(ctx.sp.path)));
        if (space.n != n) {
            throw UsageError("space dimension " + std::to_string(space.n) + " does not match n = " + std::to_string(n));
        }
        return space;
    }
    if (ctx.sp.k == 0) {
        return std::nullopt;
    }
    return build_space(n, ctx.sp.k);
}

KWiseSpace require_space(const Context& ctx, std::size_t n) {
    auto space = load_space(ctx, n);
    if (!space) {
        throw UsageError("a sample space is required (--k K or --space FILE)");
    }
    return *space;
}

ParamSchedule schedule_of(const RunConfig& cfg) {
    return make_schedule(cfg.eps, cfg.C_const, cfg.c_const, cfg.mode, cfg.log_base);
}

void emit(const Context& ctx, const std::string& text) {
    if (ctx.cfg.output.empty() || ctx.cfg.output == "-") {
        *ctx.out << text;
    } else {
        write_text_file(ctx.cfg.output, text);
    }
}

void emit(const Context& ctx, const Json& j) { emit(ctx, j.dump(2) + "\n"); }

Json rationals(const std::vector<Rational>& v) {
    Json a = Json::array();
    for (const auto& r : v) a.push_back(to_string(r));
    return a;
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

std::string signs(const std::vector<std::int8_t>& p) {
    std::string s;
    for (auto v : p) s += v > 0 ? '+' : '-';
    return s;
}

Json to_json(const ParamSchedule& s) {
    Json j;
    j["eps"] = s.eps;
    j["C"] = s.C;
    j["c"] = s.c;
    j["mode"] = to_string(s.mode);
    j["log_base"] = to_string(s.log_base);
    j["a"] = s.a;
    j["m"] = s.m;
    j["K"] = s.K;
    j["Z"] = s.Z;
    j["L"] = s.L;
    j["t_sep"] = s.t_sep;
    return j;
}

Json crit_json(const std::optional<std::size_t>& c) { return c ? Json(*c) : Json("infinity"); }

Json cell_json(const CellFailure& c) {
    return Json{{"subset", c.subset}, {"pattern", signs(c.pattern)}, {"count", c.count},
                {"expected", to_string(c.expected)}};
}

Json violation_json(const std::vector<DecayViolation>& v) {
    Json a = Json::array();
    for (const auto& d : v) {
        a.push_back({{"i", d.i}, {"j", d.j}, {"lhs", d.lhs}, {"rhs", d.rhs}, {"inequality", d.inequality}});
    }
    return a;
}

Json decay_json(const DecayReport& d) {
    Json j;
    j["crit_index"] = crit_json(d.crit_index);
    j["pairs_checked"] = d.pairs_checked;
    j["violations"] = violation_json(d.violations);
    j["spaced_clause_applicable"] = d.spaced_clause_applicable;
    j["spaced_pairs_checked"] = d.spaced_pairs_checked;
    j["spaced_violations"] = violation_json(d.spaced_violations);
    j["separated"] = d.separated;
    j["separation_checked"] = d.separation_checked;
    j["separation_skipped"] = d.separation_skipped;
    j["separated_ratio_ok"] = d.separated_ratio_ok;
    j["separation_gap"] = d.separation_gap;
    j["separation_bound"] = d.separation_bound;
    j["separation_ok"] = d.separation_ok;
    j["passed"] = d.passed();
    return j;
}

Json sign_approx_json(const SignApprox& p) {
    Json j;
    j["a"] = p.a;
    j["m"] = p.m;
    j["degree"] = 2 * p.m + 1;
    j["M"] = to_decimal(p.M);
    j["iterations"] = p.iterations;
    j["spread"] = p.spread;
    j["bits"] = p.bits;
    Json alt = Json::array();
    for (std::size_t i = 0; i < p.alternation_z.size(); ++i) {
        alt.push_back({{"z", to_decimal(p.alternation_z[i])},
                       {"t", to_decimal(p.alternation_t[i])},
                       {"error_sign", p.error_signs[i] > 0 ? "+" : "-"}});
    }
    j["alternation_count"] = p.alternation_z.size();
    j["alternation"] = std::move(alt);
    j["r"] = to_json(p.r);
    j["p"] = to_json(p.p);
    return j;
}

bool alternates(const SignApprox& p) {
    if (p.alternation_z.size() != p.m + 2) return false;
    for (std::size_t i = 1; i < p.error_signs.size(); ++i) {
        if (p.error_signs[i] == p.error_signs[i - 1]) return false;
    }
    return true;
}

void check_desk_scale(const ParamSchedule& s, const Limits& limits) {
    constexpr std::int64_t kMaxM = 2000;
    if (s.m > kMaxM && !limits.unsafe) {
        throw ResourceLimit("schedule degree m = " + std::to_string(s.m) + " exceeds the desk-scale limit " +
                            std::to_string(kMaxM) + " (pass --unsafe to try anyway)");
    }
}

UpperApprox make_P(const RunConfig& cfg, const ParamSchedule& s) {
    check_desk_scale(s, cfg.limits);
    const SignApprox p = remez_best_sign_approx(s.a, static_cast<std::size_t>(s.m), cfg.precision_bits);
    return build_P(p, s.eps, s.a);
}

// Subcommands. Each returns the exit code.

int cmd_gen(Context& ctx, std::size_t n, std::uint64_t samples, const std::string& descriptor_path) {
    if (n == 0) throw UsageError("gen needs --n");
    const KWiseSpace space = require_space(ctx, n);
    if (!descriptor_path.empty()) {
        write_text_file(descriptor_path, to_json(describe(space)).dump(2) + "\n");
    }
    std::ostringstream rows;
    auto row = [&](std::uint64_t seed) {
        std::vector<std::uint8_t> bits(space.s);
        for (unsigned j = 0; j < space.s; ++j) bits[j] = (seed >> j) & 1U;
        const auto x = sample(space, bits);
        for (std::size_t i = 0; i < x.size(); ++i) {
            rows << (i ? " " : "") << static_cast<int>(x[i]);
        }
        rows << '\n';
    };
    if (samples == 0) {
        check_enumerable(space, ctx.cfg.limits);
        for (std::uint64_t seed = 0; seed < space.support_size(); ++seed) row(seed);
    } else {
        CounterRng rng(ctx.cfg.rng_seed.value_or(1));
        const std::uint64_t mask = space.s >= 64 ? ~std::uint64_t{0} : space.support_size() - 1;
        for (std::uint64_t i = 0; i < samples; ++i) row(rng.next() & mask);
    }
    emit(ctx, rows.str());
    return kOk;
}

int cmd_verify(Context& ctx, std::size_t n, std::size_t level) {
    KWiseSpace space;
    if (!ctx.sp.path.empty()) {
        space = from_descriptor(descriptor_from_json(read_json_file(ctx.sp.path)));
        if (n != 0 && space.n != n) throw UsageError("--n does not match the space descriptor");
        if (level == 0) level = ctx.sp.k != 0 ? ctx.sp.k : space.k;
    } else {
        if (n == 0 || ctx.sp.k == 0) throw UsageError("verify-kwise needs --n and --k, or --space");
        space = build_space(n, ctx.sp.k);
        if (level == 0) level = ctx.sp.k;
    }
    const KWiseReport r = verify_kwise(space, level, ctx.cfg.limits);
    Json j;
    j["space"] = to_json(describe(space));
    j["level"] = r.level;
    j["passed"] = r.passed;
    j["expected_count"] = to_string(r.expected_count);
    j["subsets_checked"] = r.subsets_checked;
    j["cells_checked"] = r.cells_checked;
    j["failure"] = r.failure ? cell_json(*r.failure) : Json(nullptr);
    Json cells = Json::array();
    for (const auto& c : r.failing_cells) cells.push_back(cell_json(c));
    j["failing_cells"] = std::move(cells);
    j["fixings_checked"] = r.fixings_checked;
    j["conditional_skipped"] = r.conditional_skipped;
    if (r.conditional_failure) {
        const auto& f = *r.conditional_failure;
        j["conditional_failure"] = {{"fixed", f.fixed}, {"fixed_pattern", signs(f.fixed_pattern)},
                                    {"cell", cell_json(f.cell)}};
    } else {
        j["conditional_failure"] = nullptr;
    }
    emit(ctx, j);
    return r.passed ? kOk : kInvariantFailed;
}

int cmd_critical(Context& ctx, std::size_t head) {
    const Halfspace h = normalize(load_halfspace(ctx));
    const ParamSchedule s = schedule_of(ctx.cfg);
    const SortedHalfspace sh = sort_weights(h);
    const DecompositionReport d = head == 0 ? decompose(sh, s.eps, s) : decompose_with_head(sh, s.eps, s, head);
    const DecayReport decay = check_geometric_decay(sh, s.eps, s);
    Json j;
    j["schedule"] = to_json(s);
    j["perm"] = sh.perm;
    j["sorted_weights"] = sh.base.weights;
    j["theta"] = sh.base.theta;
    j["tau"] = d.tau;
    j["crit_index"] = crit_json(d.crit_index);
    j["sigma"] = d.sigma;
    j["head"] = d.head;
    j["tail"] = d.tail;
    j["separated"] = {{"indices", d.separated.indices}, {"spacing", d.separated.spacing},
                      {"requested", d.separated.requested}, {"clipped", d.separated.clipped}};
    j["t_sep"] = d.t_sep;
    j["L"] = d.L;
    j["head_covers_all"] = d.head_covers_all;
    j["decay"] = decay_json(decay);
    emit(ctx, j);
    return decay.passed() ? kOk : kInvariantFailed;
}

Json record_json(const CompositionRecord& r) {
    Json j;
    j["is_constant"] = r.is_constant;
    if (r.is_constant) {
        j["constant"] = r.constant;
    } else {
        j["out_sign"] = r.out_sign;
        j["weights"] = r.weights;
        j["offset"] = r.offset;
        j["Z"] = r.Z;
    }
    return j;
}

int cmd_sandwich(Context& ctx, bool allow_irregular, const std::string& gap_mode, std::uint64_t samples,
                 std::size_t random_n, double tau, const std::string& poly_out) {
    Halfspace h;
    if (random_n != 0) {
        CounterRng rng(ctx.cfg.rng_seed.value_or(1));
        h = random_regular_halfspace(random_n, tau, ctx.hs.theta, rng);
    } else {
        h = normalize(load_halfspace(ctx));
    }
    const ParamSchedule s = schedule_of(ctx.cfg);
    const UpperApprox P = make_P(ctx.cfg, s);
    if (!poly_out.empty()) write_text_file(poly_out, to_json(P.P).dump(2) + "\n");
    SandwichOptions opt;
    opt.require_regular = !allow_irregular;
    const SandwichPair pair = build_sandwich(h, P, s, opt);
    const bool exhaustive_ok = h.dim() <= 24 || ctx.cfg.limits.unsafe;
    const GapMode mode = gap_mode.empty() ? (exhaustive_ok ? GapMode::exhaustive : GapMode::montecarlo)
                                          : parse_gap_mode(gap_mode);
    if (mode == GapMode::montecarlo && samples == 0) samples = 100000;
    const GapReport g = expected_gap(pair, s, mode, samples, ctx.cfg.rng_seed.value_or(1), ctx.cfg.limits);

    Json j;
    j["schedule"] = to_json(s);
    j["halfspace"] = to_json(h);
    j["branch"] = to_string(pair.branch);
    j["mirrored"] = pair.mirrored;
    j["degree"] = pair.degree;
    j["upper"] = record_json(pair.upper);
    j["lower"] = record_json(pair.lower);
    bool ok = g.gap_u >= 0.0 && g.gap_l >= 0.0;
    if (exhaustive_ok) {
        const PointwiseReport pw = verify_pointwise(pair, ctx.cfg.limits);
        j["pointwise"] = {{"passed", pw.passed},
                          {"points", pw.points},
                          {"min_upper_margin", pw.min_upper_margin},
                          {"min_lower_margin", pw.min_lower_margin},
                          {"worst_upper_point", signs(pw.worst_upper_point)},
                          {"worst_lower_point", signs(pw.worst_lower_point)},
                          {"tolerance", pw.tolerance}};
        ok = ok && pw.passed;
    } else {
        j["pointwise"] = nullptr;
    }
    Json gj = hsprg::to_json(g);
    gj["bound_u"] = decimal_string(g.bound_u);
    gj["bound_l"] = decimal_string(g.bound_l);
    gj["within_bound"] = g.within_bound;
    gj["bound_asserted"] = g.bound_asserted;
    j["gap"] = std::move(gj);
    if (g.bound_asserted) ok = ok && g.within_bound;
    j["passed"] = ok;
    emit(ctx, j);
    return ok ? kOk : kInvariantFailed;
}

int cmd_fool(Context& ctx) {
    const Halfspace h = load_halfspace(ctx);
    const KWiseSpace space = require_space(ctx, h.dim());
    const BiasReport bu = exact_bias(h, ctx.cfg.limits);
    const BiasReport bs = bias_under_space(h, space, ctx.cfg.limits);
    const Rational d = bs.bias - bu.bias;
    const Rational err = d < 0 ? -d : d;
    Json j;
    j["halfspace"] = to_json(h);
    j["space"] = to_json(describe(space));
    j["bias_uniform"] = to_string(bu.bias);
    j["bias_space"] = to_string(bs.bias);
    j["fooling_error"] = to_string(err);
    j["fooling_error_float"] = decimal_string(to_double(err));
    emit(ctx, j);
    // A fully independent space reproduces the uniform distribution exactly.
    return space.k >= space.n && err != 0 ? kInvariantFailed : kOk;
}

int cmd_sweep(Context& ctx, std::size_t k_min, std::size_t k_max, const std::vector<double>& eps_grid,
              const std::string& thresholds_path) {
    if (ctx.hs.family.empty() || ctx.hs.n == 0) throw UsageError("sweep needs --family and --n");
    FamilySpec spec;
    spec.name = parse_family(ctx.hs.family);
    spec.n = ctx.hs.n;
    spec.rho = ctx.hs.rho;
    spec.theta = ctx.hs.theta;
    spec.rng_seed = ctx.hs.family_seed;
    if (k_max == 0) k_max = spec.n;
    if (k_min < 1 || k_min > k_max || k_max > spec.n) throw UsageError("need 1 <= k-min <= k-max <= n");
    std::vector<std::size_t> ks;
    for (std::size_t k = k_min; k <= k_max; ++k) ks.push_back(k);
    const SweepTable t = sweep(spec, ks, eps_grid, ctx.cfg.limits);
    emit(ctx, sweep_csv(t));
    if (!thresholds_path.empty()) {
        Json a = Json::array();
        for (const auto& th : t.thresholds) {
            a.push_back({{"eps", th.eps}, {"min_k", th.min_k ? Json(*th.min_k) : Json(nullptr)}});
        }
        write_text_file(thresholds_path, a.dump(2) + "\n");
    }
    for (const auto& r : t.rows) {
        if (r.k == r.n && r.error != 0) return kInvariantFailed;
    }
    return kOk;
}

int cmd_chow(Context& ctx) {
    const Halfspace h = load_halfspace(ctx);
    const auto space = load_space(ctx, h.dim());
    const auto chow = chow_parameters(h, space ? &*space : nullptr, ctx.cfg.limits);
    Json j;
    j["distribution"] = space ? space_tag(*space) : "uniform";
    j["chow"] = rationals(chow);
    Json f = Json::array();
    for (const auto& r : chow) f.push_back(decimal_string(to_double(r)));
    j["chow_float"] = std::move(f);
    emit(ctx, j);
    return kOk;
}

int cmd_influence(Context& ctx, std::size_t index, const std::string& method) {
    const Halfspace h = load_halfspace(ctx);
    const auto space = load_space(ctx, h.dim());
    std::vector<InfluenceMethod> methods;
    if (method == "all") {
        methods = {InfluenceMethod::direct, InfluenceMethod::halfspace_identity};
        if (space) methods.push_back(InfluenceMethod::via_space);
    } else {
        bool found = false;
        for (auto m : {InfluenceMethod::direct, InfluenceMethod::halfspace_identity, InfluenceMethod::via_space}) {
            if (to_string(m) == method) {
                methods = {m};
                found = true;
            }
        }
        if (!found) throw UsageError("unknown influence method '" + method + "'");
    }
    if (index > h.dim()) throw UsageError("--index must lie in [1, n] (0: all)");
    const std::size_t lo = index == 0 ? 1 : index;
    const std::size_t hi = index == 0 ? h.dim() : index;
    Json rows = Json::array();
    bool agree = true;
    for (std::size_t i = lo; i <= hi; ++i) {
        Json row;
        row["index"] = i;
        std::optional<Rational> direct, identity;
        for (auto m : methods) {
            const auto r = influence(h, i, m, space ? &*space : nullptr, ctx.cfg.limits);
            row[to_string(m)] = to_string(r.value);
            if (m == InfluenceMethod::direct) direct = r.value;
            if (m == InfluenceMethod::halfspace_identity) identity = r.value;
        }
        if (direct && identity) {
            row["identity_holds"] = *direct == *identity;
            agree = agree && *direct == *identity;
        }
        rows.push_back(std::move(row));
    }
    Json j;
    j["distribution"] = space ? space_tag(*space) : "uniform";
    j["influences"] = std::move(rows);
    emit(ctx, j);
    return agree ? kOk : kInvariantFailed;
}

int cmd_count(Context& ctx) {
    const Halfspace h = load_halfspace(ctx);
    const KWiseSpace space = require_space(ctx, h.dim());
    const CountEstimate c = approx_count(h, space, ctx.cfg.limits);
    Json j;
    j["space"] = to_json(describe(space));
    j["estimate"] = to_string(c.estimate);
    j["exact"] = c.exact ? Json(to_string(*c.exact)) : Json(nullptr);
    j["realized_error"] = c.realized_error ? Json(to_string(*c.realized_error)) : Json(nullptr);
    emit(ctx, j);
    return kOk;
}

int cmd_remez(Context& ctx, double a, std::size_t m) {
    if (!(a > 0.0 && a < 1.0)) throw UsageError("--a must lie in (0, 1)");
    const SignApprox p = remez_best_sign_approx(a, m, ctx.cfg.precision_bits);
    Json j = sign_approx_json(p);
    const bool ok = alternates(p);
    j["equioscillates"] = ok;
    emit(ctx, j);
    return ok ? kOk : kInvariantFailed;
}

int cmd_check_P(Context& ctx, std::size_t density, const std::string& poly_out) {
    const ParamSchedule s = schedule_of(ctx.cfg);
    const UpperApprox P = make_P(ctx.cfg, s);
    if (!poly_out.empty()) write_text_file(poly_out, to_json(P.P).dump(2) + "\n");
    const PropertyReport r = check_P_properties(P, density);
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"worst_margin", c.worst_margin},
                          {"worst_t", c.worst_t},
                          {"points", c.points}});
    }
    Json j;
    j["schedule"] = to_json(s);
    j["M"] = to_decimal(P.source.M);
    j["degree"] = P.degree();
    j["K"] = P.K;
    j["sampled"] = r.sampled;
    j["grid_density"] = r.grid_density;
    j["checks"] = std::move(checks);
    j["passed"] = r.passed();
    emit(ctx, j);
    return r.passed() ? kOk : kInvariantFailed;
}

Json tails_json(const std::vector<TailCheck>& v) {
    Json a = Json::array();
    for (const auto& c : v) {
        a.push_back({{"level", c.level}, {"measured", c.measured}, {"bound", c.bound}, {"ok", c.ok}});
    }
    return a;
}

int cmd_large_crit(Context& ctx, std::size_t head, bool ignore_crit) {
    const Halfspace h = load_halfspace(ctx);
    const ParamSchedule s = schedule_of(ctx.cfg);
    const KWiseSpace space = load_space(ctx, h.dim()).value_or(build_space(h.dim(), h.dim()));
    LargeCritOptions opt;
    opt.head_size = head;
    opt.ignore_crit_precondition = ignore_crit;
    const LargeCritReport r = large_crit_experiment(h, s, space, opt, ctx.cfg.limits);
    Json j;
    j["schedule"] = to_json(s);
    j["space"] = to_json(describe(space));
    j["skipped"] = r.skipped;
    j["skip_reason"] = r.skip_reason;
    j["crit_index"] = crit_json(r.crit_index);
    j["L"] = r.L;
    j["head_size"] = r.head_size;
    j["tail_size"] = r.tail_size;
    j["separated"] = r.separated;
    j["k_t"] = r.k_t;
    j["w_kt"] = r.w_kt;
    j["sigma_T"] = r.sigma_T;
    j["bad_event"] = {{"head_assignments", r.head_assignments}, {"bad_assignments", r.bad_assignments},
                      {"frequency", r.bad_frequency},         {"eps_over_10", r.eps_over_10},
                      {"separation_bound", r.separation_bound}, {"ok", r.bad_event_ok}};
    j["tail_norm_ok"] = r.tail_norm_ok;
    j["decay"] = decay_json(r.decay);
    j["tails"] = {{"vacuous", r.tails_vacuous},
                  {"hoeffding", tails_json(r.hoeffding)},
                  {"quoted_uniform_tail", r.quoted_uniform_tail},
                  {"quoted_uniform_bound", r.quoted_uniform_bound},
                  {"chebyshev", tails_json(r.chebyshev)},
                  {"quoted_space_tail", r.quoted_space_tail},
                  {"quoted_space_bound", r.quoted_space_bound},
                  {"space_fixings", r.space_fixings},
                  {"max_abs_mean", r.max_abs_mean},
                  {"max_var_deviation", r.max_var_deviation},
                  {"pairwise_tail", r.pairwise_tail},
                  {"ok", r.tails_ok}};
    j["max_flip_uniform"] = r.max_flip_uniform;
    j["max_flip_space"] = r.max_flip_space;
    j["fooling_error"] = to_string(r.fooling_error);
    j["good_part"] = r.good_part;
    j["bad_part"] = r.bad_part;
    j["bound_9eps"] = r.bound_9eps;
    j["passed"] = r.passed();
    emit(ctx, j);
    return r.passed() ? kOk : kInvariantFailed;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pseudorandom generators for halfspaces: k-wise spaces, sandwiching polynomials, fooling "
                 "experiments"};
    app.name("hsprg");
    app.require_subcommand(1);
    Context ctx;
    ctx.out = &out;
    bool print_config = false;

    std::size_t n = 0, level = 0, head = 0, index = 0, density = 1000, k_min = 1, k_max = 0, random_n = 0, m = 0;
    std::uint64_t samples = 0, seed = 0;
    double a = 0.0, tau = 0.2;
    bool allow_irregular = false, ignore_crit = false;
    std::string descriptor_path, gap_mode, method = "all", thresholds_path, poly_out;
    std::vector<double> eps_grid{0.01, 0.05, 0.1, 0.2};

    std::map<std::string, std::function<int()>> handlers;
    auto sub = [&](const std::string& name, const std::string& help, std::function<int()> fn) {
        CLI::App* s = app.add_subcommand(name, help);
        add_guards(s, ctx);
        s->add_option("--seed", seed, "Seed for every pseudo-random choice of the run");
        s->add_flag("--print-config", print_config, "Print the effective run configuration as JSON and exit");
        handlers[name] = std::move(fn);
        return s;
    };

    auto* gen = sub("gen", "Emit the points of a k-wise space as +1/-1 rows",
                    [&] { return cmd_gen(ctx, n, samples, descriptor_path); });
    gen->add_option("--n", n, "Dimension")->required();
    add_space(gen, ctx);
    gen->add_option("--samples", samples, "Number of sampled rows (0: the whole support)");
    gen->add_option("--descriptor", descriptor_path, "Also write the space descriptor JSON here");

    auto* ver = sub("verify-kwise", "Exhaustively verify k-wise uniformity of a space",
                    [&] { return cmd_verify(ctx, n, level); });
    ver->add_option("--n", n, "Dimension");
    add_space(ver, ctx);
    ver->add_option("--level", level, "Level to verify (default: --k, else the space's k)");

    auto* crit = sub("critical-index", "Critical index, head/tail decomposition and decay checks",
                     [&] { return cmd_critical(ctx, head); });
    add_halfspace(crit, ctx);
    add_schedule(crit, ctx);
    crit->add_option("--head", head, "Override the head size L");

    auto* sand = sub("sandwich", "Build and verify the sandwiching pair of a regular halfspace", [&] {
        return cmd_sandwich(ctx, allow_irregular, gap_mode, samples, random_n, tau, poly_out);
    });
    add_halfspace(sand, ctx);
    add_schedule(sand, ctx);
    sand->add_flag("--allow-irregular", allow_irregular, "Skip the regularity precondition");
    sand->add_option("--gap-mode", gap_mode, "exhaustive | montecarlo");
    sand->add_option("--samples", samples, "Monte Carlo sample count");
    sand->add_option("--random-n", random_n, "Use a random tau-regular halfspace of this dimension");
    sand->add_option("--tau", tau, "Regularity of the random halfspace");
    sand->add_option("--poly-out", poly_out, "Write P as polynomial JSON here");

    auto* fool = sub("fool", "Exact fooling error of a k-wise space", [&] { return cmd_fool(ctx); });
    add_halfspace(fool, ctx);
    add_space(fool, ctx);

    auto* sw = sub("sweep", "Fooling error against k as CSV",
                   [&] { return cmd_sweep(ctx, k_min, k_max, eps_grid, thresholds_path); });
    add_halfspace(sw, ctx);
    sw->add_option("--k-min", k_min, "Smallest k");
    sw->add_option("--k-max", k_max, "Largest k (default n)");
    sw->add_option("--eps-grid", eps_grid, "Error targets for the min-k thresholds")->delimiter(',');
    sw->add_option("--thresholds", thresholds_path, "Write the min-k thresholds JSON here");

    auto* chow = sub("chow", "Chow parameters under uniform or a k-wise space", [&] { return cmd_chow(ctx); });
    add_halfspace(chow, ctx);
    add_space(chow, ctx);

    auto* inf = sub("influence", "Influences by direct count and by the halfspace identity",
                    [&] { return cmd_influence(ctx, index, method); });
    add_halfspace(inf, ctx);
    add_space(inf, ctx);
    inf->add_option("--index", index, "Coordinate (1-based, 0: all)");
    inf->add_option("--method", method, "direct | halfspace_identity | via_space | all");

    auto* cnt = sub("count", "Approximate count of satisfying points", [&] { return cmd_count(ctx); });
    add_halfspace(cnt, ctx);
    add_space(cnt, ctx);

    auto* rz = sub("remez", "Best odd approximation to sign and its alternation set",
                   [&] { return cmd_remez(ctx, a, m); });
    rz->add_option("--a", a, "Gap a")->required();
    rz->add_option("--m", m, "Degree parameter (p has degree 2m+1)")->required();
    rz->add_option("--bits", ctx.cfg.precision_bits, "Working precision in bits (0: default)");

    auto* cp = sub("check-P", "Sampled property report of the univariate P",
                   [&] { return cmd_check_P(ctx, density, poly_out); });
    add_schedule(cp, ctx);
    cp->add_option("--density", density, "Grid points per unit length");
    cp->add_option("--poly-out", poly_out, "Write P as polynomial JSON here");

    auto* lc = sub("large-crit", "Large critical index experiment on the head/tail split",
                   [&] { return cmd_large_crit(ctx, head, ignore_crit); });
    add_halfspace(lc, ctx);
    add_schedule(lc, ctx);
    add_space(lc, ctx);
    lc->add_option("--head", head, "Override the head size L");
    lc->add_flag("--ignore-crit", ignore_crit, "Run even when the critical index is at most L");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    const auto chosen = app.get_subcommands();
    const std::string name = chosen.front()->get_name();
    ctx.cfg.command = name;
    if (chosen.front()->count("--seed") > 0) ctx.cfg.rng_seed = seed;
    try {
        ctx.cfg.limits.validate();
        if (print_config) {
            out << to_json(ctx.cfg).dump(2) << "\n";
            return kOk;
        }
        return handlers.at(name)();
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << chosen.front()->help();
        return kUsage;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const InvalidConfig& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ResourceLimit& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        err << "failed: " << e.what() << "\n";
        return kInvariantFailed;
    }
}

} // namespace hsprg::cli
