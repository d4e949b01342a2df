// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "gen.hpp"
#include "hsprg/approx.hpp"
#include "hsprg/fooling.hpp"
#include "hsprg/kwise.hpp"
#include "hsprg/sandwich.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace hsprg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s (%s; %.1f s)\n", id, name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(start));
    std::fflush(stdout);
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double dabs(const Real& x) { return std::abs(static_cast<double>(x)); }

Outcome kwise_exactness() {
    const auto start = Clock::now();
    const auto space = build_space(10, 3);
    const auto rep = verify_kwise(space, 3);
    const double t = seconds_since(start);
    const bool cells = rep.cells_checked == binomial(10, 3) * 8;
    const bool expected = rep.expected_count == Rational(std::int64_t{1} << (space.s - 3));
    return {rep.passed && cells && expected && t < 60.0,
            "s=" + std::to_string(space.s) + " cells=" + std::to_string(rep.cells_checked) + " expected per cell " +
                to_string(rep.expected_count) + " runtime " + fmt(t) + " s"};
}

Outcome negative_control() {
    const auto space = build_space(3, 2);
    const auto rep = verify_kwise(space, 3);
    if (space.support_size() != 4 || rep.passed || !rep.failure) {
        return {false, "pairwise space of size " + std::to_string(space.support_size()) + " did not fail at level 3"};
    }
    const auto& f = *rep.failure;
    const bool cell = f.pattern == std::vector<std::int8_t>{1, 1, -1} && f.count == 0;
    std::string pat;
    for (auto v : f.pattern) pat += v > 0 ? '+' : '-';
    return {cell, "reported cell (" + pat + ") count " + std::to_string(f.count)};
}

Outcome remez_analytic() {
    PrecisionScope scope(128);
    const double a = 1.0 / 3.0;
    const auto p = remez_best_sign_approx(a, 0);
    const double r0 = static_cast<double>(p.r.coeffs().at(0));
    const double M = static_cast<double>(p.M);
    const bool ok = std::abs(r0 - 2.0 / (1.0 + a)) <= 1e-10 && std::abs(r0 - 1.5) <= 1e-10 &&
                    std::abs(M - 0.5) <= 1e-10 && p.alternation_t.size() == 2 && p.r.degree() == 0;
    return {ok, "r0=" + fmt(r0) + " M=" + fmt(M) + " alternation points " + std::to_string(p.alternation_t.size())};
}

Outcome equioscillation() {
    const auto start = Clock::now();
    const auto p = remez_best_sign_approx(0.1, 10);
    const double t_solve = seconds_since(start);
    PrecisionScope scope(p.bits);
    const Real M = p.M;
    auto err = [&](const Real& t) { return abs(1 - p.p(t)); };

    Real emin = M * 2, emax = 0;
    for (const auto& t : p.alternation_t) {
        const Real e = err(t);
        emin = e < emin ? e : emin;
        emax = e > emax ? e : emax;
    }
    const double spread = static_cast<double>((emax - emin) / emax);
    bool signs = p.error_signs.size() == 12;
    for (std::size_t i = 1; signs && i < p.error_signs.size(); ++i) signs = p.error_signs[i] == -p.error_signs[i - 1];

    // Dense grid on [a, 1], each local maximum refined by golden-section search.
    const int N = 100000;
    const Real lo = Real(0.1);
    const Real h = (1 - lo) / N;
    std::vector<Real> e(N + 1);
    for (int i = 0; i <= N; ++i) e[i] = err(lo + h * i);
    Real grid_max = 0;
    const Real g = (sqrt(Real(5)) - 1) / 2;
    for (int i = 0; i <= N; ++i) {
        const bool left = i == 0 || e[i] >= e[i - 1];
        const bool right = i == N || e[i] >= e[i + 1];
        if (!(left && right)) continue;
        Real x0 = lo + h * std::max(i - 1, 0), x1 = lo + h * std::min(i + 1, N);
        for (int it = 0; it < 80; ++it) {
            const Real c = x1 - g * (x1 - x0), d = x0 + g * (x1 - x0);
            if (err(c) > err(d)) x1 = d; else x0 = c;
        }
        const Real best = std::max({e[i], err((x0 + x1) / 2)});
        grid_max = best > grid_max ? best : grid_max;
    }
    const double rel = dabs((grid_max - M) / M);
    const bool ok = p.alternation_t.size() == 12 && signs && spread <= 1e-8 && rel <= 1e-8 && t_solve < 60.0;
    return {ok, "alternation points " + std::to_string(p.alternation_t.size()) + " spread " + fmt(spread) +
                    " dense max vs M rel " + fmt(rel) + " M=" + fmt(static_cast<double>(M)) + " solve " +
                    fmt(t_solve) + " s"};
}

Outcome certificate_ordering() {
    std::ostringstream os;
    bool ok = true;
    for (double a : {0.5, 1.0 / 3.0, 0.25}) {
        const double eps = 0.9;
        const auto s = schedule_for_gap(a, eps, 1.0);
        const auto cert = certify_error(a, eps, s, false);
        const auto p = remez_best_sign_approx(a, cert.degree_budget_m);
        const double M = static_cast<double>(p.M);
        const bool pair_ok = M <= cert.measured_error;
        ok = ok && pair_ok;
        os << "a=" << fmt(a) << " m=" << cert.degree_budget_m << " M=" << fmt(M) << (pair_ok ? " <= " : " > ")
           << fmt(cert.measured_error) << "; ";
    }
    auto text = os.str();
    text.resize(text.size() - 2);
    return {ok, text};
}

UpperApprox default_P(const ParamSchedule& s) {
    const auto p = remez_best_sign_approx(s.a, static_cast<std::size_t>(s.m));
    return build_P(p, s.eps, s.a);
}

Outcome sandwich_validity() {
    const auto s = make_schedule(0.2, 1, 1, ScheduleMode::empirical);
    CounterRng rng(6);
    try {
        random_regular_halfspace(16, 0.2, 0.0, rng);
    } catch (const PreconditionFailed& e) {
        // Not counted: the same checks on the nearest feasible instances.
        const auto start = Clock::now();
        const auto P = default_P(s);
        CounterRng drng(6);
        int valid = 0;
        int gaps_ok = 0;
        double worst = 1e300;
        for (int i = 0; i < 100; ++i) {
            const double theta = (2 * drng.uniform() - 1) * 1.5 * s.Z;
            const auto h = random_regular_halfspace(16, 0.3, theta, drng);
            const auto pair = build_sandwich(h, P, s, SandwichOptions{false});
            const auto pw = verify_pointwise(pair);
            const auto gap = expected_gap(pair, s, GapMode::exhaustive);
            valid += pw.passed ? 1 : 0;
            gaps_ok += gap.gap_u >= 0 && gap.gap_l >= 0 ? 1 : 0;
            worst = std::min({worst, pw.min_upper_margin, pw.min_lower_margin});
        }
        std::printf("  diagnostic (not counted): tau=0.3, n=16, eps=0.2: %d/100 pointwise valid, %d/100 gaps >= 0, "
                    "min margin %s, %.1f s\n",
                    valid, gaps_ok, fmt(worst).c_str(), seconds_since(start));
        return {false, std::string("infeasible: ") + e.what()};
    }
    return {false, "unexpected: a 0.2-regular unit vector in dimension 16 was produced"};
}

Outcome p_properties() {
    const auto s = make_schedule(0.2, 1, 1, ScheduleMode::empirical);
    const auto P = default_P(s);
    const auto rep = check_P_properties(P, 1000);
    std::string failed;
    for (const auto& c : rep.checks) {
        if (!c.passed) failed += " " + c.name + "@" + fmt(c.worst_t);
    }
    return {rep.passed(), "deg P=" + std::to_string(P.degree()) + " checks " + std::to_string(rep.checks.size()) +
                              (failed.empty() ? " all passed" : " failed:" + failed)};
}

Outcome fooling_identities() {
    CounterRng rng(8);
    int zero = 0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = gen::pick(rng, 1, 14);
        const auto h = i % 2 ? gen::int_halfspace(rng, n).as_halfspace() : gen::gaussian_halfspace(rng, n);
        zero += fooling_error(h, build_space(n, n)) == Rational(0) ? 1 : 0;
    }
    const auto pair = build_space(3, 2);
    const auto maj = fooling_error(make_halfspace({1, 1, 1}, 0), pair);
    return {zero == 50 && pair.support_size() == 4 && maj == Rational(1, 2),
            std::to_string(zero) + "/50 exact zeros at k=n; majority_3 on 4-point space " + to_string(maj)};
}

Outcome influence_identity() {
    CounterRng rng(9);
    int agree = 0;
    std::size_t coords = 0;
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = gen::pick(rng, 1, 12);
        const auto h = i % 2 ? gen::int_halfspace(rng, n, 3).as_halfspace() : gen::gaussian_halfspace(rng, n);
        bool all = true;
        for (std::size_t j = 1; j <= n; ++j) {
            all = all && influence(h, j, InfluenceMethod::direct).value ==
                             influence(h, j, InfluenceMethod::halfspace_identity).value;
        }
        coords += n;
        agree += all ? 1 : 0;
    }
    const auto maj = make_halfspace({1, 1, 1}, 0);
    bool half = true;
    for (std::size_t j = 1; j <= 3; ++j) {
        half = half && influence(maj, j, InfluenceMethod::direct).value == Rational(1, 2) &&
               influence(maj, j, InfluenceMethod::halfspace_identity).value == Rational(1, 2);
    }
    const auto chow = chow_parameters(maj);
    const bool chow_ok = chow == std::vector<Rational>{0, Rational(1, 2), Rational(1, 2), Rational(1, 2)};
    return {agree == 200 && half && chow_ok, std::to_string(agree) + "/200 halfspaces agree on all " +
                                                 std::to_string(coords) + " coordinates; majority_3 influences " +
                                                 (half ? "1/2" : "wrong") + "; Chow " + (chow_ok ? "ok" : "wrong")};
}

Outcome large_crit() {
    const auto s = make_schedule(0.5, 1, 1, ScheduleMode::empirical);
    const auto h = family({FamilyName::exponential, 20});
    const auto main = large_crit_experiment(h, s, build_space(20, 20));
    if (main.skipped) return {false, "skipped: " + main.skip_reason};

    // The main instance has an empty tail, so the tail inequalities are
    // measured on a split with a 4-coordinate head under a 6-wise space.
    LargeCritOptions opt;
    opt.head_size = 4;
    opt.ignore_crit_precondition = true;
    const auto split = large_crit_experiment(h, s, build_space(20, 6), opt);
    bool tails = !split.skipped && !split.tails_vacuous && split.pairwise_tail;
    for (const auto& t : split.hoeffding) tails = tails && t.ok;
    for (const auto& t : split.chebyshev) tails = tails && t.ok;

    std::ostringstream os;
    os << "bad event " << main.bad_assignments << "/" << main.head_assignments << " = " << fmt(main.bad_frequency)
       << " <= eps/10 = " << fmt(main.eps_over_10) << "; decay " << (main.decay.passed() ? "ok" : "violated")
       << ", separation " << (main.decay.separation_ok ? "ok" : "violated") << ", tail norm "
       << (main.tail_norm_ok ? "ok" : "violated") << "; head-4 split: " << split.hoeffding.size()
       << " Hoeffding and " << split.chebyshev.size() << " Chebyshev levels " << (tails ? "within bounds" : "violated");
    return {main.passed() && main.bad_frequency <= main.eps_over_10 && tails, os.str()};
}

} // namespace

int main() {
    report(1, "k-wise exactness", kwise_exactness);
    report(2, "negative control", negative_control);
    report(3, "Remez analytic oracle", remez_analytic);
    report(4, "equioscillation", equioscillation);
    report(5, "error-certificate ordering", certificate_ordering);
    report(6, "sandwich validity", sandwich_validity);
    report(7, "P property report", p_properties);
    report(8, "fooling exact identities", fooling_identities);
    report(9, "influence identity", influence_identity);
    report(10, "large critical index experiment", large_crit);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
