#include "hsprg/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hsprg {

namespace bmp = boost::multiprecision;

std::vector<ExactRational> amplifier_power_coeffs(int k) {
    if (k < 1) {
        throw InvalidInput("amplifier degree k must be at least 1");
    }
    using bmp::cpp_int;
    // (1+u)^j (1-u)^(k-j) with integer coefficients, then scaled by 2^-k.
    std::vector<cpp_int> total(static_cast<std::size_t>(k) + 1, 0);
    cpp_int binom = 1; // C(k, j), updated incrementally
    for (int j = 0; j <= k; ++j) {
        if (j > 0) {
            binom = binom * (k - j + 1) / j;
        }
        if (2 * j < k) {
            continue;
        }
        std::vector<cpp_int> poly{1};
        auto times = [&poly](int sign) {
            std::vector<cpp_int> next(poly.size() + 1, 0);
            for (std::size_t i = 0; i < poly.size(); ++i) {
                next[i] += poly[i];
                next[i + 1] += sign * poly[i];
            }
            poly = std::move(next);
        };
        for (int i = 0; i < j; ++i) times(+1);
        for (int i = j; i < k; ++i) times(-1);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            total[i] += binom * poly[i];
        }
    }
    const cpp_int denom = cpp_int(1) << k;
    std::vector<ExactRational> out;
    out.reserve(total.size());
    for (const auto& c : total) {
        out.emplace_back(c, denom);
    }
    return out;
}

std::vector<ExactRational> power_to_chebyshev(const std::vector<ExactRational>& power) {
    // Horner in the Chebyshev basis: x T_0 = T_1, x T_k = (T_{k+1} + T_{k-1}) / 2.
    std::vector<ExactRational> acc{ExactRational(0)};
    for (std::size_t i = power.size(); i-- > 0;) {
        std::vector<ExactRational> next(acc.size() + 1, ExactRational(0));
        for (std::size_t k = 0; k < acc.size(); ++k) {
            if (acc[k] == 0) continue;
            if (k == 0) {
                next[1] += acc[0];
            } else {
                next[k + 1] += acc[k] / 2;
                next[k - 1] += acc[k] / 2;
            }
        }
        next[0] += power[i];
        acc = std::move(next);
    }
    while (acc.size() > 1 && acc.back() == 0) {
        acc.pop_back();
    }
    return acc;
}

UniPoly amplifier(int k, unsigned bits) {
    const auto cheb = power_to_chebyshev(amplifier_power_coeffs(k));
    PrecisionScope scope(bits);
    std::vector<Real> c;
    c.reserve(cheb.size());
    for (const auto& q : cheb) {
        c.push_back(Real(bmp::numerator(q)) / Real(bmp::denominator(q)));
    }
    return UniPoly(-1.0, 1.0, std::move(c));
}

unsigned default_sign_bits(std::size_t m) { return static_cast<unsigned>(std::max<std::size_t>(128, 4 * m)); }

namespace {

UniPoly odd_part(const UniPoly& poly) {
    std::vector<Real> c = poly.coeffs();
    for (std::size_t j = 0; j < c.size(); j += 2) {
        c[j] = 0;
    }
    return UniPoly(poly.lo(), poly.hi(), std::move(c));
}

int sign_of(const Real& x) { return x < 0 ? -1 : 1; }

} // namespace

SignApprox remez_best_sign_approx(double a, std::size_t m, unsigned precision_bits) {
    if (!(a > 0.0 && a < 1.0)) {
        throw InvalidInput("sign approximation requires 0 < a < 1");
    }
    const unsigned bits = precision_bits == 0 ? default_sign_bits(m) : std::max(precision_bits, 64U);
    PrecisionScope scope(bits);

    RemezProblem pb;
    pb.target = [](const Real& z) { return 1 / bmp::sqrt(z); };
    pb.weight = [](const Real& z) { return bmp::sqrt(z); };
    pb.lo = Real(a) * Real(a);
    pb.hi = Real(1);
    pb.degree = m;
    pb.bits = bits;
    const RemezResult res = remez(pb);

    SignApprox out;
    out.a = a;
    out.m = m;
    out.bits = bits;
    out.M = res.max_error;
    out.iterations = res.iterations;
    out.spread = res.spread;
    out.alternation_z = res.reference;
    for (std::size_t j = 0; j < res.reference.size(); ++j) {
        out.alternation_t.push_back(bmp::sqrt(res.reference[j]));
        out.error_signs.push_back(sign_of(res.reference_errors[j]));
    }
    auto r_of = [&res](const Real& z) { return res.eval(z); };
    out.r = chebyshev_interpolate(r_of, a * a, 1.0, m, bits);
    auto p_of = [&res](const Real& t) { return t * res.eval(t * t); };
    out.p = odd_part(chebyshev_interpolate(p_of, -1.0, 1.0, 2 * m + 1, bits));
    return out;
}

ErrorCertificate certify_error(double a, double eps, const ParamSchedule& schedule, bool throw_on_failure,
                               std::size_t grid_points) {
    if (!(a > 0.0 && a < 1.0) || !(eps > 0.0 && eps < 1.0)) {
        throw InvalidInput("certificate requires 0 < a < 1 and 0 < eps < 1");
    }
    if (schedule.eps != eps || std::abs(schedule.a - a) > 1e-12 * a) {
        throw PreconditionFailed("schedule was derived from a different (a, eps)");
    }
    if (grid_points < 2) {
        throw InvalidInput("certificate grid needs at least 2 points per side");
    }
    ErrorCertificate cert;
    cert.a = a;
    cert.eps = eps;
    cert.ell = static_cast<std::size_t>(std::ceil(25.0 / a));
    cert.k = std::max(1, static_cast<int>(std::ceil(15.0 * schedule.log(1.0 / eps))));
    cert.target = eps * eps;
    cert.jackson_bound = 6.0 / (a * static_cast<double>(cert.ell));
    cert.amplification_bound = 2.0 * std::exp(-cert.k / 6.0);

    // The ramp is odd, so its best approximation of odd degree 2d+1 is also
    // the best of degree 2d+2; solving at the even degree keeps the
    // alternation count well posed.
    const std::size_t solve_degree = cert.ell % 2 == 0 ? cert.ell : cert.ell + 1;
    const unsigned bits = default_sign_bits(solve_degree);
    PrecisionScope scope(bits);
    const Real ra(a);
    RemezProblem pb;
    pb.target = [ra](const Real& t) {
        if (t >= ra) return Real(1);
        if (t <= -ra) return Real(-1);
        return t / ra;
    };
    pb.weight = [](const Real&) { return Real(1); };
    pb.lo = Real(-1);
    pb.hi = Real(1);
    pb.degree = solve_degree;
    pb.breakpoints = {-ra, ra};
    pb.bits = bits;
    const RemezResult res = remez(pb);
    cert.J_error = res.max_error;
    cert.J = odd_part(chebyshev_interpolate([&res](const Real& t) { return res.eval(t); }, -1.0, 1.0, solve_degree,
                                            bits));
    if (cert.J.degree() > cert.ell) {
        cert.J = truncate(cert.J, cert.ell);
    }
    cert.J_degree = cert.J.degree();
    cert.A = amplifier(cert.k, bits);
    cert.q_degree = cert.J_degree * static_cast<std::size_t>(cert.k);
    cert.degree_budget_m = cert.q_degree / 2;

    double worst = 0.0;
    for (std::size_t i = 0; i < grid_points; ++i) {
        const double t = a + (1.0 - a) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        worst = std::max(worst, std::abs(certificate_q(cert, t) - 1.0));
        worst = std::max(worst, std::abs(certificate_q(cert, -t) + 1.0));
    }
    cert.grid_points = 2 * grid_points;
    cert.measured_error = worst;
    cert.passed = worst <= cert.target;
    if (!cert.passed && throw_on_failure) {
        throw CertificateFailed("measured approximation error " + decimal_string(worst) + " exceeds eps^2 = " +
                                decimal_string(cert.target));
    }
    return cert;
}

double certificate_q(const ErrorCertificate& cert, double t) { return 2.0 * cert.A(0.8 * cert.J(t)) - 1.0; }

double UpperApprox::operator()(double t) const {
    const double q = 1.0 + eps * eps + source.p(t + a);
    return 0.5 * q * q - 1.0;
}

Real UpperApprox::operator()(const Real& t) const {
    const Real e(eps);
    const Real q = Real(1) + e * e + source.p(t + Real(a));
    return q * q / 2 - 1;
}

UpperApprox build_P(const SignApprox& p, double eps, double a, bool require_error_bound) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InvalidInput("eps must lie in (0, 1)");
    }
    if (a != p.a) {
        throw PreconditionFailed("build_P called with a different a than the sign approximation");
    }
    if (require_error_bound && p.M > Real(eps) * Real(eps)) {
        throw PreconditionFailed("sign approximation error " + to_decimal(p.M) + " exceeds eps^2");
    }
    const unsigned bits = std::max(p.bits, 128U);
    PrecisionScope scope(bits);
    const Real shift(a);
    const Real base = 1 + Real(eps) * Real(eps);
    auto f = [&](const Real& t) {
        const Real v = base + p.p(t + shift);
        return v * v / 2 - 1;
    };
    const std::size_t degree = 2 * p.p.degree();
    UpperApprox out;
    out.P = truncate(chebyshev_interpolate(f, -1.0 - a, 1.0, degree, bits), degree);
    out.source = p;
    out.eps = eps;
    out.a = a;
    out.K = 4 * static_cast<std::int64_t>(p.m) + 2;
    return out;
}

bool PropertyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

const PropertyCheck& PropertyReport::check(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return c;
    }
    throw InvalidInput("no property check named '" + name + "'");
}

namespace {

// Equally spaced points of [lo, hi] at the given density; open ends dropped
// when requested.
std::vector<Real> grid(const Real& lo, const Real& hi, std::size_t density, bool open = false) {
    const double len = (hi - lo).convert_to<double>();
    if (len < 0) {
        return {}; // e.g. [-1/2, -2a] when 2a > 1/2
    }
    const std::size_t n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(len * density)) + 1);
    std::vector<Real> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (open && (i == 0 || i + 1 == n)) continue;
        pts.push_back(lo + (hi - lo) * Real(i) / Real(n - 1));
    }
    return pts;
}

class Tracker {
  public:
    explicit Tracker(std::string name) { check_.name = std::move(name); }
    // margin >= -tol passes
    void add(const Real& t, const Real& margin, const Real& tol) {
        ++check_.points;
        const double m = margin.convert_to<double>();
        if (check_.points == 1 || m < check_.worst_margin) {
            check_.worst_margin = m;
            check_.worst_t = t.convert_to<double>();
        }
        if (margin < -tol) {
            check_.passed = false;
        }
    }
    PropertyCheck done() { return check_; }

  private:
    PropertyCheck check_;
};

int real_sign(const Real& t) { return t < 0 ? -1 : 1; }

} // namespace

PropertyReport check_P_properties(const UpperApprox& up, std::size_t grid_density) {
    if (grid_density < 1000) {
        throw InvalidInput("grid density must be at least 1000 points per unit");
    }
    const unsigned bits = std::max(up.P.precision_bits(), 128U);
    PrecisionScope scope(bits);
    PropertyReport report;
    report.grid_density = grid_density;

    const Real eps(up.eps);
    const Real eps2 = eps * eps;
    const Real two_a = 2 * Real(up.a);
    const Real half = Real(1) / 2;
    // Relative slack for rounding in extended-precision evaluation.
    const Real rel_tol = bmp::pow(Real(2), -static_cast<int>(bits) + 40);
    auto tol_for = [&](const Real& v) { return rel_tol * rmax(Real(1), bmp::abs(v)); };
    const UniPoly& P = up.P;
    const UniPoly& p = up.source.p;

    {
        Tracker upper("upper");
        Tracker lower("lower");
        const auto pts = grid(Real(-10), Real(10), grid_density);
        std::vector<Real> vals(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            vals[i] = P(pts[i]);
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Real& t = pts[i];
            upper.add(t, vals[i] - real_sign(t), tol_for(vals[i]));
            // The grid is symmetric, so P(-t) is the mirrored entry.
            const Real& pm = vals[pts.size() - 1 - i];
            lower.add(t, real_sign(t) + pm, tol_for(pm));
        }
        report.checks.push_back(upper.done());
        report.checks.push_back(lower.done());
    }
    {
        Tracker band("band");
        auto region = grid(-half, -two_a, grid_density);
        const auto right = grid(Real(0), half, grid_density);
        region.insert(region.end(), right.begin(), right.end());
        for (const auto& t : region) {
            const Real v = P(t);
            const int s = real_sign(t);
            band.add(t, rmin(v - s, s + eps - v), tol_for(v));
        }
        report.checks.push_back(band.done());
    }
    {
        Tracker transition("transition");
        for (const auto& t : grid(-two_a, Real(0), grid_density, true)) {
            const Real v = P(t);
            transition.add(t, rmin(v + 1, 1 + eps - v), tol_for(v));
        }
        report.checks.push_back(transition.done());
    }
    Real b = 0;
    for (const auto& t : grid(-half, half, grid_density)) {
        b = rmax(b, bmp::abs(P(t)));
    }
    {
        Tracker growth("growth");
        Tracker fact("growth_fact");
        const auto deg = static_cast<long>(P.degree());
        auto side = grid(half, Real(10), grid_density);
        for (int s : {1, -1}) {
            for (const auto& u : side) {
                const Real t = s * u;
                const Real v = bmp::abs(P(t));
                const Real bound = 2 * bmp::pow(4 * u, up.K);
                growth.add(t, 1 - v / bound, rel_tol);
                const Real fbound = b * bmp::pow(4 * u, deg);
                fact.add(t, 1 - v / fbound, rel_tol);
            }
        }
        report.checks.push_back(growth.done());
        report.checks.push_back(fact.done());
    }
    {
        Tracker err("p_error");
        for (const auto& u : grid(Real(up.a), Real(1), grid_density)) {
            for (int s : {1, -1}) {
                const Real t = s * u;
                err.add(t, eps2 - bmp::abs(p(t) - s), rel_tol);
            }
        }
        report.checks.push_back(err.done());
    }
    {
        Tracker bounded("p_bounded");
        for (const auto& t : grid(-Real(up.a), Real(up.a), grid_density)) {
            bounded.add(t, 1 + eps2 - bmp::abs(p(t)), rel_tol);
        }
        report.checks.push_back(bounded.done());
    }
    const UniPoly dp = p.derivative();
    {
        Tracker mono("p_monotone");
        for (const auto& u : grid(Real(1), Real(10), grid_density)) {
            for (int s : {1, -1}) {
                const Real t = s * u;
                const Real d = dp(t);
                // strictly positive: any non-positive value fails
                mono.add(t, d, Real(0));
                if (d <= 0) {
                    mono.add(t, Real(-1), Real(0));
                }
            }
        }
        report.checks.push_back(mono.done());
    }
    {
        PropertyCheck crit;
        crit.name = "p_critical";
        const auto pts = grid(Real(-1), Real(1), 10 * grid_density, true);
        std::size_t changes = 0;
        int prev = 0;
        for (const auto& t : pts) {
            const Real d = dp(t);
            const int s = d < 0 ? -1 : (d > 0 ? 1 : 0);
            if (s != 0) {
                if (prev != 0 && s != prev) ++changes;
                prev = s;
            }
        }
        crit.points = pts.size();
        const auto expected = static_cast<double>(dp.degree());
        crit.worst_margin = -std::abs(static_cast<double>(changes) - expected);
        crit.passed = changes == dp.degree() || (dp.degree() == 0 && changes == 0);
        report.checks.push_back(crit);
    }
    return report;
}

} // namespace hsprg
