#pragma once

#include "hsprg/remez.hpp"
#include "hsprg/schedule.hpp"
#include "hsprg/unipoly.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace hsprg {

using ExactRational = boost::multiprecision::cpp_rational;

/// Power-basis coefficients of A_k(u) = sum_{j >= k/2} C(k,j) ((1+u)/2)^j ((1-u)/2)^(k-j),
/// exact.
std::vector<ExactRational> amplifier_power_coeffs(int k);

/// Exact conversion of power-basis coefficients to the Chebyshev basis of [-1, 1].
std::vector<ExactRational> power_to_chebyshev(const std::vector<ExactRational>& power);

/// A_k as a Chebyshev polynomial on [-1, 1] (coefficients rounded once from
/// exact rationals).
UniPoly amplifier(int k, unsigned bits = 128);

/// Best odd approximation p(t) = t r(t^2) of degree 2m+1 to sign(t) on
/// [-1, -a] U [a, 1], i.e. r minimizes max_{z in [a^2, 1]} |1 - sqrt(z) r(z)|.
struct SignApprox {
    double a = 0.0;
    std::size_t m = 0;
    UniPoly p; // on [-1, 1], even coefficients exactly zero
    UniPoly r; // on [a^2, 1]
    Real M;    // minimax error
    std::vector<Real> alternation_z;
    std::vector<Real> alternation_t;
    std::vector<int> error_signs; // sign of 1 - sqrt(z) r(z) at alternation_z
    int iterations = 0;
    double spread = 0.0;
    unsigned bits = 0;
};

/// Default working precision max(128, 4m) bits.
unsigned default_sign_bits(std::size_t m);

/// Throws NumericalFailure (carrying the last reference) after 200 exchanges.
SignApprox remez_best_sign_approx(double a, std::size_t m, unsigned precision_bits = 0);

/// Upper bound on M for the same degree budget, built from a best uniform
/// approximation J to the piecewise-linear ramp (sign outside [-a, a],
/// t/a inside) and the amplifier: q(t) = 2 A_k((4/5) J(t)) - 1.
struct ErrorCertificate {
    double a = 0.0;
    double eps = 0.0;
    std::size_t ell = 0;      // degree budget for J, ceil(25/a)
    std::size_t J_degree = 0; // actual degree of J (odd, <= ell)
    int k = 0;                // ceil(15 log(1/eps))
    std::size_t q_degree = 0; // J_degree * k
    /// Smallest m with 2m + 1 >= deg(q): the optimal p of that size is at
    /// least as accurate as q.
    std::size_t degree_budget_m = 0;
    Real J_error;                      // best-approximation error of J to the ramp
    double jackson_bound = 0.0;        // 6 / (a ell)
    double amplification_bound = 0.0; // 2 exp(-k/6)
    double measured_error = 0.0;       // max |q - sign| over the grid of |t| in [a, 1]
    double target = 0.0;               // eps^2
    std::size_t grid_points = 0;
    bool passed = false;
    UniPoly J;
    UniPoly A;
};

/// Throws CertificateFailed when the measured error exceeds eps^2 and
/// `throw_on_failure` is set; PreconditionFailed when the schedule does not
/// match (a, eps).
ErrorCertificate certify_error(double a, double eps, const ParamSchedule& schedule, bool throw_on_failure = true,
                               std::size_t grid_points = 20000);

/// q(t) of a certificate.
double certificate_q(const ErrorCertificate& cert, double t);

/// P(t) = (1 + eps^2 + p(t + a))^2 / 2 - 1, deg P = 2 deg p.
struct UpperApprox {
    UniPoly P; // Chebyshev basis of [-1 - a, 1]
    SignApprox source;
    double eps = 0.0;
    double a = 0.0;
    std::int64_t K = 0; // 4m + 2 for the source's m
    std::size_t degree() const { return P.degree(); }

    /// P through 1/2 (1 + eps^2 + p(t + a))^2 - 1. The Chebyshev coefficients
    /// of P are huge (P grows fast beyond [-1/2, 1/2]) and cancel in double
    /// Clenshaw; those of p are O(1).
    double operator()(double t) const;
    Real operator()(const Real& t) const;
};

/// Throws PreconditionFailed when the source error M exceeds eps^2 (unless
/// `require_error_bound` is false) or when a differs from the source's a.
UpperApprox build_P(const SignApprox& p, double eps, double a, bool require_error_bound = true);

struct PropertyCheck {
    std::string name;
    bool passed = true;
    /// Smallest slack over the grid (negative means violated).
    double worst_margin = 0.0;
    double worst_t = 0.0;
    std::size_t points = 0;
};

struct PropertyReport {
    /// Grid checks sample the statements, they do not prove them for all t.
    bool sampled = true;
    std::size_t grid_density = 0;
    std::vector<PropertyCheck> checks;
    bool passed() const;
    const PropertyCheck& check(const std::string& name) const;
};

/// Samples, at `grid_density` points per unit length:
///   upper           P(t) >= sign(t)                on [-10, 10]
///   lower           sign(t) >= -P(-t)              on [-10, 10]
///   band            P(t) in [sign t, sign t + eps] on [-1/2, -2a] U [0, 1/2]
///   transition      P(t) in [-1, 1 + eps]          on (-2a, 0)
///   growth          |P(t)| <= 2 (4|t|)^K           on 1/2 <= |t| <= 10
///   growth_fact     |P(t)| <= b |4t|^deg P, b = max |P| on [-1/2, 1/2]
///   p_error         |p(t) - sign t| <= eps^2       on a <= |t| <= 1
///   p_bounded       |p(t)| <= 1 + eps^2            on [-a, a]
///   p_monotone      p'(t) > 0                      on 1 <= |t| <= 10
///   p_critical      p' has exactly deg p' sign changes in (-1, 1), so no
///                   critical points lie outside
PropertyReport check_P_properties(const UpperApprox& P, std::size_t grid_density = 1000);

} // namespace hsprg
