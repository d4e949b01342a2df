#include "hsprg/remez.hpp"

#include <algorithm>
#include <cmath>

namespace hsprg {

namespace bmp = boost::multiprecision;

namespace {

std::vector<Real> barycentric_weights(const std::vector<Real>& x) {
    std::vector<Real> w(x.size(), Real(1));
    for (std::size_t j = 0; j < x.size(); ++j) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (k != j) {
                w[j] *= x[j] - x[k];
            }
        }
        w[j] = 1 / w[j];
    }
    return w;
}

Real barycentric_eval(const std::vector<Real>& x, const std::vector<Real>& v, const std::vector<Real>& w,
                      const Real& z) {
    Real num = 0;
    Real den = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const Real d = z - x[j];
        if (d == 0) {
            return v[j];
        }
        const Real q = w[j] / d;
        num += q * v[j];
        den += q;
    }
    return num / den;
}

int sign_of(const Real& x) { return x < 0 ? -1 : 1; }

struct Solver {
    const RemezProblem& pb;
    RemezResult res;

    Real error(const Real& z) const { return pb.weight(z) * (pb.target(z) - res.eval(z)); }

    // Levelled system on the reference; fills nodes/values/weights.
    void level(const std::vector<Real>& ref) {
        const auto mu = barycentric_weights(ref);
        Real num = 0;
        Real den = 0;
        std::vector<Real> g(ref.size());
        std::vector<Real> inv_w(ref.size());
        for (std::size_t j = 0; j < ref.size(); ++j) {
            g[j] = pb.target(ref[j]);
            inv_w[j] = 1 / pb.weight(ref[j]);
            num += mu[j] * g[j];
            den += (j % 2 == 0 ? mu[j] : -mu[j]) * inv_w[j];
        }
        const Real E = num / den;
        res.levelled_error = bmp::abs(E);
        const std::size_t n = ref.size() - 1;
        res.nodes.assign(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(n));
        res.values.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            res.values[j] = g[j] - (j % 2 == 0 ? E : -E) * inv_w[j];
        }
        res.bary_weights = barycentric_weights(res.nodes);
    }

    Real root(Real a, Real b, int sa) const {
        for (int it = 0; it < 80; ++it) {
            const Real mid = (a + b) / 2;
            if (sign_of(error(mid)) == sa) {
                a = mid;
            } else {
                b = mid;
            }
        }
        return (a + b) / 2;
    }

    // Maximizes s * error on [a, b]; returns (point, signed error).
    std::pair<Real, Real> extremum(const Real& a, const Real& b, int s, const Real& hint) const {
        const int ns = std::max(pb.samples_per_segment, 3);
        std::vector<Real> pts;
        pts.reserve(static_cast<std::size_t>(ns) + pb.breakpoints.size() + 1);
        for (int i = 0; i <= ns; ++i) {
            pts.push_back(a + (b - a) * Real(i) / Real(ns));
        }
        if (hint > a && hint < b) pts.push_back(hint);
        for (const auto& bp : pb.breakpoints) {
            if (bp > a && bp < b) pts.push_back(bp);
        }
        std::sort(pts.begin(), pts.end());
        std::vector<Real> vals(pts.size());
        std::size_t best = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            vals[i] = s * error(pts[i]);
            if (vals[i] > vals[best]) best = i;
        }
        Real best_z = pts[best];
        Real best_v = vals[best];
        // Golden-section refinement inside the neighbouring samples.
        Real lo = pts[best == 0 ? 0 : best - 1];
        Real hi = pts[best + 1 < pts.size() ? best + 1 : best];
        if (hi > lo) {
            const Real invphi = (bmp::sqrt(Real(5)) - 1) / 2;
            Real x1 = hi - invphi * (hi - lo);
            Real x2 = lo + invphi * (hi - lo);
            Real f1 = s * error(x1);
            Real f2 = s * error(x2);
            for (int it = 0; it < 90; ++it) {
                if (f1 > f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - invphi * (hi - lo);
                    f1 = s * error(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + invphi * (hi - lo);
                    f2 = s * error(x2);
                }
            }
            if (f1 > best_v) {
                best_v = f1;
                best_z = x1;
            }
            if (f2 > best_v) {
                best_v = f2;
                best_z = x2;
            }
        }
        return {best_z, s * best_v};
    }
};

} // namespace

Real RemezResult::eval(const Real& z) const { return barycentric_eval(nodes, values, bary_weights, z); }

std::vector<Real> chebyshev_reference(const Real& lo, const Real& hi, std::size_t n) {
    const Real pi = real_pi();
    std::vector<Real> ref(n + 2);
    for (std::size_t j = 0; j <= n + 1; ++j) {
        ref[j] = (lo + hi) / 2 - (hi - lo) / 2 * bmp::cos(pi * Real(j) / Real(n + 1));
    }
    ref.front() = lo;
    ref.back() = hi;
    return ref;
}

Real remez_error(const RemezProblem& problem, const RemezResult& result, const Real& z) {
    PrecisionScope scope(problem.bits);
    return problem.weight(z) * (problem.target(z) - result.eval(z));
}

RemezResult remez(const RemezProblem& problem) {
    if (!(problem.lo < problem.hi)) {
        throw InvalidInput("Remez interval must satisfy lo < hi");
    }
    PrecisionScope scope(problem.bits);
    Solver solver{problem, {}};
    std::vector<Real> ref = chebyshev_reference(Real(problem.lo), Real(problem.hi), problem.degree);
    const std::size_t npts = problem.degree + 2;

    for (int iter = 1; iter <= problem.max_iterations; ++iter) {
        solver.level(ref);
        auto& res = solver.res;
        res.iterations = iter;

        // Signs at the reference alternate by construction.
        std::vector<Real> ref_err(npts);
        for (std::size_t j = 0; j < npts; ++j) {
            ref_err[j] = solver.error(ref[j]);
        }
        if (res.levelled_error == 0) {
            res.reference = ref;
            res.reference_errors = ref_err;
            res.max_error = 0;
            res.spread = 0.0;
            return res;
        }
        std::vector<Real> roots;
        roots.reserve(npts - 1);
        for (std::size_t j = 0; j + 1 < npts; ++j) {
            roots.push_back(solver.root(ref[j], ref[j + 1], sign_of(ref_err[j])));
        }
        std::vector<Real> next(npts);
        std::vector<Real> next_err(npts);
        for (std::size_t j = 0; j < npts; ++j) {
            const Real& a = j == 0 ? problem.lo : roots[j - 1];
            const Real& b = j + 1 == npts ? problem.hi : roots[j];
            auto [z, e] = solver.extremum(a, b, sign_of(ref_err[j]), ref[j]);
            next[j] = z;
            next_err[j] = e;
        }
        Real emax = 0;
        Real emin = bmp::abs(next_err[0]);
        for (const auto& e : next_err) {
            emax = rmax(emax, bmp::abs(e));
            emin = rmin(emin, bmp::abs(e));
        }
        const double spread = ((emax - emin) / emax).convert_to<double>();
        res.spread = spread;
        res.max_error = emax;
        ref = std::move(next);
        if (spread < problem.tolerance) {
            res.reference = ref;
            res.reference_errors = next_err;
            return res;
        }
    }
    throw NumericalFailure("Remez exchange did not converge in " + std::to_string(problem.max_iterations) +
                               " iterations",
                           ref);
}

} // namespace hsprg
