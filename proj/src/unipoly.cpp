#include "hsprg/unipoly.hpp"

#include "hsprg/common.hpp"

#include <cmath>

namespace hsprg {

namespace {

std::vector<Real> trimmed(std::vector<Real> c) {
    while (c.size() > 1 && c.back() == 0) {
        c.pop_back();
    }
    if (c.empty()) {
        c.emplace_back(0);
    }
    return c;
}

} // namespace

UniPoly::UniPoly() : UniPoly(-1.0, 1.0, {}) {}

UniPoly::UniPoly(double lo, double hi, std::vector<Real> coeffs) : lo_(lo), hi_(hi), coeffs_(trimmed(std::move(coeffs))) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidInput("polynomial interval must be finite with lo < hi");
    }
    dcoeffs_.reserve(coeffs_.size());
    for (const auto& c : coeffs_) {
        if (!boost::multiprecision::isfinite(c)) {
            throw InvalidInput("polynomial coefficients must be finite");
        }
        dcoeffs_.push_back(c.convert_to<double>());
    }
}

unsigned UniPoly::precision_bits() const {
    unsigned digits = 0;
    for (const auto& c : coeffs_) {
        digits = std::max(digits, c.precision());
    }
    return static_cast<unsigned>(std::ceil(digits / 0.30102999566398120));
}

Real UniPoly::operator()(const Real& t) const {
    if (!boost::multiprecision::isfinite(t)) {
        throw InvalidInput("cannot evaluate a polynomial at a non-finite point");
    }
    PrecisionScope scope(std::max(precision_bits(), 64U));
    const Real x = (2 * t - Real(lo_) - Real(hi_)) / (Real(hi_) - Real(lo_));
    const Real two_x = 2 * x;
    Real b1 = 0;
    Real b2 = 0;
    for (std::size_t j = coeffs_.size(); j-- > 1;) {
        Real b0 = coeffs_[j] + two_x * b1 - b2;
        b2 = std::move(b1);
        b1 = std::move(b0);
    }
    return coeffs_[0] + x * b1 - b2;
}

double UniPoly::operator()(double t) const {
    if (!std::isfinite(t)) {
        throw InvalidInput("cannot evaluate a polynomial at a non-finite point");
    }
    const double x = (2.0 * t - lo_ - hi_) / (hi_ - lo_);
    const double two_x = 2.0 * x;
    double b1 = 0.0;
    double b2 = 0.0;
    for (std::size_t j = dcoeffs_.size(); j-- > 1;) {
        const double b0 = dcoeffs_[j] + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return dcoeffs_[0] + x * b1 - b2;
}

UniPoly UniPoly::derivative() const {
    const std::size_t n = degree();
    if (n == 0) {
        return UniPoly(lo_, hi_, {Real(0)});
    }
    PrecisionScope scope(std::max(precision_bits(), 64U));
    std::vector<Real> d(n + 1, Real(0));
    // d_{k-1} = d_{k+1} + 2k c_k
    for (std::size_t k = n; k >= 1; --k) {
        d[k - 1] = (k + 1 <= n ? d[k + 1] : Real(0)) + 2 * Real(k) * coeffs_[k];
    }
    d[0] /= 2;
    d.pop_back();
    const Real scale = Real(2) / (Real(hi_) - Real(lo_));
    for (auto& v : d) {
        v *= scale;
    }
    return UniPoly(lo_, hi_, std::move(d));
}

Real eval_poly(const UniPoly& poly, const Real& t) { return poly(t); }
double eval_poly(const UniPoly& poly, double t) { return poly(t); }

UniPoly chebyshev_interpolate(const std::function<Real(const Real&)>& f, double lo, double hi,
                              std::size_t degree, unsigned bits) {
    PrecisionScope scope(bits);
    const std::size_t n = degree + 1;
    const Real pi = real_pi();
    // cos(pi r / (2n)) for r in [0, 4n); node k uses r = 2k+1, basis j uses j(2k+1).
    std::vector<Real> cos_table(4 * n);
    for (std::size_t r = 0; r < 4 * n; ++r) {
        cos_table[r] = boost::multiprecision::cos(pi * Real(r) / Real(2 * n));
    }
    const Real mid = (Real(lo) + Real(hi)) / 2;
    const Real half = (Real(hi) - Real(lo)) / 2;
    std::vector<Real> values(n);
    for (std::size_t k = 0; k < n; ++k) {
        values[k] = f(mid + half * cos_table[2 * k + 1]);
    }
    std::vector<Real> c(n, Real(0));
    for (std::size_t j = 0; j < n; ++j) {
        Real acc = 0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += values[k] * cos_table[(j * (2 * k + 1)) % (4 * n)];
        }
        c[j] = acc * 2 / Real(n);
    }
    c[0] /= 2;
    return UniPoly(lo, hi, std::move(c));
}

UniPoly truncate(const UniPoly& poly, std::size_t degree) {
    std::vector<Real> c = poly.coeffs();
    if (c.size() > degree + 1) {
        c.resize(degree + 1);
    }
    return UniPoly(poly.lo(), poly.hi(), std::move(c));
}

} // namespace hsprg
