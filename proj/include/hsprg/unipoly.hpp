#pragma once

#include "hsprg/real.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace hsprg {

/// Polynomial in the Chebyshev basis of [lo, hi]:
///   f(t) = sum_j c_j T_j((2t - lo - hi) / (hi - lo)).
/// Coefficients are stored at extended precision with a cached double copy
/// for fast evaluation inside the interval.
class UniPoly {
  public:
    UniPoly();
    /// Trailing exact zeros are dropped; an empty vector is the zero polynomial.
    UniPoly(double lo, double hi, std::vector<Real> coeffs);

    double lo() const { return lo_; }
    double hi() const { return hi_; }
    std::size_t degree() const { return coeffs_.size() - 1; }
    const std::vector<Real>& coeffs() const { return coeffs_; }
    const std::vector<double>& double_coeffs() const { return dcoeffs_; }
    unsigned precision_bits() const;

    /// Clenshaw recurrence; outside [lo, hi] the same recurrence extrapolates.
    /// Throws InvalidInput for non-finite t.
    Real operator()(const Real& t) const;
    double operator()(double t) const;

    UniPoly derivative() const;

  private:
    double lo_ = -1.0;
    double hi_ = 1.0;
    std::vector<Real> coeffs_;
    std::vector<double> dcoeffs_;
};

Real eval_poly(const UniPoly& poly, const Real& t);
double eval_poly(const UniPoly& poly, double t);

/// Interpolant of f at the `degree + 1` Chebyshev points of the first kind on
/// [lo, hi], computed at `bits` of precision.
UniPoly chebyshev_interpolate(const std::function<Real(const Real&)>& f, double lo, double hi,
                              std::size_t degree, unsigned bits);

/// The same polynomial with the high coefficients above `degree` removed.
UniPoly truncate(const UniPoly& poly, std::size_t degree);

} // namespace hsprg
