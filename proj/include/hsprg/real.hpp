#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>

namespace hsprg {

/// Variable-precision MPFR real. Expression templates are off so that
/// `auto` and generic lambdas behave like ordinary values. New values take the
/// thread's default precision; arithmetic keeps the larger operand precision.
using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

/// Decimal digits needed to carry `bits` binary digits.
unsigned digits10_for_bits(unsigned bits);

/// Sets the default precision for newly created Reals on this thread and
/// restores the previous value on destruction.
class PrecisionScope {
  public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

  private:
    unsigned saved_digits10_;
};

/// Scientific decimal rendering with enough digits to round-trip at the
/// value's own precision.
std::string to_decimal(const Real& x);

/// Parses a decimal string at the current default precision.
Real parse_real(const std::string& text);

Real real_pi();

inline Real rmax(const Real& x, const Real& y) { return x < y ? y : x; }
inline Real rmin(const Real& x, const Real& y) { return y < x ? y : x; }

} // namespace hsprg
