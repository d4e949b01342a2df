#include "hsprg/real.hpp"

#include "hsprg/common.hpp"

#include <cmath>
#include <ios>

namespace hsprg {

unsigned digits10_for_bits(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120));
}

PrecisionScope::PrecisionScope(unsigned bits) : saved_digits10_(Real::default_precision()) {
    Real::default_precision(digits10_for_bits(bits));
}

PrecisionScope::~PrecisionScope() { Real::default_precision(saved_digits10_); }

std::string to_decimal(const Real& x) {
    if (x == 0) {
        return "0";
    }
    return x.str(static_cast<std::streamsize>(x.precision() + 2), std::ios_base::scientific);
}

Real parse_real(const std::string& text) {
    try {
        Real r(text);
        if (!boost::multiprecision::isfinite(r)) {
            throw InvalidInput("non-finite real '" + text + "'");
        }
        return r;
    } catch (const std::runtime_error& e) {
        if (dynamic_cast<const InvalidInput*>(&e)) throw;
        throw InvalidInput("cannot parse real '" + text + "'");
    }
}

Real real_pi() { return boost::multiprecision::acos(Real(-1)); }

} // namespace hsprg
