#include "hsprg/common.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace hsprg {

std::string to_string(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& text) {
    auto parse_int = [&](std::string_view part) {
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc{} || ptr != part.data() + part.size()) {
            throw InvalidInput("malformed rational: '" + text + "'");
        }
        return value;
    };
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        return Rational(parse_int(text));
    }
    const auto den = parse_int(std::string_view(text).substr(slash + 1));
    if (den == 0) {
        throw InvalidInput("zero denominator: '" + text + "'");
    }
    return Rational(parse_int(std::string_view(text).substr(0, slash)), den);
}

void Limits::validate() const {
    if (unsafe) {
        return;
    }
    if (max_cube_dim > kDefaultCubeDim || max_seed_bits > kDefaultSeedBits || max_head > kDefaultHead) {
        throw InvalidConfig("resource guards raised above defaults (n<=30, s<=34, |H|<=24) require --unsafe");
    }
}

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::next() {
    ++counter_;
    return mix(seed_ + counter_ * 0x9e3779b97f4a7c15ULL);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string decimal_string(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace hsprg
