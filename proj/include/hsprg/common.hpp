#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsprg {

// Error hierarchy. Every failure the library reports derives from Error so
// callers (the CLI in particular) can map them to exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed argument: non-finite reals, dimension mismatch, bad index.
class InvalidInput : public Error {
  public:
    using Error::Error;
};

/// An exhaustive computation would exceed its resource guard.
class ResourceLimit : public Error {
  public:
    using Error::Error;
};

/// An operation was called outside its documented precondition.
class PreconditionFailed : public Error {
  public:
    using Error::Error;
};

/// A parameter configuration violates a mode constraint.
class InvalidConfig : public Error {
  public:
    using Error::Error;
};

/// A measured error bound was not met.
class CertificateFailed : public Error {
  public:
    using Error::Error;
};

using Rational = boost::rational<std::int64_t>;

/// Renders a rational as "p/q" (denominator always present).
std::string to_string(const Rational& r);

/// Parses "p/q" or "p".
Rational parse_rational(const std::string& text);

/// Resource guards for exhaustive enumeration. The defaults are the documented
/// limits; raising them requires `unsafe`.
struct Limits {
    int max_cube_dim = 30;
    int max_seed_bits = 34;
    int max_head = 24;
    bool unsafe = false;

    static constexpr int kDefaultCubeDim = 30;
    static constexpr int kDefaultSeedBits = 34;
    static constexpr int kDefaultHead = 24;

    /// Throws InvalidConfig when a guard was raised without `unsafe`.
    void validate() const;
};

/// Counter-based generator: output i is splitmix64(seed + (i+1) * golden),
/// so every draw is a pure function of (seed, counter). Used wherever the
/// library needs reproducible randomness (Monte Carlo gaps, random families).
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller on two uniforms.
    double normal();

    std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z);

  private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

/// Shortest decimal string that round-trips the double.
std::string decimal_string(double x);

} // namespace hsprg
