#pragma once

#include "hsprg/common.hpp"
#include "hsprg/real.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace hsprg {

/// Weighted minimax problem on [lo, hi]: find r of degree <= degree
/// minimizing max |W(z) (g(z) - r(z))|, W non-vanishing.
struct RemezProblem {
    std::function<Real(const Real&)> target;
    std::function<Real(const Real&)> weight;
    Real lo;
    Real hi;
    std::size_t degree = 0;
    /// Points always offered to the extremum search (kinks of g or W).
    std::vector<Real> breakpoints;
    unsigned bits = 128;
    double tolerance = 1e-12;
    int max_iterations = 200;
    /// Samples per segment before golden-section refinement.
    int samples_per_segment = 24;
};

struct RemezResult {
    /// Barycentric representation of r through degree+1 nodes.
    std::vector<Real> nodes;
    std::vector<Real> values;
    std::vector<Real> bary_weights;

    /// degree+2 alternation points and the signed error there.
    std::vector<Real> reference;
    std::vector<Real> reference_errors;
    /// Levelled error |E| of the final reference system.
    Real levelled_error;
    /// Largest |error| over the located local extrema.
    Real max_error;
    int iterations = 0;
    double spread = 0.0;

    Real eval(const Real& z) const;
};

class NumericalFailure : public Error {
  public:
    NumericalFailure(const std::string& what, std::vector<Real> last_reference)
        : Error(what), last_reference_(std::move(last_reference)) {}
    const std::vector<Real>& last_reference() const { return last_reference_; }

  private:
    std::vector<Real> last_reference_;
};

/// Chebyshev extrema of degree n+1 mapped to [lo, hi] (n+2 points, endpoints
/// included).
std::vector<Real> chebyshev_reference(const Real& lo, const Real& hi, std::size_t n);

/// Remez exchange with the levelled error from the barycentric identity
/// (no linear system). Each step replaces the reference by the extrema of the
/// signed error between consecutive error roots. Converges when
/// (max - min)/max of |error| at the new reference drops below the tolerance.
RemezResult remez(const RemezProblem& problem);

/// Weighted error W(z) (g(z) - r(z)) of a solution.
Real remez_error(const RemezProblem& problem, const RemezResult& result, const Real& z);

} // namespace hsprg
