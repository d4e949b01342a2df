#pragma once

#include "hsprg/schedule.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace hsprg {

// Points of the cube are either spans of +1/-1 values or, for n <= 64,
// bit masks where bit (i-1) set means x_i = -1.
//
// Coordinates are numbered from 1 everywhere in this library (critical index,
// head/tail sets, permutations, influence index), matching the analysis.

/// h(x) = sign(w.x - theta) with sign(0) = +1.
struct Halfspace {
    std::vector<double> weights;
    double theta = 0.0;

    std::size_t dim() const { return weights.size(); }
    /// All weights zero: h is the constant sign(-theta).
    bool is_constant() const;
    double norm() const;
};

/// Validates finiteness and non-emptiness; throws InvalidInput.
Halfspace make_halfspace(std::vector<double> weights, double theta);

/// Scales (w, theta) by 1/||w||. An all-zero weight vector is returned
/// unchanged (it is the constant function sign(-theta)).
///
/// The rescaled doubles are rounded, so a point where w.x - theta is exactly
/// zero can change value when ||w|| is not a power of two. Exact ties between
/// equal weights and theta = 0 survive.
Halfspace normalize(const Halfspace& h);

bool is_normalized(const Halfspace& h, double tol = 1e-12);

/// Exact sign of sum(terms) with sign(0) = +1: the sum of the given doubles is
/// evaluated without rounding.
int exact_sign(std::span<const double> terms);

/// sign(w.x - theta), computed exactly on the stored doubles.
int evaluate(const Halfspace& h, std::span<const std::int8_t> x);

/// Fast exact evaluator over bit-mask points (n <= 64). Partial sums over the
/// low and high halves of the coordinates are tabulated; a point is decided in
/// double precision whenever the result clears a rigorous rounding bound and
/// falls back to exact summation otherwise.
///
/// `tie_coordinate` (1-based, 0 = none) changes the value at an exact zero of
/// w.x - theta from +1 to x_j. This is the infinitesimal threshold shift used
/// by the influence identity.
class CubeEvaluator {
  public:
    explicit CubeEvaluator(const Halfspace& h, std::size_t tie_coordinate = 0);

    int operator()(std::uint64_t mask) const;
    /// Real value of w.x - theta in double precision.
    double margin(std::uint64_t mask) const;
    std::size_t dim() const { return n_; }

  private:
    int exact(std::uint64_t mask) const;

    std::size_t n_;
    std::size_t low_bits_;
    std::uint64_t low_mask_;
    std::vector<double> low_;
    std::vector<double> high_;
    std::vector<double> weights_;
    double theta_;
    double bound_;
    std::size_t tie_;
};

/// +1/-1 coordinates of a mask point.
std::vector<std::int8_t> mask_to_point(std::uint64_t mask, std::size_t n);
std::uint64_t point_to_mask(std::span<const std::int8_t> x);

/// Halfspace with weights sorted by |w_i| descending (ties by original index),
/// plus the suffix sums of squares for O(1) tail norms.
struct SortedHalfspace {
    Halfspace base;
    /// perm[j-1] = original coordinate of sorted coordinate j (both 1-based).
    std::vector<std::size_t> perm;
    /// suffix_sq[j-1] = sum_{i >= j} w_i^2; suffix_sq[n] = 0.
    std::vector<double> suffix_sq;

    std::size_t dim() const { return base.dim(); }
    /// Maps a point in sorted coordinates back to original coordinates.
    std::vector<std::int8_t> to_original(std::span<const std::int8_t> sorted_point) const;
};

SortedHalfspace sort_weights(const Halfspace& h);

/// sigma_k = sqrt(sum_{i >= k} w_i^2), 1 <= k <= n.
double tail_norm(const SortedHalfspace& sh, std::size_t k);

/// Smallest 1-based i with |w_i| <= tau * sigma_i, or nullopt (infinite).
std::optional<std::size_t> critical_index(const SortedHalfspace& sh, double tau);

/// Separated head coordinates k_i = 1 + ceil(i * (4/eps^2) ln(1/eps)),
/// i = 0..t_sep-1, keeping those <= limit.
struct SeparatedSet {
    std::vector<std::size_t> indices;
    double spacing = 0.0;
    int requested = 0;
    bool clipped = false;
};

SeparatedSet separated_coordinates(double eps, int t_sep, std::size_t limit);

struct DecompositionReport {
    double tau = 0.0;
    std::optional<std::size_t> crit_index;
    std::vector<double> sigma;
    std::vector<std::size_t> head;
    std::vector<std::size_t> tail;
    SeparatedSet separated;
    int t_sep = 0;
    std::int64_t L = 0;
    bool head_covers_all = false;
};

/// Head = first min(L, n) sorted coordinates, tail = the rest; crit index at
/// tau = eps. Throws PreconditionFailed when schedule.eps != eps.
DecompositionReport decompose(const SortedHalfspace& sh, double eps, const ParamSchedule& schedule);

/// Same as decompose with an explicit head size (clipped to n); used by
/// experiments that need a nonempty tail at desk-scale n.
DecompositionReport decompose_with_head(const SortedHalfspace& sh, double eps, const ParamSchedule& schedule,
                                        std::size_t head_size);

struct DecayViolation {
    std::size_t i = 0;
    std::size_t j = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    const char* inequality = "";
};

struct DecayReport {
    std::optional<std::size_t> crit_index;
    std::size_t pairs_checked = 0;
    std::vector<DecayViolation> violations;
    /// "in particular" clause |w_j| <= |w_i|/3 for j >= i + (4/eps^2) ln(1/eps);
    /// it follows from the main chain only when eps <= 1/3.
    std::size_t spaced_pairs_checked = 0;
    std::vector<DecayViolation> spaced_violations;
    bool spaced_clause_applicable = false;

    std::vector<std::size_t> separated;
    bool separation_checked = false;
    bool separation_skipped = false;
    bool separated_ratio_ok = true;
    double separation_gap = 0.0;
    double separation_bound = 0.0;
    bool separation_ok = true;

    bool passed() const;
};

/// Checks the geometric decay chain
///   |w_j| <= sigma_j < sqrt(1-eps^2)^(j-i) sigma_i <= sqrt(1-eps^2)^(j-i) |w_i| / eps
/// for 1 <= i < j <= min(l, n) (all of [n] when l is infinite), and the separation of the separated set G by
/// enumerating all 2^|G| sign patterns (skipped when |G| > 20).
DecayReport check_geometric_decay(const SortedHalfspace& sh, double eps, const ParamSchedule& schedule);

struct SeparationResult {
    double min_gap = 0.0;
    double smallest_weight = 0.0;
    bool ratio_condition = false; // v_{i+1} <= v_i / 3 throughout
};

/// Minimum |v.x - v.y| over distinct x, y in {-1,+1}^t (t <= 20).
SeparationResult separation_gap(std::span<const double> v);

} // namespace hsprg
