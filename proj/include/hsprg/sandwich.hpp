#pragma once

#include "hsprg/approx.hpp"
#include "hsprg/halfspace.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsprg {

/// One side of a sandwich, never expanded into monomials:
///   value(x) = constant                                  if is_constant
///   value(x) = out_sign * P((weights . x - offset) / Z)  otherwise.
struct CompositionRecord {
    bool is_constant = false;
    double constant = 0.0;
    int out_sign = 1;
    std::vector<double> weights;
    double offset = 0.0;
    double Z = 1.0;

    bool operator==(const CompositionRecord&) const = default;
};

enum class Branch { small_theta, large_theta };

std::string to_string(Branch b);

struct SandwichPair {
    CompositionRecord upper;
    CompositionRecord lower;
    Branch branch = Branch::small_theta;
    /// theta < -Z/4: the large branch built for the negated halfspace and
    /// flipped back.
    bool mirrored = false;
    Halfspace h;
    UpperApprox P;
    double eps = 0.0;
    double Z = 1.0;
    /// Multilinear degree bound, deg P (composition with a linear form).
    std::size_t degree = 0;
};

struct SandwichOptions {
    /// Reject halfspaces that are not eps-regular (critical index 1 at eps).
    bool require_regular = true;
};

/// |theta| <= Z/4 (inclusive): upper = P((w.x - theta)/Z), lower = -P((theta - w.x)/Z).
/// theta > Z/4: upper = P((w.x - Z/4)/Z), lower = -1.
/// theta < -Z/4: upper = +1, lower = -P((-w.x - Z/4)/Z).
/// Throws PreconditionFailed for unnormalized or (when required) non-regular
/// input, or when P was built for a different schedule.
SandwichPair build_sandwich(const Halfspace& h, const UpperApprox& P, const ParamSchedule& schedule,
                            const SandwichOptions& options = {});

double evaluate_side(const CompositionRecord& side, const UpperApprox& P, std::span<const std::int8_t> x);

struct PointwiseReport {
    bool passed = true;
    std::uint64_t points = 0;
    double min_upper_margin = 0.0; // min of upper - h
    double min_lower_margin = 0.0; // min of h - lower
    std::vector<std::int8_t> worst_upper_point;
    std::vector<std::int8_t> worst_lower_point;
    double tolerance = -1e-9;
};

/// Exhaustive over the cube (n <= 24, guard lifted by limits.unsafe).
PointwiseReport verify_pointwise(const SandwichPair& pair, const Limits& limits = {});
/// Over a supplied sample of points.
PointwiseReport verify_pointwise(const SandwichPair& pair, const std::vector<std::vector<std::int8_t>>& points);

enum class GapMode { exhaustive, montecarlo };

std::string to_string(GapMode m);
GapMode parse_gap_mode(const std::string& text);

struct GapReport {
    Branch branch = Branch::small_theta;
    bool mirrored = false;
    GapMode mode = GapMode::exhaustive;
    double gap_u = 0.0;
    double gap_l = 0.0;
    /// 99% normal-approximation half-widths (Monte Carlo only).
    std::optional<double> ci_u;
    std::optional<double> ci_l;
    std::uint64_t samples = 0;
    /// Exhaustive only: number of points with h = +1.
    std::optional<std::uint64_t> plus_count;
    double bound_10eps = 0.0;
    /// Branch-specific bounds: 10 eps each for the small branch; 12 eps
    /// (upper) and 2 eps (lower) for the large branch.
    double bound_u = 0.0;
    double bound_l = 0.0;
    bool within_bound = false;
    /// Bounds are asserted only for theorem-mode schedules.
    bool bound_asserted = false;
};

/// E_U[upper - h] and E_U[h - lower]. Exhaustive mode (n <= 24) sums in
/// ascending mask order with compensated summation; Monte Carlo draws
/// uniform points from CounterRng(seed).
GapReport expected_gap(const SandwichPair& pair, const ParamSchedule& schedule, GapMode mode,
                       std::uint64_t samples = 0, std::uint64_t seed = 1, const Limits& limits = {});

/// Normalized halfspace with every |w_i| <= tau and the given theta, from
/// Gaussian magnitudes shifted just enough to meet the bound, with random
/// signs. Throws PreconditionFailed when tau < 1/sqrt(n) (no such unit
/// vector exists).
Halfspace random_regular_halfspace(std::size_t n, double tau, double theta, CounterRng& rng);

} // namespace hsprg
