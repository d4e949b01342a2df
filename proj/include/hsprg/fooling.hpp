#pragma once

#include "hsprg/halfspace.hpp"
#include "hsprg/kwise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hsprg {

struct BiasReport {
    std::uint64_t plus_count = 0;
    std::uint64_t total = 0;
    /// E[h] = (plus - minus) / total, exact.
    Rational bias{0};
    /// "uniform" or the space descriptor rendered as "bch(n=..,k=..,s=..)".
    std::string distribution;
};

/// Exhaustive over {-1,+1}^n; n <= limits.max_cube_dim.
BiasReport exact_bias(const Halfspace& h, const Limits& limits = {});

/// Multiplicity-weighted over the 2^s seeds of the space.
BiasReport bias_under_space(const Halfspace& h, const KWiseSpace& space, const Limits& limits = {});

/// |E_D[h] - E_U[h]| as an exact rational.
Rational fooling_error(const Halfspace& h, const KWiseSpace& space, const Limits& limits = {});

std::string space_tag(const KWiseSpace& space);

enum class FamilyName { majority, geometric, exponential, gaussian_random };

std::string to_string(FamilyName f);
FamilyName parse_family(const std::string& text);

struct FamilySpec {
    FamilyName name = FamilyName::majority;
    std::size_t n = 1;
    /// Ratio for the geometric family, w_i proportional to rho^i.
    double rho = 0.5;
    /// Threshold applied after normalization.
    double theta = 0.0;
    std::uint64_t rng_seed = 1;
};

/// majority: w_i = 1/sqrt(n); geometric: w_i ~ rho^i; exponential:
/// w_i ~ 2^(n-i); gaussian_random: CounterRng(rng_seed) normals. All
/// normalized, theta = spec.theta.
Halfspace family(const FamilySpec& spec);

struct SweepRow {
    std::string family;
    std::size_t n = 0;
    std::size_t k = 0;
    unsigned s = 0;
    Rational bias_uniform{0};
    Rational bias_space{0};
    Rational error{0};
};

struct SweepThreshold {
    double eps = 0.0;
    /// Smallest k in the range whose error is at most eps.
    std::optional<std::size_t> min_k;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    std::vector<SweepThreshold> thresholds;
};

/// One row per k (ascending, deduplicated) with build_space(n, k).
SweepTable sweep(const FamilySpec& spec, const std::vector<std::size_t>& k_range, const std::vector<double>& eps_grid,
                 const Limits& limits = {});

/// family,n,k,s,bias_uniform,bias_space,fooling_error_exact,fooling_error_float
std::string sweep_csv(const SweepTable& table);

enum class InfluenceMethod { direct, halfspace_identity, via_space };

std::string to_string(InfluenceMethod m);

struct InfluenceReport {
    InfluenceMethod method = InfluenceMethod::direct;
    std::size_t index = 0;
    /// Pr[h(x) != h(x with bit i flipped)] in probability form.
    Rational value{0};
};

/// The shifted halfspace h'(y) = sign(sum_{j != i} w_j y_j - theta y_i + |w_i|),
/// whose expectation equals the influence of coordinate i. At an exact zero
/// h' takes the value y_i, which the returned tie coordinate encodes.
Halfspace influence_halfspace(const Halfspace& h, std::size_t i);

/// direct: flip counting over the cube; halfspace_identity: E_U[h'];
/// via_space: E_D[h'] under `space` (required for that method).
InfluenceReport influence(const Halfspace& h, std::size_t i, InfluenceMethod method,
                          const KWiseSpace* space = nullptr, const Limits& limits = {});

/// (E[h], E[h x_1], ..., E[h x_n]); uniform when space is null, otherwise
/// multiplicity-weighted over the space.
std::vector<Rational> chow_parameters(const Halfspace& h, const KWiseSpace* space = nullptr,
                                      const Limits& limits = {});

struct CountEstimate {
    /// (1 + E_D[h]) / 2.
    Rational estimate{0};
    std::optional<Rational> exact;
    std::optional<Rational> realized_error;
};

CountEstimate approx_count(const Halfspace& h, const KWiseSpace& space, const Limits& limits = {});

struct TailCheck {
    double level = 0.0;    // gamma (Hoeffding) or k (Chebyshev)
    double measured = 0.0; // worst measured probability
    double bound = 0.0;
    bool ok = true;
};

struct LargeCritOptions {
    /// Head size override (0 = min(L, n)).
    std::size_t head_size = 0;
    /// Skip the crit_index > L precondition (used with a head override).
    bool ignore_crit_precondition = false;
};

struct LargeCritReport {
    bool skipped = false;
    std::string skip_reason;

    std::optional<std::size_t> crit_index;
    std::int64_t L = 0;
    std::size_t head_size = 0;
    std::size_t tail_size = 0;
    std::vector<std::size_t> separated;
    std::size_t k_t = 0;
    double w_kt = 0.0;
    double sigma_T = 0.0;
    double eps = 0.0;

    // bad event |theta - sum_H w_i x_i| <= |w_kt| / 4 over uniform head settings
    std::uint64_t head_assignments = 0;
    std::uint64_t bad_assignments = 0;
    double bad_frequency = 0.0;
    double eps_over_10 = 0.0;
    double separation_bound = 0.0; // 2^-|G|
    bool bad_event_ok = false;

    bool tail_norm_ok = false; // sigma_T < eps |w_kt|
    DecayReport decay;

    bool tails_vacuous = false; // empty tail
    std::vector<TailCheck> hoeffding;
    double quoted_uniform_tail = 0.0; // Pr_U'[|S_T| >= sigma_T/(4 eps)]
    double quoted_uniform_bound = 0.0; // 2 exp(-1/(32 eps^2))
    std::vector<TailCheck> chebyshev; // worst over head fixings
    double quoted_space_tail = 0.0;    // max over fixings of Pr_D'[|S_T| >= sigma_T/(4 eps)]
    double quoted_space_bound = 0.0;   // 16 eps^2
    std::size_t space_fixings = 0;
    double max_abs_mean = 0.0;     // max |E_D'[S_T]|
    double max_var_deviation = 0.0; // max |Var_D'[S_T] - sigma_T^2|
    bool pairwise_tail = false;     // space level - |H| >= 2
    bool tails_ok = false;

    double max_flip_uniform = 0.0; // over good head settings
    double max_flip_space = 0.0;

    Rational fooling_error{0};
    double good_part = 0.0; // sum over good heads of 2^-|H| |E_D'[h'] - E_U'[h']|
    double bad_part = 0.0;  // 2 * bad_frequency
    double bound_9eps = 0.0;

    bool passed() const;
};

LargeCritReport large_crit_experiment(const Halfspace& h, const ParamSchedule& schedule, const KWiseSpace& space,
                                      const LargeCritOptions& options = {}, const Limits& limits = {});

} // namespace hsprg
