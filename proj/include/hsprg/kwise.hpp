#pragma once

#include "hsprg/common.hpp"

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hsprg {

/// GF(2^m) with elements as bit masks of polynomial coefficients, reduced
/// modulo a fixed irreducible polynomial (bit m set).
class Gf2m {
  public:
    Gf2m(unsigned degree, std::uint64_t modulus);

    /// The lexicographically least (numerically smallest) irreducible
    /// polynomial of the given degree.
    static Gf2m least_irreducible(unsigned degree);
    static bool is_irreducible(std::uint64_t poly);

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;

    unsigned degree() const { return degree_; }
    std::uint64_t modulus() const { return modulus_; }

  private:
    unsigned degree_;
    std::uint64_t modulus_;
};

enum class Construction { bch, identity };

std::string to_string(Construction c);
Construction parse_construction(const std::string& text);

/// Linear sample space over {-1,+1}^n: seed (s bits) -> point with
/// x_i = (-1)^{<seed, column_i>}. Every set of <= k columns is linearly
/// independent over GF(2), so every k coordinates are exactly uniform.
struct KWiseSpace {
    std::size_t n = 0;
    std::size_t k = 0;
    unsigned s = 0;
    /// Column i (0-based storage of coordinate i+1) as an s-bit mask.
    std::vector<std::uint64_t> columns;
    Construction construction = Construction::bch;
    /// Irreducible polynomial of the BCH field, 0 for identity.
    std::uint64_t modulus = 0;

    std::uint64_t support_size() const { return std::uint64_t{1} << s; }
};

/// BCH-style space: with m = ceil(log2(n+1)), e = ceil((k-1)/2) and alpha_i
/// the field element with bit pattern i, column i stacks the m-bit expansions
/// of alpha_i, alpha_i^3, ..., alpha_i^(2e-1), preceded by a constant 1 bit
/// when k is odd. Seed length s = e*m + (k mod 2). When that is not shorter
/// than n (in particular k = n) the identity matrix is used (s = n).
KWiseSpace build_space(std::size_t n, std::size_t k);

/// BCH space over an explicit modulus (used to rebuild from a descriptor).
KWiseSpace build_bch_space(std::size_t n, std::size_t k, std::uint64_t modulus);

KWiseSpace identity_space(std::size_t n);

/// Space with columns reordered: column j of the result is column perm[j]-1.
KWiseSpace permute_columns(const KWiseSpace& space, std::span<const std::size_t> perm);

struct SpaceDescriptor {
    std::size_t n = 0;
    std::size_t k = 0;
    unsigned s = 0;
    Construction construction = Construction::bch;
    std::uint64_t modulus = 0;
};

SpaceDescriptor describe(const KWiseSpace& space);
/// Rebuilds the exact generator matrix; throws InvalidInput when the fields
/// are inconsistent.
KWiseSpace from_descriptor(const SpaceDescriptor& d);

/// Point for a seed given as s bits (bit j of the seed integer = seed_bits[j]).
std::vector<std::int8_t> sample(const KWiseSpace& space, std::span<const std::uint8_t> seed_bits);

/// Mask form (bit i-1 set means x_i = -1); requires n <= 64.
std::uint64_t sample_mask(const KWiseSpace& space, std::uint64_t seed);

/// Throws ResourceLimit when s exceeds the seed-bit guard.
void check_enumerable(const KWiseSpace& space, const Limits& limits);

/// Calls f(seed, mask) for seed = 0 .. 2^s - 1 in ascending order (n <= 64).
template <class F>
void for_each_support_point(const KWiseSpace& space, const Limits& limits, F&& f) {
    check_enumerable(space, limits);
    const std::uint64_t size = space.support_size();
    for (std::uint64_t seed = 0; seed < size; ++seed) {
        f(seed, sample_mask(space, seed));
    }
}

/// Lazy ascending-seed view of the support as +1/-1 vectors.
class SupportView {
  public:
    class iterator {
      public:
        using iterator_category = std::input_iterator_tag;
        using value_type = std::vector<std::int8_t>;
        using difference_type = std::ptrdiff_t;
        using pointer = void;
        using reference = value_type;

        iterator() = default;
        iterator(const KWiseSpace* space, std::uint64_t seed) : space_(space), seed_(seed) {}

        value_type operator*() const;
        iterator& operator++() {
            ++seed_;
            return *this;
        }
        iterator operator++(int) {
            auto old = *this;
            ++seed_;
            return old;
        }
        bool operator==(const iterator& other) const { return seed_ == other.seed_; }

      private:
        const KWiseSpace* space_ = nullptr;
        std::uint64_t seed_ = 0;
    };

    explicit SupportView(const KWiseSpace& space) : space_(&space) {}
    iterator begin() const { return {space_, 0}; }
    iterator end() const { return {space_, space_->support_size()}; }
    std::uint64_t size() const { return space_->support_size(); }

  private:
    const KWiseSpace* space_;
};

/// Checks the guard and returns the lazy support view.
SupportView enumerate_support(const KWiseSpace& space, const Limits& limits = {});

struct CellFailure {
    std::vector<std::size_t> subset; // 1-based coordinates
    std::vector<std::int8_t> pattern;
    std::uint64_t count = 0;
    /// Expected count as a rational (2^s / 2^level).
    Rational expected{0};
};

struct ConditionalFailure {
    std::vector<std::size_t> fixed;
    std::vector<std::int8_t> fixed_pattern;
    CellFailure cell;
};

struct KWiseReport {
    std::size_t level = 0;
    bool passed = false;
    Rational expected_count{0};
    std::uint64_t subsets_checked = 0;
    std::uint64_t cells_checked = 0;
    /// First empty cell of the first failing subset, or its first deviating
    /// cell when none is empty.
    std::optional<CellFailure> failure;
    /// Every deviating cell of that subset in truth-table order.
    std::vector<CellFailure> failing_cells;

    std::uint64_t fixings_checked = 0;
    bool conditional_skipped = false;
    std::optional<ConditionalFailure> conditional_failure;
};

struct VerifyOptions {
    /// Fixing subsets per size t; all of them when C(n, t) does not exceed it,
    /// otherwise a deterministic pseudo-random sample of this many.
    std::size_t max_fixing_subsets = 16;
    bool check_conditional = true;
};

/// Exhaustive tally: for every `level`-subset of coordinates and every sign
/// pattern, the number of seeds projecting onto it must equal 2^s / 2^level.
/// Also checks that fixing t < level coordinates leaves the remaining ones
/// (level - t)-wise uniform.
/// Feasibility guard: C(n, level) * 2^level <= 2^26, 2^s <= 2^26 and
/// C(n, level) * 2^s <= 2^34, else ResourceLimit (lifted by limits.unsafe).
KWiseReport verify_kwise(const KWiseSpace& space, std::size_t level, const Limits& limits = {},
                         const VerifyOptions& options = {});

/// Binomial coefficient saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

} // namespace hsprg
