#include "hsprg/kwise.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

namespace hsprg {

namespace {

unsigned poly_degree(std::uint64_t p) { return p == 0 ? 0 : 63U - static_cast<unsigned>(std::countl_zero(p)); }

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t p) {
    const unsigned dp = poly_degree(p);
    while (a != 0 && poly_degree(a) >= dp) {
        a ^= p << (poly_degree(a) - dp);
    }
    return a;
}

} // namespace

Gf2m::Gf2m(unsigned degree, std::uint64_t modulus) : degree_(degree), modulus_(modulus) {
    if (degree < 1 || degree > 31) {
        throw InvalidInput("field degree must lie in [1, 31]");
    }
    if (poly_degree(modulus) != degree || !is_irreducible(modulus)) {
        throw InvalidInput("modulus " + std::to_string(modulus) + " is not an irreducible polynomial of degree " +
                           std::to_string(degree));
    }
}

bool Gf2m::is_irreducible(std::uint64_t poly) {
    const unsigned d = poly_degree(poly);
    if (poly == 0 || d == 0) {
        return false;
    }
    for (std::uint64_t q = 2; poly_degree(q) <= d / 2; ++q) {
        if (poly_mod(poly, q) == 0) {
            return false;
        }
    }
    return true;
}

Gf2m Gf2m::least_irreducible(unsigned degree) {
    if (degree < 1 || degree > 31) {
        throw InvalidInput("field degree must lie in [1, 31]");
    }
    for (std::uint64_t p = std::uint64_t{1} << degree;; ++p) {
        if (is_irreducible(p)) {
            return Gf2m(degree, p);
        }
    }
}

std::uint64_t Gf2m::mul(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t r = 0;
    while (b != 0) {
        if (b & 1U) {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if (a >> degree_) {
            a ^= modulus_;
        }
    }
    return r;
}

std::uint64_t Gf2m::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    while (e != 0) {
        if (e & 1U) {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::string to_string(Construction c) { return c == Construction::bch ? "bch" : "identity"; }

Construction parse_construction(const std::string& text) {
    if (text == "bch") return Construction::bch;
    if (text == "identity") return Construction::identity;
    throw InvalidInput("unknown construction '" + text + "'");
}

namespace {

unsigned field_degree_for(std::size_t n) {
    unsigned m = 1;
    while ((std::uint64_t{1} << m) < n + 1) {
        ++m;
    }
    return m;
}

void check_nk(std::size_t n, std::size_t k) {
    if (n < 1) {
        throw InvalidInput("dimension n must be positive");
    }
    if (k < 1 || k > n) {
        throw InvalidInput("independence level k must satisfy 1 <= k <= n");
    }
}

} // namespace

KWiseSpace identity_space(std::size_t n) {
    if (n < 1 || n > 64) {
        throw InvalidInput("identity space supports 1 <= n <= 64 (seed bits are stored in 64-bit words)");
    }
    KWiseSpace space;
    space.n = n;
    space.k = n;
    space.s = static_cast<unsigned>(n);
    space.construction = Construction::identity;
    space.columns.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        space.columns[i] = std::uint64_t{1} << i;
    }
    return space;
}

KWiseSpace build_bch_space(std::size_t n, std::size_t k, std::uint64_t modulus) {
    check_nk(n, k);
    const unsigned m = field_degree_for(n);
    const Gf2m field(m, modulus);
    const std::size_t e = k / 2; // == ceil((k-1)/2)
    const bool ones_row = (k % 2) == 1;
    const std::size_t s = e * m + (ones_row ? 1 : 0);
    if (s > 64) {
        throw InvalidInput("seed length " + std::to_string(s) + " exceeds 64 bits");
    }
    KWiseSpace space;
    space.n = n;
    space.k = k;
    space.s = static_cast<unsigned>(s);
    space.construction = Construction::bch;
    space.modulus = modulus;
    space.columns.resize(n);
    for (std::size_t i = 1; i <= n; ++i) {
        std::uint64_t col = 0;
        unsigned bit = 0;
        if (ones_row) {
            col |= 1U;
            bit = 1;
        }
        for (std::size_t j = 1; j <= e; ++j) {
            col |= field.pow(i, 2 * j - 1) << bit;
            bit += m;
        }
        space.columns[i - 1] = col;
    }
    return space;
}

KWiseSpace build_space(std::size_t n, std::size_t k) {
    check_nk(n, k);
    if (k < n) {
        const unsigned m = field_degree_for(n);
        const std::size_t s = (k / 2) * m + (k % 2);
        if (s < n && s <= 64) {
            return build_bch_space(n, k, Gf2m::least_irreducible(m).modulus());
        }
    }
    auto space = identity_space(n);
    space.k = k;
    return space;
}

KWiseSpace permute_columns(const KWiseSpace& space, std::span<const std::size_t> perm) {
    if (perm.size() != space.n) {
        throw InvalidInput("permutation length must equal n");
    }
    std::vector<bool> seen(space.n, false);
    KWiseSpace out = space;
    for (std::size_t j = 0; j < space.n; ++j) {
        if (perm[j] < 1 || perm[j] > space.n || seen[perm[j] - 1]) {
            throw InvalidInput("not a permutation of [n]");
        }
        seen[perm[j] - 1] = true;
        out.columns[j] = space.columns[perm[j] - 1];
    }
    return out;
}

SpaceDescriptor describe(const KWiseSpace& space) {
    return {space.n, space.k, space.s, space.construction, space.modulus};
}

KWiseSpace from_descriptor(const SpaceDescriptor& d) {
    KWiseSpace space;
    if (d.construction == Construction::identity) {
        space = identity_space(d.n);
        if (d.k < 1 || d.k > d.n) {
            throw InvalidInput("descriptor k out of range");
        }
        space.k = d.k;
    } else {
        space = build_bch_space(d.n, d.k, d.modulus);
    }
    if (space.s != d.s) {
        throw InvalidInput("descriptor seed length " + std::to_string(d.s) + " does not match the construction (" +
                           std::to_string(space.s) + ")");
    }
    return space;
}

std::vector<std::int8_t> sample(const KWiseSpace& space, std::span<const std::uint8_t> seed_bits) {
    if (seed_bits.size() != space.s) {
        throw InvalidInput("seed has " + std::to_string(seed_bits.size()) + " bits, space needs " +
                           std::to_string(space.s));
    }
    std::uint64_t seed = 0;
    for (std::size_t j = 0; j < seed_bits.size(); ++j) {
        if (seed_bits[j] > 1) {
            throw InvalidInput("seed bits must be 0 or 1");
        }
        seed |= static_cast<std::uint64_t>(seed_bits[j]) << j;
    }
    std::vector<std::int8_t> x(space.n);
    for (std::size_t i = 0; i < space.n; ++i) {
        x[i] = (std::popcount(seed & space.columns[i]) & 1) ? -1 : 1;
    }
    return x;
}

std::uint64_t sample_mask(const KWiseSpace& space, std::uint64_t seed) {
    std::uint64_t mask = 0;
    for (std::size_t i = 0; i < space.n; ++i) {
        mask |= static_cast<std::uint64_t>(std::popcount(seed & space.columns[i]) & 1) << i;
    }
    return mask;
}

void check_enumerable(const KWiseSpace& space, const Limits& limits) {
    limits.validate();
    if (static_cast<int>(space.s) > limits.max_seed_bits) {
        throw ResourceLimit("support enumeration needs 2^" + std::to_string(space.s) + " seeds; guard is s <= " +
                            std::to_string(limits.max_seed_bits) + " (use streaming Monte Carlo over seeds)");
    }
    if (space.n > 64) {
        throw ResourceLimit("mask enumeration supports n <= 64");
    }
}

SupportView::iterator::value_type SupportView::iterator::operator*() const {
    std::vector<std::int8_t> x(space_->n);
    for (std::size_t i = 0; i < space_->n; ++i) {
        x[i] = (std::popcount(seed_ & space_->columns[i]) & 1) ? -1 : 1;
    }
    return x;
}

SupportView enumerate_support(const KWiseSpace& space, const Limits& limits) {
    limits.validate();
    if (static_cast<int>(space.s) > limits.max_seed_bits) {
        throw ResourceLimit("support enumeration needs 2^" + std::to_string(space.s) + " seeds; guard is s <= " +
                            std::to_string(limits.max_seed_bits));
    }
    return SupportView(space);
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(r);
}

namespace {

// Advances a sorted 0-based combination; false when exhausted.
bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
    const std::size_t k = c.size();
    for (std::size_t i = k; i-- > 0;) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

std::vector<std::size_t> first_combination(std::size_t k) {
    std::vector<std::size_t> c(k);
    std::iota(c.begin(), c.end(), std::size_t{0});
    return c;
}

std::vector<std::int8_t> pattern_of(std::uint64_t bits, std::size_t len) {
    std::vector<std::int8_t> p(len);
    for (std::size_t j = 0; j < len; ++j) {
        p[j] = ((bits >> j) & 1U) ? -1 : 1;
    }
    return p;
}

std::vector<std::size_t> one_based(const std::vector<std::size_t>& c) {
    std::vector<std::size_t> out(c.size());
    std::transform(c.begin(), c.end(), out.begin(), [](std::size_t i) { return i + 1; });
    return out;
}

class SupportMasks {
  public:
    explicit SupportMasks(const KWiseSpace& space) : space_(space) {
        if (space.s <= 24) {
            masks_.resize(space.support_size());
            for (std::uint64_t seed = 0; seed < masks_.size(); ++seed) {
                masks_[seed] = sample_mask(space, seed);
            }
        }
    }
    std::uint64_t operator[](std::uint64_t seed) const {
        return masks_.empty() ? sample_mask(space_, seed) : masks_[seed];
    }
    std::uint64_t size() const { return space_.support_size(); }

  private:
    const KWiseSpace& space_;
    std::vector<std::uint64_t> masks_;
};

std::uint64_t project(std::uint64_t mask, const std::vector<std::size_t>& coords) {
    std::uint64_t p = 0;
    for (std::size_t j = 0; j < coords.size(); ++j) {
        p |= ((mask >> coords[j]) & 1U) << j;
    }
    return p;
}

// Tally of all seeds onto the given coordinates; returns the first cell whose
// count differs from `expected` (count * 2^|coords| == 2^s).
std::optional<std::pair<std::uint64_t, std::uint64_t>> uniformity_failure(const SupportMasks& masks,
                                                                          const std::vector<std::size_t>& coords,
                                                                          std::vector<std::uint64_t>& tally,
                                                                          unsigned s) {
    std::fill(tally.begin(), tally.end(), 0);
    for (std::uint64_t seed = 0; seed < masks.size(); ++seed) {
        ++tally[project(masks[seed], coords)];
    }
    const std::size_t level = coords.size();
    for (std::uint64_t cell = 0; cell < tally.size(); ++cell) {
        // count == 2^(s - level), compared without fractional arithmetic
        const bool ok = level <= s ? tally[cell] == (std::uint64_t{1} << (s - level)) : false;
        if (!ok) {
            return std::make_pair(cell, tally[cell]);
        }
    }
    return std::nullopt;
}

} // namespace

KWiseReport verify_kwise(const KWiseSpace& space, std::size_t level, const Limits& limits,
                         const VerifyOptions& options) {
    limits.validate();
    if (level < 1 || level > space.n) {
        throw InvalidInput("verification level must satisfy 1 <= k <= n");
    }
    if (space.n > 64) {
        throw ResourceLimit("exhaustive verification supports n <= 64");
    }
    const std::uint64_t subsets = binomial(space.n, level);
    const bool feasible = subsets <= (std::uint64_t{1} << 26) >> std::min<std::size_t>(level, 26) &&
                          space.s <= 26 && subsets <= (std::uint64_t{1} << 34) >> space.s;
    if (!feasible && !limits.unsafe) {
        throw ResourceLimit("exhaustive k-wise verification infeasible: C(n,k)=" + std::to_string(subsets) +
                            ", s=" + std::to_string(space.s));
    }

    KWiseReport report;
    report.level = level;
    report.expected_count = Rational(std::int64_t{1} << std::min<unsigned>(space.s, 62)) /
                            Rational(std::int64_t{1} << std::min<std::size_t>(level, 62));

    const SupportMasks masks(space);
    std::vector<std::uint64_t> tally(std::size_t{1} << level);
    auto combo = first_combination(level);
    do {
        ++report.subsets_checked;
        report.cells_checked += tally.size();
        if (uniformity_failure(masks, combo, tally, space.s)) {
            // Cells in truth-table order (x_1 slowest, + before -); the lead
            // failure is the first empty cell when there is one.
            for (std::uint64_t row = 0; row < tally.size(); ++row) {
                std::uint64_t cell = 0;
                for (std::size_t j = 0; j < level; ++j) {
                    cell |= ((row >> (level - 1 - j)) & 1U) << j;
                }
                if (level <= space.s && tally[cell] == (std::uint64_t{1} << (space.s - level))) {
                    continue;
                }
                report.failing_cells.push_back(
                    CellFailure{one_based(combo), pattern_of(cell, level), tally[cell], report.expected_count});
            }
            const auto empty = std::find_if(report.failing_cells.begin(), report.failing_cells.end(),
                                            [](const CellFailure& c) { return c.count == 0; });
            report.failure = empty != report.failing_cells.end() ? *empty : report.failing_cells.front();
            return report;
        }
    } while (next_combination(combo, space.n));
    report.passed = true;

    if (!options.check_conditional || level < 2) {
        return report;
    }
    // Conditional uniformity: fix t coordinates, require the rest to be
    // (level - t)-wise uniform among the seeds agreeing with the fixing.
    std::uint64_t work = 0;
    for (std::size_t t = 1; t < level; ++t) {
        work += std::min<std::uint64_t>(binomial(space.n, t), options.max_fixing_subsets) *
                binomial(space.n - t, level - t) * masks.size();
    }
    if (work > (std::uint64_t{1} << 30) && !limits.unsafe) {
        report.conditional_skipped = true;
        return report;
    }
    CounterRng rng(0x5eedf1c5ULL);
    for (std::size_t t = 1; t < level; ++t) {
        std::vector<std::vector<std::size_t>> fixings;
        if (binomial(space.n, t) <= options.max_fixing_subsets) {
            auto f = first_combination(t);
            do {
                fixings.push_back(f);
            } while (next_combination(f, space.n));
        } else {
            while (fixings.size() < options.max_fixing_subsets) {
                std::vector<std::size_t> pool(space.n);
                std::iota(pool.begin(), pool.end(), std::size_t{0});
                for (std::size_t j = 0; j < t; ++j) {
                    std::swap(pool[j], pool[j + rng.next() % (space.n - j)]);
                }
                std::vector<std::size_t> f(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(t));
                std::sort(f.begin(), f.end());
                fixings.push_back(std::move(f));
            }
        }
        const std::size_t rest_level = level - t;
        for (const auto& fixed : fixings) {
            std::vector<std::size_t> others;
            for (std::size_t i = 0; i < space.n; ++i) {
                if (!std::binary_search(fixed.begin(), fixed.end(), i)) {
                    others.push_back(i);
                }
            }
            ++report.fixings_checked;
            std::vector<std::uint64_t> joint(std::size_t{1} << level);
            auto sub = first_combination(rest_level);
            do {
                std::vector<std::size_t> coords = fixed;
                for (std::size_t j : sub) {
                    coords.push_back(others[j]);
                }
                // Within each fixing pattern the rest must be uniform, and the
                // fixing patterns themselves must each carry 2^(s-t) seeds;
                // together that is exactly joint uniformity of the cells.
                if (auto bad = uniformity_failure(masks, coords, joint, space.s)) {
                    const std::uint64_t fixed_bits = bad->first & ((std::uint64_t{1} << t) - 1);
                    std::vector<std::size_t> rest_coords(coords.begin() + static_cast<std::ptrdiff_t>(t), coords.end());
                    report.conditional_failure = ConditionalFailure{
                        one_based(fixed), pattern_of(fixed_bits, t),
                        CellFailure{one_based(rest_coords), pattern_of(bad->first >> t, rest_level), bad->second,
                                    report.expected_count}};
                    report.passed = false;
                    return report;
                }
            } while (next_combination(sub, others.size()));
        }
    }
    return report;
}

} // namespace hsprg
