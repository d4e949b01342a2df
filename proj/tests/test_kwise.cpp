#include "gen.hpp"
#include "hsprg/kwise.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace hsprg;

namespace {

// Trial division by every polynomial of degree 1..deg/2.
bool irreducible_oracle(std::uint64_t p) {
    const int deg = 63 - __builtin_clzll(p);
    for (std::uint64_t d = 2; d < (std::uint64_t{1} << (deg / 2 + 1)); ++d) {
        std::uint64_t r = p;
        const int dd = 63 - __builtin_clzll(d);
        while (r != 0 && 63 - __builtin_clzll(r) >= dd) {
            r ^= d << ((63 - __builtin_clzll(r)) - dd);
        }
        if (r == 0) return false;
    }
    return deg >= 1;
}

std::uint64_t clmul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t mod) {
    unsigned __int128 prod = 0;
    for (int i = 0; i < 64; ++i) {
        if ((b >> i) & 1U) prod ^= static_cast<unsigned __int128>(a) << i;
    }
    const int deg = 63 - __builtin_clzll(mod);
    for (int bit = 127; bit >= deg; --bit) {
        if ((prod >> bit) & 1U) prod ^= static_cast<unsigned __int128>(mod) << (bit - deg);
    }
    return static_cast<std::uint64_t>(prod);
}

// Direct tally of one coordinate subset over every seed.
std::map<std::uint64_t, std::uint64_t> tally(const KWiseSpace& space, const std::vector<std::size_t>& coords) {
    std::map<std::uint64_t, std::uint64_t> t;
    for (std::uint64_t seed = 0; seed < space.support_size(); ++seed) {
        std::vector<std::uint8_t> bits(space.s);
        for (unsigned j = 0; j < space.s; ++j) bits[j] = (seed >> j) & 1U;
        const auto x = sample(space, bits);
        std::uint64_t cell = 0;
        for (std::size_t j = 0; j < coords.size(); ++j) cell |= std::uint64_t(x[coords[j]] < 0) << j;
        ++t[cell];
    }
    return t;
}

using Point = std::vector<std::int8_t>;

} // namespace

TEST_CASE("least irreducible polynomials match trial division") {
    for (unsigned m = 1; m <= 12; ++m) {
        std::uint64_t want = 0;
        for (std::uint64_t p = std::uint64_t{1} << m; p < (std::uint64_t{2} << m); ++p) {
            if (irreducible_oracle(p)) {
                want = p;
                break;
            }
        }
        CHECK(Gf2m::least_irreducible(m).modulus() == want);
    }
    CHECK(Gf2m::least_irreducible(2).modulus() == 0b111);
    CHECK(Gf2m::least_irreducible(3).modulus() == 0b1011);
    for (std::uint64_t p = 2; p < 2048; ++p) {
        CHECK(Gf2m::is_irreducible(p) == irreducible_oracle(p));
    }
}

TEST_CASE("property: field multiplication matches carry-less multiply and reduce") {
    CounterRng rng(4);
    for (unsigned m : {3u, 5u, 8u, 13u}) {
        const Gf2m f = Gf2m::least_irreducible(m);
        const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
        for (int i = 0; i < 300; ++i) {
            const auto a = rng.next() & mask;
            const auto b = rng.next() & mask;
            CHECK(f.mul(a, b) == clmul_mod(a, b, f.modulus()));
            CHECK(f.pow(a, 3) == f.mul(a, f.mul(a, a)));
        }
        // a^(2^m - 1) = 1 for a != 0
        CHECK(f.pow(2, mask) == 1);
    }
    CHECK_THROWS_AS(Gf2m(3, 0b1001), InvalidInput);
}

TEST_CASE("(n = 1, k = 1) space") {
    const auto sp = build_space(1, 1);
    CHECK(sp.s == 1);
    std::set<Point> pts;
    for (auto x : enumerate_support(sp)) pts.insert(x);
    CHECK(pts == std::set<Point>{{1}, {-1}});
}

TEST_CASE("(n = 3, k = 2) is the 4-point pairwise space") {
    const auto sp = build_space(3, 2);
    CHECK(sp.s == 2);
    CHECK(sp.construction == Construction::bch);
    std::vector<Point> pts;
    for (auto x : enumerate_support(sp)) pts.push_back(x);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0] == Point{1, 1, 1});
    const std::set<Point> want{{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    CHECK(std::set<Point>(pts.begin(), pts.end()) == want);
    for (auto c : std::vector<std::vector<std::size_t>>{{0, 1}, {0, 2}, {1, 2}}) {
        const auto t = tally(sp, c);
        CHECK(t.size() == 4);
        for (auto [cell, count] : t) CHECK(count == 1);
    }
    // fixed order: a second enumeration is identical
    std::vector<Point> again;
    for (auto x : enumerate_support(sp)) again.push_back(x);
    CHECK(again == pts);
}

TEST_CASE("(n = 7, k = 3) has s = 4 and every 3-cell exactly 2 of 16") {
    const auto sp = build_space(7, 3);
    CHECK(sp.s == 4);
    CHECK(sp.support_size() == 16);
    std::size_t cells = 0;
    for (std::size_t a = 0; a < 7; ++a)
        for (std::size_t b = a + 1; b < 7; ++b)
            for (std::size_t c = b + 1; c < 7; ++c) {
                const auto t = tally(sp, {a, b, c});
                CHECK(t.size() == 8);
                for (auto [cell, count] : t) CHECK(count == 2);
                cells += t.size();
            }
    CHECK(cells == 280);
    const auto r = verify_kwise(sp, 3);
    CHECK(r.passed);
    CHECK(r.cells_checked == 280);
    CHECK(r.expected_count == Rational(2));
}

TEST_CASE("seed mapping") {
    const auto sp = build_space(9, 4);
    CHECK(sample_mask(sp, 0) == 0);
    std::vector<std::uint8_t> zero(sp.s, 0);
    CHECK(sample(sp, zero) == Point(9, 1));
    const auto id = build_space(5, 5);
    CHECK(id.construction == Construction::identity);
    CHECK(id.s == 5);
    for (std::uint64_t seed = 0; seed < 32; ++seed) CHECK(sample_mask(id, seed) == seed);
    const std::vector<std::uint8_t> bits{1, 0, 1, 1, 0};
    CHECK(sample(id, bits) == Point{-1, 1, -1, -1, 1});
    CHECK_THROWS_AS(sample(id, std::vector<std::uint8_t>{1, 0}), InvalidInput);
    CHECK_THROWS_AS(sample(id, std::vector<std::uint8_t>{2, 0, 0, 0, 0}), InvalidInput);
}

TEST_CASE("verify_kwise: pairwise space passes 2 and fails 3 on the empty cell (+,+,-)") {
    const auto sp = build_space(3, 2);
    CHECK(verify_kwise(sp, 2).passed);
    const auto r = verify_kwise(sp, 3);
    CHECK_FALSE(r.passed);
    REQUIRE(r.failure.has_value());
    CHECK(r.failure->subset == std::vector<std::size_t>{1, 2, 3});
    CHECK(r.failure->pattern == Point{1, 1, -1});
    CHECK(r.failure->count == 0);
    CHECK(r.failure->expected == Rational(1, 2));
    CHECK(r.failing_cells.size() == 8);
}

TEST_CASE("the full cube passes every level") {
    const auto sp = build_space(6, 6);
    for (std::size_t k = 1; k <= 6; ++k) CHECK(verify_kwise(sp, k).passed);
}

TEST_CASE("property: BCH spaces are k-wise uniform, with the documented seed length") {
    CounterRng rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = gen::pick(rng, 2, 16);
        const std::size_t k = gen::pick(rng, 1, std::min<std::size_t>(n, 5));
        const auto sp = build_space(n, k);
        unsigned m = 0;
        while ((std::size_t{1} << m) < n + 1) ++m;
        const std::size_t bch_s = (k / 2) * m + (k % 2);
        if (k < n && bch_s < n) {
            CHECK(sp.s == bch_s);
            CHECK(sp.construction == Construction::bch);
        } else {
            CHECK(sp.s == n);
        }
        const auto r = verify_kwise(sp, k);
        CHECK(r.passed);
        // independent tally on one random k-subset
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        for (std::size_t j = 0; j < k; ++j) std::swap(all[j], all[j + rng.next() % (n - j)]);
        const std::vector<std::size_t> coords(all.begin(), all.begin() + k);
        const auto t = tally(sp, coords);
        CHECK(t.size() == (std::size_t{1} << k));
        for (auto [cell, count] : t) CHECK(count * (std::uint64_t{1} << k) == sp.support_size());
    }
}

TEST_CASE("property: BCH spaces with n >= 7 are not (k+1)-wise uniform") {
    // Columns 1, 2, 3 (k = 2) or 1, 2, 4, 7 (k = 3, with the parity row) sum
    // to zero, so those coordinates are dependent.
    CounterRng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = gen::pick(rng, 7, 15);
        const std::size_t k = gen::pick(rng, 2, 3);
        const auto sp = build_space(n, k);
        REQUIRE(sp.construction == Construction::bch);
        CHECK_FALSE(verify_kwise(sp, k + 1).passed);
    }
}

TEST_CASE("descriptors rebuild the exact generator matrix") {
    for (auto [n, k] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 2}, {10, 3}, {20, 4}, {5, 5}, {30, 7}}) {
        const auto sp = build_space(n, k);
        const auto back = from_descriptor(describe(sp));
        CHECK(back.columns == sp.columns);
        CHECK(back.s == sp.s);
        CHECK(back.k == sp.k);
    }
    auto d = describe(build_space(10, 3));
    d.s += 1;
    CHECK_THROWS_AS(from_descriptor(d), InvalidInput);
    auto bad = describe(build_space(10, 3));
    bad.modulus = 0b10001; // reducible
    CHECK_THROWS_AS(from_descriptor(bad), InvalidInput);
}

TEST_CASE("permuted columns relabel coordinates") {
    const auto sp = build_space(6, 3);
    const std::vector<std::size_t> perm{3, 1, 6, 2, 5, 4};
    const auto pp = permute_columns(sp, perm);
    for (std::uint64_t seed = 0; seed < sp.support_size(); ++seed) {
        const auto x = sample_mask(sp, seed);
        const auto y = sample_mask(pp, seed);
        for (std::size_t j = 0; j < 6; ++j) CHECK(((y >> j) & 1U) == ((x >> (perm[j] - 1)) & 1U));
    }
    CHECK_THROWS_AS(permute_columns(sp, std::vector<std::size_t>{1, 1, 2, 3, 4, 5}), InvalidInput);
}

TEST_CASE("guards") {
    Limits small;
    small.max_seed_bits = 3;
    CHECK_THROWS_AS(enumerate_support(build_space(10, 3), small), ResourceLimit);
    CHECK_THROWS_AS(verify_kwise(build_space(40, 8), 8), ResourceLimit);
    CHECK_THROWS_AS(build_space(5, 0), InvalidInput);
    CHECK_THROWS_AS(build_space(5, 6), InvalidInput);
    CHECK_THROWS_AS(verify_kwise(build_space(5, 2), 6), InvalidInput);
    CHECK(binomial(10, 3) == 120);
    CHECK(binomial(5, 7) == 0);
    CHECK(binomial(200, 100) == UINT64_MAX);
}

TEST_CASE("parse_construction") {
    CHECK(parse_construction("bch") == Construction::bch);
    CHECK(parse_construction("identity") == Construction::identity);
    CHECK_THROWS_AS(parse_construction("rs"), InvalidInput);
}
