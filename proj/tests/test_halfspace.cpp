#include "gen.hpp"
#include "hsprg/halfspace.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace hsprg;

TEST_CASE("normalize") {
    auto h = normalize(make_halfspace({3, 4}, 5));
    CHECK(h.weights[0] == doctest::Approx(0.6));
    CHECK(h.weights[1] == doctest::Approx(0.8));
    CHECK(h.theta == doctest::Approx(1.0));
    auto one = normalize(make_halfspace({1}, 0));
    CHECK(one.weights == std::vector<double>{1.0});
    CHECK(one.theta == 0.0);
    auto zero = normalize(make_halfspace({0, 0}, 1));
    CHECK(zero.is_constant());
    CHECK(zero.weights == std::vector<double>{0.0, 0.0});
    const std::int8_t x[] = {1, -1};
    CHECK(evaluate(zero, x) == -1);
    CHECK(is_normalized(h));
    CHECK_FALSE(is_normalized(make_halfspace({3, 4}, 5)));
}

TEST_CASE("make_halfspace rejects bad input") {
    CHECK_THROWS_AS(make_halfspace({}, 0), InvalidInput);
    CHECK_THROWS_AS(make_halfspace({1, NAN}, 0), InvalidInput);
    CHECK_THROWS_AS(make_halfspace({1}, INFINITY), InvalidInput);
}

TEST_CASE("evaluate with sign(0) = +1") {
    const auto h = make_halfspace({1, -1}, 0);
    const std::int8_t a[] = {1, 1};
    const std::int8_t b[] = {-1, 1};
    CHECK(evaluate(h, a) == 1);
    CHECK(evaluate(h, b) == -1);
    const auto maj = make_halfspace({1, 1, 1}, 0);
    const std::int8_t c[] = {1, 1, -1};
    CHECK(evaluate(maj, c) == 1);
    const std::int8_t bad[] = {1, 0};
    CHECK_THROWS_AS(evaluate(h, bad), InvalidInput);
}

TEST_CASE("exact_sign resolves cancellation that doubles lose") {
    const double t1[] = {1e300, 1.0, -1e300};
    CHECK(exact_sign(t1) == 1);
    const double t2[] = {1e300, -1.0, -1e300};
    CHECK(exact_sign(t2) == -1);
    const double t3[] = {0.1, 0.2, -0.3};
    // 0.1 + 0.2 - 0.3 in exact binary is 2^-54 > 0
    CHECK(exact_sign(t3) == 1);
    const double t4[] = {0.5, -0.25, -0.25};
    CHECK(exact_sign(t4) == 1);
}

TEST_CASE("property: CubeEvaluator and evaluate agree with the integer oracle") {
    CounterRng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen::pick(rng, 1, 12);
        const auto ih = gen::int_halfspace(rng, n);
        const auto h = ih.as_halfspace();
        const CubeEvaluator eval(h);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            const int want = gen::int_eval(ih, mask);
            REQUIRE(eval(mask) == want);
            REQUIRE(evaluate(h, mask_to_point(mask, n)) == want);
        }
    }
}

TEST_CASE("tie coordinate sets the value at exact zeros") {
    const auto h = make_halfspace({1, 1}, 0);
    const CubeEvaluator plain(h);
    const CubeEvaluator tie(h, 2);
    // x = (+1, -1): sum 0
    CHECK(plain(0b10) == 1);
    CHECK(tie(0b10) == -1);
    CHECK(tie(0b01) == 1);
    CHECK(tie(0b00) == 1);
    CHECK(tie(0b11) == -1);
}

TEST_CASE("mask and point conversions invert each other") {
    CounterRng rng(2);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = gen::pick(rng, 1, 64);
        const std::uint64_t mask = n == 64 ? rng.next() : rng.next() & ((std::uint64_t{1} << n) - 1);
        const auto x = mask_to_point(mask, n);
        CHECK(point_to_mask(x) == mask);
        for (std::size_t j = 0; j < n; ++j) CHECK(x[j] == (((mask >> j) & 1U) ? -1 : 1));
    }
}

TEST_CASE("sort_weights") {
    auto s = sort_weights(make_halfspace({0.6, 0.8}, 0));
    CHECK(s.base.weights == std::vector<double>{0.8, 0.6});
    CHECK(s.perm == std::vector<std::size_t>{2, 1});
    auto t = sort_weights(make_halfspace({0.5, 0.5, 0.5, 0.5}, 0));
    CHECK(t.perm == std::vector<std::size_t>{1, 2, 3, 4});
    auto u = sort_weights(make_halfspace({-0.8, 0.6}, 0));
    CHECK(u.base.weights == std::vector<double>{-0.8, 0.6});
    const std::int8_t sp[] = {1, -1};
    CHECK(s.to_original(sp) == std::vector<std::int8_t>{-1, 1});
}

TEST_CASE("property: sorting preserves the function") {
    CounterRng rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = gen::pick(rng, 1, 10);
        const auto h = gen::int_halfspace(rng, n).as_halfspace();
        const auto s = sort_weights(h);
        for (std::size_t j = 1; j < n; ++j) {
            CHECK(std::abs(s.base.weights[j - 1]) >= std::abs(s.base.weights[j]));
        }
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
            const auto xs = mask_to_point(mask, n);
            REQUIRE(evaluate(s.base, xs) == evaluate(h, s.to_original(xs)));
        }
    }
}

TEST_CASE("critical index") {
    auto a = sort_weights(make_halfspace({0.8, 0.6}, 0));
    CHECK(critical_index(a, 0.9) == std::optional<std::size_t>(1));
    CHECK_FALSE(critical_index(a, 0.5).has_value());
    auto b = sort_weights(make_halfspace({0.5, 0.5, 0.5, 0.5}, 0));
    CHECK(critical_index(b, 0.5) == std::optional<std::size_t>(1));
}

TEST_CASE("property: critical index matches the definition") {
    CounterRng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen::pick(rng, 1, 20);
        const auto sh = sort_weights(gen::gaussian_halfspace(rng, n));
        const double tau = 0.05 + 0.9 * rng.uniform();
        std::optional<std::size_t> want;
        for (std::size_t i = 1; i <= n && !want; ++i) {
            long double tail = 0;
            for (std::size_t j = i; j <= n; ++j) tail += (long double)sh.base.weights[j - 1] * sh.base.weights[j - 1];
            if (std::abs(sh.base.weights[i - 1]) <= tau * std::sqrt((double)tail)) want = i;
        }
        CHECK(critical_index(sh, tau) == want);
    }
}

TEST_CASE("tail norm") {
    auto a = sort_weights(make_halfspace({0.8, 0.6}, 0));
    CHECK(tail_norm(a, 2) == doctest::Approx(0.6));
    CHECK(tail_norm(a, 1) == doctest::Approx(1.0));
    auto b = sort_weights(make_halfspace({0.5, 0.5, 0.5, 0.5}, 0));
    CHECK(tail_norm(b, 3) == doctest::Approx(0.70710678).epsilon(1e-8));
    CHECK_THROWS_AS(tail_norm(b, 0), InvalidInput);
    CHECK_THROWS_AS(tail_norm(b, 5), InvalidInput);
}

TEST_CASE("decompose") {
    const auto s02 = make_schedule(0.2, 1, 1, ScheduleMode::empirical);
    CounterRng rng(1);
    auto d = decompose(sort_weights(gen::gaussian_halfspace(rng, 10)), 0.2, s02);
    CHECK(d.L > 3000);
    CHECK(d.head.size() == 10);
    CHECK(d.tail.empty());
    CHECK(d.head_covers_all);
    CHECK(d.sigma.size() == 10);
    auto one = decompose(sort_weights(make_halfspace({1}, 0)), 0.2, s02);
    CHECK(one.head == std::vector<std::size_t>{1});
    CHECK(one.tail.empty());

    const auto s05 = make_schedule(0.5, 1, 1, ScheduleMode::empirical);
    std::vector<double> w(20);
    for (std::size_t i = 0; i < 20; ++i) w[i] = std::ldexp(1.0, -static_cast<int>(i + 1));
    auto geo = decompose(sort_weights(normalize(make_halfspace(w, 0))), 0.5, s05);
    CHECK_FALSE(geo.crit_index.has_value());
    CHECK_THROWS_AS(decompose(sort_weights(make_halfspace({1}, 0)), 0.3, s02), PreconditionFailed);

    auto split = decompose_with_head(sort_weights(normalize(make_halfspace(w, 0))), 0.5, s05, 4);
    CHECK(split.head == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(split.tail.size() == 16);
}

TEST_CASE("geometric ratio oracle: |w_i| / sigma_i = sqrt(3)/2 for w_i = 2^-i") {
    std::vector<double> w(20);
    for (std::size_t i = 0; i < 20; ++i) w[i] = std::ldexp(1.0, -static_cast<int>(i + 1));
    const auto sh = sort_weights(normalize(make_halfspace(w, 0)));
    for (std::size_t i = 1; i <= 20; ++i) {
        // sum_{j >= i} 4^-j = 4^-i (1 - 4^-(n-i+1)) / (3/4)
        const double tail = std::pow(4.0, -static_cast<double>(i)) * (1 - std::pow(4.0, -(21.0 - i))) / 0.75;
        const double ratio = std::ldexp(1.0, -static_cast<int>(i)) / std::sqrt(tail);
        CHECK(std::abs(sh.base.weights[i - 1]) / tail_norm(sh, i) == doctest::Approx(ratio).epsilon(1e-12));
        // truncation at n only raises the ratio; it is > 0.5 at every i
        CHECK(ratio >= std::sqrt(3.0) / 2 - 1e-12);
        CHECK(ratio > 0.5);
    }
}

TEST_CASE("geometric decay and separation") {
    const auto s05 = make_schedule(0.5, 1, 1, ScheduleMode::empirical);
    std::vector<double> w(10);
    for (std::size_t i = 0; i < 10; ++i) w[i] = std::ldexp(1.0, -static_cast<int>(i + 1));
    const auto sh = sort_weights(normalize(make_halfspace(w, 0)));
    const auto r = check_geometric_decay(sh, 0.5, s05);
    CHECK(r.passed());
    CHECK(r.violations.empty());
    CHECK(r.separated == std::vector<std::size_t>{1});
    // One separated coordinate: the sums are +-w_1, gap 2|w_1| >= |w_1|.
    CHECK(r.separation_gap == doctest::Approx(2 * std::abs(sh.base.weights[0])).epsilon(1e-12));
    CHECK(r.separation_bound == doctest::Approx(std::abs(sh.base.weights[0])).epsilon(1e-12));
    CHECK(r.separation_ok);

    const auto single = check_geometric_decay(sort_weights(make_halfspace({1}, 0)), 0.5, s05);
    CHECK(single.passed());
}

TEST_CASE("separation gap of (9, 3, 1)") {
    const double v[] = {9, 3, 1};
    const auto r = separation_gap(v);
    // oracle: enumerate all pairs
    double best = 1e300;
    for (int x = 0; x < 8; ++x)
        for (int y = x + 1; y < 8; ++y) {
            double sx = 0, sy = 0;
            for (int j = 0; j < 3; ++j) {
                sx += ((x >> j) & 1) ? -v[j] : v[j];
                sy += ((y >> j) & 1) ? -v[j] : v[j];
            }
            best = std::min(best, std::abs(sx - sy));
        }
    CHECK(best == 2.0);
    CHECK(r.min_gap == best);
    CHECK(r.min_gap >= 1.0);
    CHECK(r.ratio_condition);
}

TEST_CASE("property: separation gap when v_{i+1} <= v_i / 3") {
    CounterRng rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t t = gen::pick(rng, 1, 8);
        std::vector<double> v(t);
        double cur = 1.0;
        for (auto& x : v) {
            x = cur;
            cur *= (1.0 / 3.0) * (0.3 + 0.7 * rng.uniform());
        }
        const auto r = separation_gap(v);
        CHECK(r.ratio_condition);
        CHECK(r.min_gap >= v.back() * (1 - 1e-12));
    }
}

TEST_CASE("separated coordinates") {
    const auto g = separated_coordinates(0.5, 3, 100);
    const double spacing = 4.0 / 0.25 * std::log(2.0);
    CHECK(g.spacing == doctest::Approx(spacing));
    REQUIRE(g.indices.size() == 3);
    CHECK(g.indices[0] == 1);
    CHECK(g.indices[1] == 1 + static_cast<std::size_t>(std::ceil(spacing)));
    CHECK(g.indices[2] == 1 + static_cast<std::size_t>(std::ceil(2 * spacing)));
    const auto clipped = separated_coordinates(0.5, 3, 20);
    CHECK(clipped.indices == std::vector<std::size_t>{1, 13});
    CHECK(clipped.clipped);
}
