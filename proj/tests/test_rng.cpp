#include "surex/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using surex::Rng;

TEST_CASE("same seed reproduces the stream exactly") {
    Rng a(12345);
    Rng b(12345);
    for (int i = 0; i < 1000; ++i) CHECK(a.raw() == b.raw());
    Rng c(12345);
    Rng d(12345);
    for (int i = 0; i < 100; ++i) {
        CHECK(c.uniform() == d.uniform());
        CHECK(c.normal() == d.normal());
        CHECK(c.uniform_int(97) == d.uniform_int(97));
    }
}

TEST_CASE("different seeds give different streams") {
    Rng a(1);
    Rng b(2);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (a.raw() == b.raw()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("derived streams are stable and decorrelated") {
    Rng master(777);
    Rng c1 = master.derive(4);
    Rng c2 = master.derive(4);
    for (int i = 0; i < 100; ++i) CHECK(c1.raw() == c2.raw());

    Rng other = master.derive(5);
    Rng c3 = master.derive(4);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (c3.raw() == other.raw()) ++equal;
    CHECK(equal == 0);

    // Deriving must not disturb the parent stream.
    Rng p1(777);
    Rng p2(777);
    (void)p1.derive(9);
    CHECK(p1.raw() == p2.raw());
}

TEST_CASE("uniform stays strictly inside the open unit interval") {
    Rng rng(42);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double u = rng.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    // With 2e5 draws the extremes should get close to the endpoints.
    CHECK(lo < 1e-4);
    CHECK(hi > 1.0 - 1e-4);
}

TEST_CASE("uniform(lo, hi) maps into the requested range with the right mean") {
    Rng rng(43);
    double acc = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform(-2.0, 6.0);
        CHECK(u >= -2.0);
        CHECK(u <= 6.0);
        acc += u;
    }
    CHECK(acc / n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("uniform_int covers its range without bias") {
    Rng rng(44);
    std::vector<int> counts(10, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t v = rng.uniform_int(10);
        REQUIRE(v < 10);
        ++counts[static_cast<std::size_t>(v)];
    }
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 0.1) < 0.01);
}

TEST_CASE("uniform_int rejects an empty range") {
    Rng rng(45);
    CHECK_THROWS_AS((void)rng.uniform_int(0), std::invalid_argument);
}

TEST_CASE("normal draws have the right first two moments") {
    Rng rng(46);
    const int n = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sumsq += z * z;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("permutation returns each index exactly once") {
    Rng rng(47);
    for (std::size_t n : {std::size_t{1}, std::size_t{2}, std::size_t{25}}) {
        auto p = rng.permutation(n);
        REQUIRE(p.size() == n);
        std::set<std::size_t> seen(p.begin(), p.end());
        CHECK(seen.size() == n);
        CHECK(*seen.begin() == 0);
        CHECK(*seen.rbegin() == n - 1);
    }
    CHECK(rng.permutation(0).empty());
}

TEST_CASE("permutation is uniform over small cases") {
    Rng rng(48);
    // All 6 permutations of 3 elements should appear with frequency ~1/6.
    std::vector<int> counts(6, 0);
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        auto p = rng.permutation(3);
        const int code = static_cast<int>(p[0]) * 2 + (p[1] > p[2] ? 1 : 0);
        ++counts[static_cast<std::size_t>(code)];
    }
    for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 1.0 / 6.0) < 0.01);
}

TEST_CASE("sample_without_replacement yields distinct in-range indices") {
    Rng rng(49);
    auto s = rng.sample_without_replacement(50, 20);
    REQUIRE(s.size() == 20);
    std::set<std::size_t> seen(s.begin(), s.end());
    CHECK(seen.size() == 20);
    for (std::size_t v : s) CHECK(v < 50);

    auto all = rng.sample_without_replacement(7, 7);
    std::set<std::size_t> seen_all(all.begin(), all.end());
    CHECK(seen_all.size() == 7);
}
