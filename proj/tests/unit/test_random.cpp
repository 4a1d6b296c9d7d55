#include <doctest.h>

#include <cmath>
#include <vector>

#include "itr/core/random.hpp"

using namespace itr;

TEST_CASE("mix64 matches the SplitMix64 reference output") {
    // First outputs of SplitMix64 seeded with 0 (state advanced by the golden gamma).
    CHECK(mix64(0) == 0xE220A8397B1DCDAFULL);
    CHECK(mix64(0x9E3779B97F4A7C15ULL) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("derive_seed separates streams and replicate seeds xor the index") {
    CHECK(derive_seed(7, stream::outcome) != derive_seed(7, stream::treatment));
    CHECK(derive_seed(7, stream::outcome) == mix64(7 ^ mix64(stream::outcome)));
    CHECK(replicate_seed(0b1010, 0b0110) == 0b1100);
}

TEST_CASE("Rng is reproducible and uniform draws stay in range") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    Rng c(1);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[c.index(7)];
    for (int k : counts) CHECK(std::abs(k - 10000) < 500);
}

TEST_CASE("normal draws have unit moments") {
    Rng r(3);
    double s = 0.0, ss = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = r.normal();
        s += z;
        ss += z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(ss / n - 1.0) < 0.02);
}

TEST_CASE("truncated normal respects the bound and matches the inverse Mills ratio") {
    for (double a : {-1.5, 0.0, 0.3, 0.45, 0.5, 1.7, 4.0}) {
        Rng r(11);
        double s = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const double z = r.normal_above(a);
            REQUIRE(z > a);
            s += z;
        }
        const double phi = std::exp(-0.5 * a * a) / std::sqrt(2.0 * M_PI);
        const double tail = 0.5 * std::erfc(a / std::sqrt(2.0));
        CHECK(s / n == doctest::Approx(phi / tail).epsilon(0.01));
    }
}
