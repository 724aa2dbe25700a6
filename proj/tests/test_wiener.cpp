#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "sllg/wiener.hpp"

using namespace sllg;
using Catch::Approx;

TEST_CASE("counter hash and gaussian draws are frozen", "[wiener]") {
    // reference values computed with an independent implementation of the
    // same splitmix64 chain and Box-Muller map
    CHECK(rng::counter_hash(1, 0, 0, 0, 0, 0) == 12332262003925819033ULL);
    CHECK(rng::counter_hash(42, 3, 1, 7, 2, 1) == 6498409777526206905ULL);
    CHECK(rng::gaussian(42, 3, 0, 7, 1) == Approx(-1.6189408602856474).epsilon(1e-15));
    CHECK(rng::gaussian(1, 0, 0, 0, 0) == Approx(-0.17222704674834921).epsilon(1e-15));
    CHECK(rng::gaussian(7, 2, 5, 123, 0) == Approx(1.7252391138229504).epsilon(1e-15));
    CHECK(std::string(kGeneratorId) == "sllg-splitmix64-boxmuller-v1");
}

TEST_CASE("gaussian stream has standard-normal moments", "[wiener]") {
    const int n = 20000;
    double mean = 0.0, sq = 0.0;
    for (int m = 0; m < n; ++m) {
        const double z = rng::gaussian(2024, 0, 0, static_cast<uint64_t>(m), 0);
        mean += z;
        sq += z * z;
    }
    mean /= n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("paths are a pure function of the seed descriptor", "[wiener]") {
    WienerPath a = WienerPath::generate({5, 2}, 0.01, 50, 3);
    WienerPath b = WienerPath::generate({5, 2}, 0.01, 50, 3);
    for (long m = 0; m < 50; ++m)
        for (int j = 0; j < 3; ++j)
            CHECK(a.increment(m, j) == b.increment(m, j));

    WienerPath c = WienerPath::generate({5, 3}, 0.01, 50, 3);
    WienerPath d = WienerPath::generate({6, 2}, 0.01, 50, 3);
    bool differs_replica = false, differs_seed = false;
    for (long m = 0; m < 50; ++m) {
        if (a.increment(m, 0) != c.increment(m, 0)) differs_replica = true;
        if (a.increment(m, 0) != d.increment(m, 0)) differs_seed = true;
    }
    CHECK(differs_replica);
    CHECK(differs_seed);
}

TEST_CASE("increments scale like sqrt(dt)", "[wiener]") {
    const long steps = 4000;
    WienerPath p = WienerPath::generate({11, 0}, 0.25, steps, 1);
    double sq = 0.0;
    for (long m = 0; m < steps; ++m) sq += p.increment(m, 0) * p.increment(m, 0);
    CHECK(sq / (steps * 0.25) == Approx(1.0).margin(0.06));
}

TEST_CASE("refinement is a consistent bridge", "[wiener]") {
    WienerPath coarse = WienerPath::generate({9, 4}, 0.125, 16, 2);
    WienerPath fine = coarse.refine();

    CHECK(fine.dt() == Approx(0.0625).epsilon(1e-15));
    CHECK(fine.steps() == 32);
    CHECK(fine.level() == 1);
    CHECK(fine.channels() == 2);

    SECTION("fine increments sum pairwise to the coarse ones") {
        for (long m = 0; m < 16; ++m)
            for (int j = 0; j < 2; ++j)
                CHECK(fine.increment(2 * m, j) + fine.increment(2 * m + 1, j) ==
                      Approx(coarse.increment(m, j)).margin(1e-15));
    }
    SECTION("channel totals survive any number of refinements") {
        WienerPath finer = fine.refine();
        for (int j = 0; j < 2; ++j) {
            CHECK(fine.channel_total(j) == Approx(coarse.channel_total(j)).margin(1e-13));
            CHECK(finer.channel_total(j) == Approx(coarse.channel_total(j)).margin(1e-13));
        }
    }
    SECTION("refinement draws fresh randomness") {
        bool midpoint_moves = false;
        for (long m = 0; m < 16; ++m)
            if (std::abs(fine.increment(2 * m, 0) - 0.5 * coarse.increment(m, 0)) > 1e-12)
                midpoint_moves = true;
        CHECK(midpoint_moves);
    }
}

TEST_CASE("generation validates arguments", "[wiener]") {
    CHECK_THROWS_AS(WienerPath::generate({1, 0}, 0.0, 10, 1), ConfigError);
    CHECK_THROWS_AS(WienerPath::generate({1, 0}, -0.5, 10, 1), ConfigError);
    CHECK_THROWS_AS(WienerPath::generate({1, 0}, 0.1, -1, 1), ConfigError);
    CHECK_THROWS_AS(WienerPath::generate({1, 0}, 0.1, 10, -1), ConfigError);
    CHECK_NOTHROW(WienerPath::generate({1, 0}, 0.1, 0, 0));
}
