#include <deque>

#include "ccsim/consensus.hpp"
#include "ccsim/rng.hpp"
#include "doctest.h"

using namespace ccsim;

namespace {

Digest d_of(uint8_t fill) {
    Digest d;
    d.bytes.fill(fill);
    return d;
}

}  // namespace

TEST_CASE("sampling parameters follow the digit-count bands") {
    // (A, B) rows of the reference band table; M = N = B^2.
    const std::pair<uint64_t, uint32_t> rows[] = {
        {100, 3},        {1'000, 4},      {10'000, 5},        {100'000, 6},
        {1'000'000, 7},  {10'000'000, 8}, {100'000'000, 9},   {1'000'000'000, 10},
    };
    for (const auto& [a, b] : rows) {
        ConsensusParams p = derive_params(a);
        CHECK(p.serious_accounts == a);
        CHECK(p.digits == b);
        CHECK(p.sample_size == b * b);
        CHECK(p.stability_rounds == b * b);
        // Band upper bound (all nines) keeps the same digit count.
        ConsensusParams top = derive_params(a * 10 - 1);
        CHECK(top.digits == b);
        CHECK(top.sample_size == b * b);
    }
    CHECK(derive_params(1).digits == 1);
    CHECK(derive_params(9).digits == 1);
    CHECK(derive_params(10).digits == 2);
    CHECK_THROWS_AS(derive_params(0), std::invalid_argument);
}

TEST_CASE("acceptance threshold is strict") {
    ConsensusParams p = derive_params(100);
    CHECK(p.threshold_of(1000) == 510);
    CHECK_FALSE(p.above_threshold(510, 1000));  // exactly 51% is not enough
    CHECK(p.above_threshold(511, 1000));
    // Odd total: floor(1001 * 51 / 100) = 510.
    CHECK(p.threshold_of(1001) == 510);
}

TEST_CASE("weighted winner aggregates weight per hash") {
    CHECK_FALSE(weighted_winner({}).has_value());

    std::vector<HashSample> samples{
        {d_of(2), 4, 100},
        {d_of(1), 7, 60},
        {d_of(2), 5, 80},  // same hash, later sn
    };
    auto w = weighted_winner(samples);
    REQUIRE(w.has_value());
    CHECK(w->hash == d_of(2));
    CHECK(w->weight == 180);
    CHECK(w->sn == 5);  // max sn seen for the winning hash
}

TEST_CASE("weighted winner breaks ties toward the smaller digest") {
    std::vector<HashSample> samples{
        {d_of(9), 1, 50},
        {d_of(3), 1, 50},
        {d_of(7), 1, 10},
    };
    auto w = weighted_winner(samples);
    REQUIRE(w.has_value());
    CHECK(w->hash == d_of(3));

    // All-zero weights still produce a winner (the smallest digest).
    auto z = weighted_winner({{d_of(8), 2, 0}, {d_of(4), 3, 0}});
    REQUIRE(z.has_value());
    CHECK(z->hash == d_of(4));
    CHECK(z->weight == 0);
}

TEST_CASE("stability counter promotes after a full streak") {
    const uint32_t n = 4;
    uint32_t counter = 0;
    Digest last;  // zero digest: nothing tracked yet
    Digest a = d_of(1);

    for (uint32_t i = 1; i <= n; ++i) {
        StabilityResult st = stability_step(counter, last, a, n);
        counter = st.counter;
        last = a;
        CHECK(counter == i);
        CHECK(st.promoted == (i == n));
    }
}

TEST_CASE("a different winner restarts the streak") {
    const uint32_t n = 3;
    StabilityResult st = stability_step(2, d_of(1), d_of(2), n);
    CHECK(st.counter == 1);
    CHECK_FALSE(st.promoted);
    // Restart can itself promote when N == 1.
    CHECK(stability_step(5, d_of(1), d_of(2), 1).promoted);
}

// Property: walking a random winner sequence with stability_step fires a
// promotion exactly when the trailing run length (since the last promotion)
// reaches N, matching a brute-force fold.
TEST_CASE("stability step agrees with a brute-force streak fold") {
    Rng rng(1234);
    for (int trial = 0; trial < 200; ++trial) {
        uint32_t n = 1 + static_cast<uint32_t>(rng.below(5));
        uint32_t counter = 0;
        Digest last;
        uint32_t brute_run = 0;
        Digest brute_last;
        bool brute_have = false;

        for (int step = 0; step < 40; ++step) {
            Digest w = d_of(static_cast<uint8_t>(1 + rng.below(3)));
            StabilityResult st = stability_step(counter, last, w, n);
            counter = st.counter;
            last = w;

            if (!brute_have || w != brute_last) brute_run = 1;
            else ++brute_run;
            brute_last = w;
            brute_have = true;

            CHECK(st.promoted == (brute_run >= n));
            if (st.promoted) {
                // Mirror the caller, which resets tracking after promoting.
                counter = 0;
                last = Digest{};
                brute_run = 0;
                brute_have = false;
            }
        }
    }
}

TEST_CASE("winners only replace state when ahead of the baseview") {
    CHECK(accept_winner(0, 1));
    CHECK(accept_winner(5, 6));
    CHECK_FALSE(accept_winner(5, 5));
    CHECK_FALSE(accept_winner(5, 4));  // sn comparison only, by design
}
