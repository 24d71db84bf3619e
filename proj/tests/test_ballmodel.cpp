#include "ccsim/ballmodel.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

#include "doctest.h"

using namespace ccsim;

TEST_CASE("sample majorities convert exactly one minority ball") {
    UrnState s{40, 60, 5};
    CHECK(apply_sample(s, 5) == UrnState{41, 59, 5});
    CHECK(apply_sample(s, 4) == UrnState{41, 59, 5});
    CHECK(apply_sample(s, 3) == UrnState{41, 59, 5});
    CHECK(apply_sample(s, 2) == UrnState{39, 61, 5});
    CHECK(apply_sample(s, 1) == UrnState{39, 61, 5});
    CHECK(apply_sample(s, 0) == UrnState{39, 61, 5});

    UrnState even{40, 60, 4};
    CHECK(apply_sample(even, 2) == even);  // tie converts nothing

    // Monochrome urns are fixed points regardless of the sample.
    UrnState all_red{100, 0, 5};
    CHECK(apply_sample(all_red, 5) == all_red);
    UrnState all_black{0, 100, 5};
    CHECK(apply_sample(all_black, 0) == all_black);
}

TEST_CASE("sample draws respect hypergeometric support") {
    Rng rng(11, "draw");
    UrnState s{3, 4, 5};  // sample exceeds each single color
    for (int i = 0; i < 200; ++i) {
        uint32_t r = draw_red_in_sample(s, rng);
        CHECK(r <= 3);       // cannot draw more reds than exist
        CHECK(5 - r <= 4);   // nor more blacks
    }
    UrnState solid{10, 0, 5};
    CHECK(draw_red_in_sample(solid, rng) == 5);

    UrnState tiny{2, 2, 5};
    CHECK_THROWS_AS(draw_red_in_sample(tiny, rng), TooFewBalls);
    CHECK_THROWS_AS(urn_step(tiny, rng), TooFewBalls);
}

TEST_CASE("one step moves at most one ball and keeps the total") {
    Rng rng(12, "step");
    UrnState s{30, 70, 5};
    for (int i = 0; i < 500 && !s.absorbed(); ++i) {
        UrnState next = urn_step(s, rng);
        CHECK(next.total() == s.total());
        uint32_t d = next.red > s.red ? next.red - s.red : s.red - next.red;
        CHECK(d <= 1);
        s = next;
    }
}

TEST_CASE("absorption runs terminate and are seed-reproducible") {
    UrnState mono{77, 0, 5};
    AbsorptionResult r0 = run_to_absorption(mono, 100, /*seed=*/1);
    CHECK(r0.absorbed);
    CHECK(r0.steps == 0);
    CHECK(r0.final_state == mono);

    UrnState mixed{100, 100, 5};
    AbsorptionResult stuck = run_to_absorption(mixed, 0, /*seed=*/1);
    CHECK_FALSE(stuck.absorbed);
    CHECK(stuck.final_state == mixed);

    AbsorptionResult a = run_to_absorption(mixed, 5000, /*seed=*/42);
    AbsorptionResult b = run_to_absorption(mixed, 5000, /*seed=*/42);
    CHECK(a.absorbed);
    CHECK(a.steps == b.steps);
    CHECK(a.final_state == b.final_state);
    CHECK(a.final_state.absorbed());
}

TEST_CASE("symmetric urn: absorption time and color statistics") {
    const uint32_t trials = 2000;
    uint64_t total_steps = 0;
    uint64_t max_steps = 0;
    uint32_t red_wins = 0;
    for (uint32_t t = 0; t < trials; ++t) {
        AbsorptionResult r = run_to_absorption({100, 100, 5}, 5000, /*seed=*/9000 + t);
        REQUIRE(r.absorbed);
        total_steps += r.steps;
        max_steps = std::max(max_steps, r.steps);
        if (r.final_state.red > 0) ++red_wins;
    }
    double mean = static_cast<double>(total_steps) / trials;
    // Reference runs put the mean near 211 with observed maxima under 700.
    CHECK(mean > 180.0);
    CHECK(mean < 250.0);
    CHECK(max_steps < 1500);
    double red_frac = static_cast<double>(red_wins) / trials;
    CHECK(red_frac > 0.46);
    CHECK(red_frac < 0.54);
}

TEST_CASE("streak posterior: exact small cases") {
    // Two balls, single-ball samples, one all-red observation:
    // majority requires both balls red, posterior 2/3 by direct enumeration.
    CHECK(streak_posterior_exact(2, 1, 1) == doctest::Approx(2.0 / 3.0));
    // A full two-ball red sample is only possible when both are red.
    CHECK(streak_posterior_exact(2, 2, 1) == doctest::Approx(1.0));
    // Zero-length streaks condition on nothing: the uniform prior remains.
    CHECK(streak_posterior_exact(2, 1, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(streak_posterior_exact(100, 5, 0) == doctest::Approx(50.0 / 101.0));
    // Impossible evidence (sample larger than the urn) yields 0.
    CHECK(streak_posterior_exact(3, 5, 1) == 0.0);
}

TEST_CASE("streak posterior rises with streak length toward certainty") {
    double prev = 0.0;
    for (uint32_t streak : {0u, 1u, 2u, 5u, 10u, 20u}) {
        double p = streak_posterior_exact(100, 5, streak);
        CHECK(p >= prev);
        prev = p;
    }
    CHECK(streak_posterior_exact(100, 5, 20) > 0.999);
}

TEST_CASE("monte-carlo streak demo tracks the exact posterior") {
    Rng rng(77, "demo");
    StreakDemoResult d = streak_posterior_demo(20, 3, 2, 20000, rng);
    CHECK(d.urns_tried == 20000);
    CHECK(d.urns_with_streak <= d.urns_tried);
    CHECK(d.majority_red_with_streak <= d.urns_with_streak);
    CHECK(d.urns_with_streak > 0);
    double exact = streak_posterior_exact(20, 3, 2);
    CHECK(d.frequency() == doctest::Approx(exact).epsilon(0.08));

    Rng rng2(77, "demo");
    CHECK(streak_posterior_demo(20, 3, 2, 0, rng2).frequency() == 0.0);
}

TEST_CASE("absorption curve is monotone and saturates") {
    std::vector<uint64_t> grid{0, 50, 100, 200, 400, 800, 1600, 5000};
    auto curve = absorption_curve({100, 100, 5}, grid, 300, /*seed=*/5);
    REQUIRE(curve.size() == grid.size());
    double prev = -1.0;
    for (size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].steps == grid[i]);
        CHECK(curve[i].fraction_absorbed >= prev);
        CHECK(curve[i].fraction_absorbed >= 0.0);
        CHECK(curve[i].fraction_absorbed <= 1.0);
        prev = curve[i].fraction_absorbed;
    }
    CHECK(curve.front().fraction_absorbed == 0.0);  // a mixed urn needs >=1 step
    CHECK(curve.back().fraction_absorbed == 1.0);

    auto again = absorption_curve({100, 100, 5}, grid, 300, /*seed=*/5);
    for (size_t i = 0; i < curve.size(); ++i)
        CHECK(curve[i].fraction_absorbed == again[i].fraction_absorbed);

    CHECK(absorption_curve({100, 100, 5}, {}, 300, 5).empty());
    // An already monochrome start is absorbed at every grid point.
    auto done = absorption_curve({50, 0, 5}, {0, 10}, 50, 5);
    CHECK(done[0].fraction_absorbed == 1.0);
    CHECK(done[1].fraction_absorbed == 1.0);
}
