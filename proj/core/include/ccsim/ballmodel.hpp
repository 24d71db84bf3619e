#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ccsim/rng.hpp"

namespace ccsim {

// Two-color urn whose sampled majority converts one ball of the minority
// color per step. Total ball count is invariant; the monochrome states are
// absorbing.
struct UrnState {
    uint32_t red = 0;
    uint32_t black = 0;
    uint32_t sample_size = 5;

    bool operator==(const UrnState&) const = default;

    uint32_t total() const { return red + black; }
    bool absorbed() const { return red == 0 || black == 0; }
};

struct TooFewBalls : std::invalid_argument {
    TooFewBalls() : std::invalid_argument("urn holds fewer balls than the sample size") {}
};

// Hypergeometric draw: number of red balls in a sample_size draw without
// replacement. Consumes exactly sample_size RNG values.
uint32_t draw_red_in_sample(const UrnState& s, Rng& rng);

// Pure conversion rule: strict red majority in the sample turns one black
// ball red, strict black majority one red ball black, a tie converts
// nothing. A missing minority ball (urn already monochrome) converts
// nothing.
UrnState apply_sample(UrnState s, uint32_t red_in_sample);

// One sampling + conversion step. Throws TooFewBalls below sample_size.
UrnState urn_step(UrnState s, Rng& rng);

struct AbsorptionResult {
    bool absorbed = false;
    uint64_t steps = 0;  // meaningful only when absorbed
    UrnState final_state;
};

// Iterates urn_step until monochrome or max_steps. An initially monochrome
// urn absorbs in 0 steps.
AbsorptionResult run_to_absorption(UrnState s, uint64_t max_steps, Rng& rng);
AbsorptionResult run_to_absorption(UrnState s, uint64_t max_steps, uint64_t seed);

// Posterior probability that red holds the strict majority given an
// observed run of streak_length consecutive all-red samples, computed
// exactly under a uniform prior on the red count over {0..total_balls}.
// The urn composition is held fixed while observing (balls are returned).
// streak_length 0 conditions on nothing and returns the prior.
double streak_posterior_exact(uint32_t total_balls, uint32_t sample_size, uint32_t streak_length);

struct StreakDemoResult {
    uint64_t urns_tried = 0;
    uint64_t urns_with_streak = 0;
    uint64_t majority_red_with_streak = 0;

    // Empirical frequency of majority-red among streak-producing urns;
    // 0 when no urn produced the streak.
    double frequency() const {
        return urns_with_streak == 0
                   ? 0.0
                   : static_cast<double>(majority_red_with_streak) / urns_with_streak;
    }
};

// Monte Carlo companion of streak_posterior_exact: draws n_urns red counts
// from the uniform prior, tests each for an all-red streak, and tallies the
// majority-red fraction among the passing urns.
StreakDemoResult streak_posterior_demo(uint32_t total_balls, uint32_t sample_size,
                                       uint32_t streak_length, uint64_t n_urns, Rng& rng);

struct CurvePoint {
    uint64_t steps = 0;
    double fraction_absorbed = 0.0;
};

// Empirical P(absorbed by n) over the grid (ascending step counts). Each
// trial owns its own derived RNG stream, so the curve is independent of
// trial execution order. Monotone by construction.
std::vector<CurvePoint> absorption_curve(UrnState initial, const std::vector<uint64_t>& grid,
                                         uint32_t trials, uint64_t seed);

}  // namespace ccsim
