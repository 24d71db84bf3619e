#include "ccsim/ballmodel.hpp"

#include <algorithm>
#include <cmath>

namespace ccsim {

uint32_t draw_red_in_sample(const UrnState& s, Rng& rng) {
    if (s.total() < s.sample_size) throw TooFewBalls();
    uint32_t red_left = s.red;
    uint32_t black_left = s.black;
    uint32_t red_drawn = 0;
    for (uint32_t i = 0; i < s.sample_size; ++i) {
        uint64_t u = rng.below(red_left + black_left);
        if (u < red_left) {
            --red_left;
            ++red_drawn;
        } else {
            --black_left;
        }
    }
    return red_drawn;
}

UrnState apply_sample(UrnState s, uint32_t red_in_sample) {
    uint32_t black_in_sample = s.sample_size - red_in_sample;
    if (red_in_sample > black_in_sample && s.black > 0) {
        --s.black;
        ++s.red;
    } else if (black_in_sample > red_in_sample && s.red > 0) {
        --s.red;
        ++s.black;
    }
    return s;
}

UrnState urn_step(UrnState s, Rng& rng) { return apply_sample(s, draw_red_in_sample(s, rng)); }

AbsorptionResult run_to_absorption(UrnState s, uint64_t max_steps, Rng& rng) {
    AbsorptionResult r;
    if (s.absorbed()) {
        r.absorbed = true;
        r.steps = 0;
        r.final_state = s;
        return r;
    }
    for (uint64_t n = 1; n <= max_steps; ++n) {
        s = urn_step(s, rng);
        if (s.absorbed()) {
            r.absorbed = true;
            r.steps = n;
            r.final_state = s;
            return r;
        }
    }
    r.final_state = s;
    return r;
}

AbsorptionResult run_to_absorption(UrnState s, uint64_t max_steps, uint64_t seed) {
    Rng rng(seed, "urn");
    return run_to_absorption(s, max_steps, rng);
}

namespace {

// P(one sample is all red | r red of total), as a long double in [0,1].
long double all_red_sample_prob(uint32_t r, uint32_t total, uint32_t k) {
    if (r < k) return 0.0L;
    long double p = 1.0L;
    for (uint32_t i = 0; i < k; ++i)
        p *= static_cast<long double>(r - i) / static_cast<long double>(total - i);
    return p;
}

}  // namespace

double streak_posterior_exact(uint32_t total_balls, uint32_t sample_size, uint32_t streak_length) {
    long double numer = 0.0L;
    long double denom = 0.0L;
    for (uint32_t r = 0; r <= total_balls; ++r) {
        long double p = all_red_sample_prob(r, total_balls, sample_size);
        long double like = streak_length == 0 ? 1.0L : std::pow(p, (long double)streak_length);
        denom += like;
        if (2ULL * r > total_balls) numer += like;
    }
    return denom == 0.0L ? 0.0 : static_cast<double>(numer / denom);
}

StreakDemoResult streak_posterior_demo(uint32_t total_balls, uint32_t sample_size,
                                       uint32_t streak_length, uint64_t n_urns, Rng& rng) {
    StreakDemoResult out;
    for (uint64_t u = 0; u < n_urns; ++u) {
        uint32_t r = static_cast<uint32_t>(rng.below(total_balls + 1ULL));
        UrnState s{r, total_balls - r, sample_size};
        bool pass = true;
        for (uint32_t j = 0; j < streak_length && pass; ++j) {
            if (draw_red_in_sample(s, rng) != sample_size) pass = false;
        }
        ++out.urns_tried;
        if (pass) {
            ++out.urns_with_streak;
            if (2ULL * r > total_balls) ++out.majority_red_with_streak;
        }
    }
    return out;
}

std::vector<CurvePoint> absorption_curve(UrnState initial, const std::vector<uint64_t>& grid,
                                         uint32_t trials, uint64_t seed) {
    uint64_t horizon = grid.empty() ? 0 : grid.back();
    std::vector<uint64_t> absorbed_at;
    absorbed_at.reserve(trials);
    for (uint32_t t = 0; t < trials; ++t) {
        Rng rng(seed, "urn-curve", t);
        AbsorptionResult r = run_to_absorption(initial, horizon, rng);
        if (r.absorbed) absorbed_at.push_back(r.steps);
    }
    std::sort(absorbed_at.begin(), absorbed_at.end());
    std::vector<CurvePoint> curve;
    curve.reserve(grid.size());
    for (uint64_t n : grid) {
        auto it = std::upper_bound(absorbed_at.begin(), absorbed_at.end(), n);
        double frac = trials == 0 ? 0.0
                                  : static_cast<double>(it - absorbed_at.begin()) /
                                        static_cast<double>(trials);
        curve.push_back({n, frac});
    }
    return curve;
}

}  // namespace ccsim
