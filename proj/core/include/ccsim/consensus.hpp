#pragma once

#include <optional>
#include <vector>

#include "ccsim/types.hpp"

namespace ccsim {

// Parameters governing sampling and stability. B is the decimal digit count
// of A; the example table in the protocol description is authoritative over
// the ceil(lg A)+1 formula, which disagrees with it off powers of ten.
struct ConsensusParams {
    uint64_t serious_accounts = 1;  // A
    uint32_t digits = 1;            // B
    uint32_t sample_size = 1;       // M = B*B
    uint32_t stability_rounds = 1;  // N = B*B
    // Stake-majority threshold as a fraction of total supply; a package is
    // accepted only when endorsing stake STRICTLY exceeds it.
    Amount threshold_num = 51;
    Amount threshold_den = 100;

    Amount threshold_of(Amount total_supply) const {
        return mul_div(total_supply, threshold_num, threshold_den);
    }
    bool above_threshold(Amount stake, Amount total_supply) const {
        return stake > threshold_of(total_supply);
    }
};

// Throws std::invalid_argument if serious_accounts == 0.
ConsensusParams derive_params(uint64_t serious_accounts);

struct HashSample {
    Digest view_hash;
    SeqNo view_sn = 0;
    Amount weight = 0;
};

struct Winner {
    Digest hash;
    SeqNo sn = 0;        // max sn observed for the winning hash
    Amount weight = 0;   // total weight behind it
};

// Hash with maximal total weight; ties broken by lexicographically smallest
// digest bytes. Empty input yields nullopt.
std::optional<Winner> weighted_winner(const std::vector<HashSample>& samples);

struct StabilityResult {
    uint32_t counter = 0;
    bool promoted = false;
};

// One step of the no-change counter. Equal winners extend the streak;
// a different winner restarts it at 1. counter == 0 means nothing tracked
// yet. promoted is true when the streak reaches stability_rounds, at which
// point the current balance view becomes the new baseview.
StabilityResult stability_step(uint32_t counter, const Digest& previous_winner,
                               const Digest& new_winner, uint32_t stability_rounds);

// A winner may only replace local state if it is ahead of the stable
// baseview.
inline bool accept_winner(SeqNo current_baseview_sn, SeqNo winner_sn) {
    return winner_sn > current_baseview_sn;
}

}  // namespace ccsim
