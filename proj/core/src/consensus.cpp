#include "ccsim/consensus.hpp"

#include <map>
#include <stdexcept>

namespace ccsim {

ConsensusParams derive_params(uint64_t serious_accounts) {
    if (serious_accounts == 0) throw std::invalid_argument("derive_params: A must be >= 1");
    uint32_t digits = 0;
    for (uint64_t a = serious_accounts; a > 0; a /= 10) ++digits;
    ConsensusParams p;
    p.serious_accounts = serious_accounts;
    p.digits = digits;
    p.sample_size = digits * digits;
    p.stability_rounds = digits * digits;
    return p;
}

std::optional<Winner> weighted_winner(const std::vector<HashSample>& samples) {
    if (samples.empty()) return std::nullopt;
    // std::map keys sort by digest bytes, so iterating gives the documented
    // tie-break for free.
    std::map<Digest, Winner> tally;
    for (const auto& s : samples) {
        auto& entry = tally[s.view_hash];
        entry.hash = s.view_hash;
        entry.weight = checked_add(entry.weight, s.weight);
        entry.sn = std::max(entry.sn, s.view_sn);
    }
    const Winner* best = nullptr;
    for (const auto& [hash, w] : tally) {
        if (best == nullptr || w.weight > best->weight) best = &w;
    }
    return *best;
}

StabilityResult stability_step(uint32_t counter, const Digest& previous_winner,
                               const Digest& new_winner, uint32_t stability_rounds) {
    StabilityResult r;
    if (counter == 0 || previous_winner != new_winner) {
        r.counter = 1;
    } else {
        r.counter = counter + 1;
    }
    r.promoted = (r.counter >= stability_rounds);
    return r;
}

}  // namespace ccsim
