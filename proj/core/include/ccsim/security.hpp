#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ccsim/consensus.hpp"
#include "ccsim/types.hpp"

namespace ccsim {

using NodeId = uint32_t;

// A peer as seen during bootstrap: simulation id, opaque location label,
// reachability, and the view it advertises.
struct PeerDescriptor {
    NodeId node = 0;
    std::string ip_label;
    bool reachable = true;
    Digest view_hash;
    SeqNo view_sn = 0;
};

// Trusted-location pattern: a private deterministic predicate over peer
// location labels. Matching peers get sampling weight 1, everything else 0.
class Tilp {
public:
    static Tilp explicit_set(std::set<std::string> locations);
    // Pseudo-random fixed subset of all possible labels: a label matches iff
    // its seeded hash falls below ratio. Stateless, so the pattern needs no
    // label universe up front.
    static Tilp random_subset(uint64_t seed, double ratio);
    // k distinct locations drawn from a known label universe.
    static Tilp random_k(uint64_t seed, uint32_t k, const std::vector<std::string>& universe);

    bool matches(const std::string& ip_label) const;

private:
    Tilp() = default;

    bool use_set_ = true;
    std::set<std::string> locations_;
    uint64_t seed_ = 0;
    double ratio_ = 0.0;
};

// Raised-flag value: every reachable peer failed the caller's location
// pattern, the signature of an eclipse by location-blind fakes.
struct SybilAlert {
    bool operator==(const SybilAlert&) const = default;
};

// Winner hash over reachable peers, weighting pattern matches 1 and
// everything else 0. SybilAlert when no reachable peer matches.
std::variant<Digest, SybilAlert> tilp_bootstrap(const std::vector<PeerDescriptor>& peers,
                                                const Tilp& pattern);

struct MutualMismatch {
    Digest reference;                // most common digest, ties to smallest bytes
    std::vector<size_t> dissenters;  // indices disagreeing with the reference

    bool operator==(const MutualMismatch&) const = default;
};

// Cross-checks independently obtained view digests: the confirmed digest if
// all agree, otherwise the dissenting sources. Throws std::invalid_argument
// on fewer than two sources.
std::variant<Digest, MutualMismatch> mutual_confirm(const std::vector<Digest>& views);

// A recovery token deposited with a peer. The weight is the holder's
// balance at deposit time; only the owner can read it back, which the
// simulator models as an access rule rather than layered encryption.
struct SecuritySeed {
    AccountId owner;
    NodeId holder = 0;
    Amount weight = 0;

    bool operator==(const SecuritySeed&) const = default;
};

// Holder-side store, keyed by depositor.
using SeedStore = std::map<AccountId, SecuritySeed>;

// Records or refreshes the seed `owner` leaves with the holding node.
void sss_deposit(SeedStore& holder_store, const AccountId& owner, NodeId holder,
                 Amount holder_balance);

// One holder's answer to a recovery query: deposited weight plus the view
// it currently advertises.
struct SeedResponse {
    Amount weight = 0;
    Digest view_hash;
    SeqNo view_sn = 0;
};

struct InsufficientSeeds {
    Amount responding_weight = 0;
    Amount floor = 0;

    bool operator==(const InsufficientSeeds&) const = default;
};

inline Amount default_seed_floor(Amount total_supply) { return total_supply / 100; }

// Weighted winner over seed responses; holders without real deposited
// balance weigh zero, so a flood of them cannot move the result. Errors
// when total responding weight falls below the floor.
std::variant<Digest, InsufficientSeeds> sss_recover(const std::vector<SeedResponse>& responses,
                                                    Amount weight_floor);

// Accounts picked from a clean view to serve as short-lived trusted hash
// sources, each weighted by its balance at selection.
struct AnchorSet {
    std::vector<std::pair<AccountId, Amount>> anchors;
};

// Seeded selection of k accounts holding at least min_balance (and more
// than zero). nullopt when fewer than k qualify.
std::optional<AnchorSet> short_term_anchor(const BalanceView& clean_view, uint32_t k,
                                           Amount min_balance, uint64_t seed);

struct AdvertisedView {
    AccountId account;
    Digest view_hash;
    SeqNo view_sn = 0;
};

// Turns advertised views into samples for weighted_winner: anchor accounts
// carry their anchor weight, all other advertisers zero.
std::vector<HashSample> anchor_weighted_samples(const AnchorSet& anchors,
                                                const std::vector<AdvertisedView>& advertised);

}  // namespace ccsim
