#include "ccsim/security.hpp"

#include <stdexcept>

#include "ccsim/rng.hpp"

namespace ccsim {

Tilp Tilp::explicit_set(std::set<std::string> locations) {
    Tilp t;
    t.use_set_ = true;
    t.locations_ = std::move(locations);
    return t;
}

Tilp Tilp::random_subset(uint64_t seed, double ratio) {
    Tilp t;
    t.use_set_ = false;
    t.seed_ = seed;
    t.ratio_ = ratio;
    return t;
}

Tilp Tilp::random_k(uint64_t seed, uint32_t k, const std::vector<std::string>& universe) {
    Rng rng(seed, "tilp-random-k");
    std::set<std::string> chosen;
    for (size_t idx : rng.sample_indices(universe.size(), k)) chosen.insert(universe[idx]);
    return explicit_set(std::move(chosen));
}

bool Tilp::matches(const std::string& ip_label) const {
    if (use_set_) return locations_.contains(ip_label);
    // Label-keyed derived stream: the same (seed, label) always lands on the
    // same side of the ratio.
    return Rng(seed_, ip_label).unit() < ratio_;
}

std::variant<Digest, SybilAlert> tilp_bootstrap(const std::vector<PeerDescriptor>& peers,
                                                const Tilp& pattern) {
    std::vector<HashSample> samples;
    bool any_match = false;
    for (const auto& p : peers) {
        if (!p.reachable) continue;
        Amount w = pattern.matches(p.ip_label) ? 1 : 0;
        any_match = any_match || w > 0;
        samples.push_back({p.view_hash, p.view_sn, w});
    }
    if (!any_match) return SybilAlert{};
    return weighted_winner(samples)->hash;
}

std::variant<Digest, MutualMismatch> mutual_confirm(const std::vector<Digest>& views) {
    if (views.size() < 2) throw std::invalid_argument("mutual_confirm needs at least two sources");
    std::map<Digest, size_t> counts;
    for (const auto& d : views) ++counts[d];
    const Digest* reference = nullptr;
    size_t best = 0;
    for (const auto& [d, c] : counts) {  // map order breaks ties toward smallest digest
        if (c > best) {
            best = c;
            reference = &d;
        }
    }
    MutualMismatch mm;
    mm.reference = *reference;
    for (size_t i = 0; i < views.size(); ++i) {
        if (views[i] != *reference) mm.dissenters.push_back(i);
    }
    if (mm.dissenters.empty()) return *reference;
    return mm;
}

void sss_deposit(SeedStore& holder_store, const AccountId& owner, NodeId holder,
                 Amount holder_balance) {
    holder_store[owner] = SecuritySeed{owner, holder, holder_balance};
}

std::variant<Digest, InsufficientSeeds> sss_recover(const std::vector<SeedResponse>& responses,
                                                    Amount weight_floor) {
    Amount total = 0;
    for (const auto& r : responses) total = checked_add(total, r.weight);
    if (responses.empty() || total < weight_floor)
        return InsufficientSeeds{total, weight_floor};
    std::vector<HashSample> samples;
    samples.reserve(responses.size());
    for (const auto& r : responses) samples.push_back({r.view_hash, r.view_sn, r.weight});
    return weighted_winner(samples)->hash;
}

std::optional<AnchorSet> short_term_anchor(const BalanceView& clean_view, uint32_t k,
                                           Amount min_balance, uint64_t seed) {
    std::vector<const BalanceRecord*> qualified;
    for (const auto& r : clean_view.records) {
        if (r.balance > 0 && r.balance >= min_balance) qualified.push_back(&r);
    }
    if (qualified.size() < k) return std::nullopt;
    Rng rng(seed, "anchor");
    AnchorSet out;
    for (size_t idx : rng.sample_indices(qualified.size(), k))
        out.anchors.emplace_back(qualified[idx]->pubkey, qualified[idx]->balance);
    return out;
}

std::vector<HashSample> anchor_weighted_samples(const AnchorSet& anchors,
                                                const std::vector<AdvertisedView>& advertised) {
    std::map<AccountId, Amount> weight;
    for (const auto& [id, w] : anchors.anchors) weight[id] = w;
    std::vector<HashSample> samples;
    samples.reserve(advertised.size());
    for (const auto& a : advertised) {
        auto it = weight.find(a.account);
        samples.push_back({a.view_hash, a.view_sn, it == weight.end() ? 0 : it->second});
    }
    return samples;
}

}  // namespace ccsim
