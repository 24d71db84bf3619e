#pragma once

// Shared builders for the test suite: funded balance views, keyed actors,
// and packages with endorsement chains, all on the deterministic test
// signature scheme.

#include <initializer_list>
#include <utility>
#include <vector>

#include "ccsim/ledger.hpp"
#include "ccsim/types.hpp"

namespace ccsim::testing {

inline const SignatureScheme& scheme() { return test_scheme(); }

inline KeyPair key(uint64_t seed) { return scheme().keygen(seed); }

// Sealed view at sn 0 holding the given (key seed, balance) pairs plus an
// optional recycled balance. Records enter sorted by pubkey as required.
inline BalanceView make_view(std::initializer_list<std::pair<uint64_t, Amount>> holders,
                             Amount recycled_balance = 0) {
    BalanceView v;
    for (const auto& [seed, bal] : holders) {
        BalanceRecord r;
        r.pubkey = key(seed).pub;
        r.balance = bal;
        v.records.push_back(r);
    }
    std::sort(v.records.begin(), v.records.end(),
              [](const BalanceRecord& a, const BalanceRecord& b) { return a.pubkey < b.pubkey; });
    v.recycled.balance = recycled_balance;
    seal_view(v);
    return v;
}

inline Transaction tx_on(const BalanceView& v, uint64_t sender_seed, uint64_t receiver_seed,
                         Amount volume, Amount fee, Tick now = 1) {
    return make_transaction(scheme(), key(sender_seed), key(receiver_seed).pub, volume, fee, v.sn,
                            v.hash, now);
}

// Package by `agent_seed` on `v` carrying `txs`, endorsed by every seed in
// `vester_seeds` in order.
inline TxPackage package_on(const BalanceView& v, uint64_t agent_seed,
                            std::vector<Transaction> txs,
                            std::initializer_list<uint64_t> vester_seeds, Tick now = 2) {
    TxPackage p = make_package(scheme(), key(agent_seed), v.sn, v.hash, {}, std::move(txs), now);
    for (uint64_t s : vester_seeds) append_vester(scheme(), p, key(s), now);
    return p;
}

// The two signed headers of a double-package offense by `agent_seed` at the
// baseview of `v` (payloads differ by timestamp).
inline ViolationProofs double_package_proofs(const BalanceView& v, uint64_t agent_seed) {
    TxPackage a = make_package(scheme(), key(agent_seed), v.sn, v.hash, {}, {}, 10);
    TxPackage b = make_package(scheme(), key(agent_seed), v.sn, v.hash, {}, {}, 11);
    return std::make_pair(PackageProof{a.header(), a.agent_signature},
                          PackageProof{b.header(), b.agent_signature});
}

}  // namespace ccsim::testing
