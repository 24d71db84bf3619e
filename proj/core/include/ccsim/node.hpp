#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ccsim/consensus.hpp"
#include "ccsim/ledger.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/security.hpp"
#include "ccsim/types.hpp"

namespace ccsim {

// Thresholds an agent imposes before collecting and packaging.
struct AgentCriteria {
    Amount min_tx_fee = 0;
    Amount min_fee_per_package = 0;
    size_t max_package_bytes = 4 * 1024 * 1024;
};

// Thresholds a vester imposes before endorsing a package.
struct VesterCriteria {
    Amount min_fee_per_package = 0;
    Amount min_agent_balance = 0;
    Amount min_vester_balance = 0;
};

struct NodeConfig {
    AgentCriteria agent_criteria;
    VesterCriteria vester_criteria;
    double audit_ratio = 0.001;     // probability a seen package enters the audit buffer
    size_t audit_cap = 256;         // oldest buffered packages evicted beyond this
    uint64_t blacklist_decay = 10;  // blacklist entries expire after this many promotions
};

Amount package_fees(const TxPackage& pkg);

struct UpdateOutcome {
    bool ran = false;  // false when nothing was sampled; all state frozen
    bool adopted = false;
    bool promoted = false;
    bool fetch_failed = false;
    Digest winner_hash;
};

// Maps a winning hash to the full view some peer serves, or nullptr when
// nobody reachable has it.
using ViewResolver = std::function<const BalanceView*(const Digest&)>;

// Evidence that a payment reached a receiver who later denies it: the
// receiver-signed baseview agreement plus the effecting finalized package
// and one successor package.
struct ReceptionEvidence {
    BaseviewAgreement agreement;
    std::vector<TxPackage> packages;
};

// One participant: agent and/or vester behavior, sampling updates, audit,
// blacklist, and archives. Fields are open for the simulator and tests;
// mutation goes through the member operations.
struct NodeState {
    NodeId id = 0;
    KeyPair identity;
    bool is_agent = false;
    bool is_vester = false;
    NodeConfig config;

    BalanceView baseview;
    BalanceView current_view;
    uint32_t stability_counter = 0;
    Digest last_winner;
    uint64_t promotions = 0;
    std::map<SeqNo, Digest> promoted_baseviews;  // every baseview this node ever held

    // Agent state.
    std::vector<Transaction> pending_txs;
    std::set<Digest> pending_tx_digests;
    std::vector<ViolationReport> pending_reports;
    std::set<OffenseKey> pending_offenses;
    std::set<SeqNo> packaged_sns;  // one package per baseview_sn, ever
    std::map<SeqNo, TxPackage> my_packages;

    // Vester state: baseview_sn -> header digest of the one package vested.
    std::map<SeqNo, Digest> vested_sns;

    // Acceptance state: one finalized package per baseview_sn. The package
    // itself is kept so that when a strictly stronger endorsement-chain
    // variant of it crosses the threshold later, the node can deterministically
    // re-finalize onto that variant instead of freezing on arrival order.
    std::set<SeqNo> accepted_51_sns;
    std::map<SeqNo, TxPackage> accepted_51_packages;

    // Packages waiting for endorsement, per sn then per agent-header digest;
    // only the item-richest version of each is kept.
    std::map<SeqNo, std::map<Digest, TxPackage>> candidate_packages;

    // Audit state.
    std::vector<TxPackage> audit_buffer;  // FIFO, bounded by config.audit_cap
    std::set<OffenseKey> reported_offenses;
    std::set<OffenseKey> penalized_offenses;

    // AccountId -> promotion count at insertion time.
    std::map<AccountId, uint64_t> blacklist;

    // Seeds other participants deposited with this node.
    SeedStore seed_store;

    std::vector<ReceptionEvidence> archive;

    // Metrics.
    uint64_t dropped_txs = 0;
    uint64_t fetch_failures = 0;

    // --- lifecycle -------------------------------------------------------

    void init_genesis(const BalanceView& genesis);

    bool is_blacklisted(const AccountId& who) const { return blacklist.contains(who); }

    // --- agent path ------------------------------------------------------

    // Admits a transaction into pending iff it matches this node's baseview,
    // passes the fee criterion, and validates. Mismatches are dropped and
    // counted.
    void agent_collect(const SignatureScheme& scheme, const Transaction& tx);

    // Queues a violation report for packaging, unless its offense was
    // already queued, reported, or penalized.
    void agent_note_report(const SignatureScheme& scheme, const ViolationReport& report);

    // Signs a package over pending reports plus pending transactions in
    // fee-descending order, truncated to the byte cap. At most one package
    // per baseview_sn, ever; repeat calls and unmet criteria yield nullopt.
    std::optional<TxPackage> agent_make_package(const SignatureScheme& scheme, Tick now);

    // --- vester path -----------------------------------------------------

    // Remembers a package for later endorsement; versions of one package
    // merge toward the most-endorsed one.
    void note_candidate(const TxPackage& pkg);

    // Most-endorsed candidate on this node's baseview, by vested stake,
    // ties to the smallest header digest. Blacklisted agents are skipped.
    const TxPackage* best_candidate() const;

    // Appends this node's endorsement if the package sits on its baseview,
    // passes criteria and verification, and no other package was vested at
    // this sn. Re-endorsing a chain version of the same package that lacks
    // this node's item is allowed; everything else yields nullopt.
    std::optional<TxPackage> vester_vest(const SignatureScheme& scheme, const TxPackage& pkg,
                                         Tick now);

    // --- acceptance ------------------------------------------------------

    // If the package rests on this node's baseview and its endorsement stake
    // strictly exceeds the threshold: flags it, applies it, adopts the
    // successor as current_view, and returns the finalized package for
    // broadcast. When some chain variant of this sn was already accepted, a
    // newcomer only displaces it if it is strictly stronger under the global
    // order (more endorsement stake; equal stake settles on the smaller
    // package digest), so every node that sees the same variants finalizes
    // the same one regardless of arrival order.
    std::optional<TxPackage> check_and_finalize(const SignatureScheme& scheme, TxPackage pkg,
                                                Amount total_supply, const ConsensusParams& params,
                                                Tick now);

    // --- updating (rules 6-8) -------------------------------------------

    // One sampling round: weighted winner, rule-8 gated adoption via the
    // resolver, stability bookkeeping, and possibly baseview promotion
    // with the attendant pruning and blacklist decay.
    UpdateOutcome update_step(const std::vector<HashSample>& samples,
                              const ConsensusParams& params, const ViewResolver& resolve);

    // --- audit and blacklist --------------------------------------------

    // Rolls the buffering dice on pkg and scans it against the buffer (and
    // itself) for exclusivity breaches; returns at most one fresh signed
    // report per call.
    std::optional<ViolationReport> audit_package(const SignatureScheme& scheme,
                                                 const TxPackage& pkg, Rng& rng, Tick now);

    // Blacklists the actor if it acted on a view conflicting with a
    // baseview this node holds or held at the same sn.
    void blacklist_check(const AccountId& actor, SeqNo acted_sn, const Digest& acted_hash);

    // --- deny-reception protection (agreement + archive) ----------------

    // As receiver: countersign the payer's baseview if it matches ours;
    // nullopt refuses the signature.
    std::optional<BaseviewAgreement> sign_agreement(const SignatureScheme& scheme, SeqNo sn,
                                                    const Digest& hash, const AccountId& sender);

    void archive_proof(const BaseviewAgreement& agreement, const TxPackage& effecting,
                       const TxPackage& successor);

private:
    void promote();
};

bool verify_agreement(const SignatureScheme& scheme, const BaseviewAgreement& a);

// Non-repudiation check: the agreement verifies against the agreed base
// view, the archived packages replay over it, and the receiver's balance
// grows by at least min_credit in the first replay step.
bool verify_reception_evidence(const SignatureScheme& scheme, const BalanceView& agreed_base,
                               const ReceptionEvidence& evidence, const AccountId& receiver,
                               Amount min_credit, const ConsensusParams& params,
                               Amount total_supply);

}  // namespace ccsim
