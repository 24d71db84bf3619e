#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "ccsim/node.hpp"
#include "ccsim/rng.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim {

// ---------------------------------------------------------------------------
// Network simulation over discrete ticks

struct TickMetrics {
    Tick tick = 0;
    uint32_t distinct_hashes = 0;  // distinct current-view hashes among honest nodes
    uint64_t messages = 0;         // deliveries scheduled this tick
    uint64_t bytes = 0;            // serialized payload bytes of those deliveries
    uint32_t reports = 0;          // violation reports created this tick
    uint32_t finalizations = 0;    // packages accepted at 51% this tick
    uint32_t promotions = 0;       // baseview promotions this tick
};

struct MetricsReport {
    std::string scenario_name;
    uint64_t seed = 0;
    uint32_t nodes = 0;
    Tick run_ticks = 0;
    std::vector<TickMetrics> per_tick;

    bool converged = false;           // one honest hash at the final tick
    Tick first_consensus_tick = 0;    // first tick with one honest hash
    Tick settled_tick = 0;            // earliest tick from which it stays one
    uint64_t total_messages = 0;
    uint64_t total_bytes = 0;
    uint64_t total_reports = 0;
    uint64_t total_finalizations = 0;
    uint64_t total_promotions = 0;
    uint64_t fetch_failures = 0;
    uint64_t dropped_txs = 0;
    uint64_t injected_txs = 0;
    uint64_t penalized_offenses = 0;  // distinct offense keys applied anywhere
    std::vector<size_t> blacklist_sizes;  // final, per node

    // Empty iff every safety invariant held for the whole run.
    std::vector<std::string> invariant_violations;

    std::string csv() const;           // per-tick table, stable layout
    std::string json_summary() const;  // totals, stable key order
};

// What travels between nodes.
using Message = std::variant<Transaction, TxPackage, ViolationReport>;

// Deterministic discrete-tick run of a scenario: genesis construction, the
// package/vest/finalize cycle, sampling updates, partitions, loss, latency,
// adversaries, and a cross-node safety checker that records as invariant
// violations any pair of conflicting promoted views at one sn and any pair
// of distinct finalized package headers at one base sn.
class Simulation {
public:
    explicit Simulation(Scenario sc);

    // Runs to completion and reports. Call once. The optional observer fires
    // after every completed tick with all node state settled, so callers can
    // trace per-tick quantities the summary metrics do not carry.
    MetricsReport run(const std::function<void(Tick)>& after_tick = {});

    const std::vector<NodeState>& node_states() const { return nodes_; }
    const BalanceView& genesis_view() const { return genesis_; }
    const ConsensusParams& consensus_params() const { return params_; }
    const KeyPair& node_key(NodeId id) const { return keys_[id]; }

private:
    struct Event {
        Tick at = 0;
        uint64_t seq = 0;  // global order of scheduling; ties resolve by it
        NodeId to = 0;
        Message msg;
    };
    struct EventAfter {
        bool operator()(const Event& a, const Event& b) const {
            return a.at != b.at ? a.at > b.at : a.seq > b.seq;
        }
    };
    struct SwarmPeer {
        AccountId pubkey;
        Digest advertised_hash;
        SeqNo advertised_sn = 0;
        std::string label;
    };

    void build_genesis();
    void build_nodes();
    bool tilp_admits(const std::string& label) const;
    bool link_open(NodeId a, NodeId b, Tick t) const;
    Rng& link_rng(NodeId from, NodeId to);
    void send(NodeId from, NodeId to, const Message& msg);
    void broadcast(NodeId from, const Message& msg);
    void deliver(NodeId to, Message msg);
    void traffic_step();
    void honest_update(NodeId id);
    void agent_step(NodeId id);
    void vester_step(NodeId id);
    void adversary_step(const AdversarySpec& adv, size_t adv_index);
    void after_finalize(NodeId id, const TxPackage& pkg);
    void after_promotion(NodeId id);
    void pin(SeqNo sn, const Digest& hash, NodeId node, const char* occasion);
    void pin_header(SeqNo base_sn, const Digest& header, NodeId node);
    bool is_honest(NodeId id) const;
    std::optional<AdversaryKind> active_adversary(NodeId id) const;
    uint32_t distinct_honest_hashes() const;

    Scenario sc_;
    const SignatureScheme& scheme_;
    std::vector<KeyPair> keys_;
    std::vector<std::string> labels_;
    std::vector<NodeState> nodes_;
    BalanceView genesis_;
    ConsensusParams params_;

    std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
    uint64_t next_seq_ = 0;
    Tick now_ = 0;

    std::map<std::pair<NodeId, NodeId>, Rng> link_rngs_;
    std::vector<Rng> update_rngs_;
    std::vector<Rng> audit_rngs_;
    Rng traffic_rng_;

    std::vector<std::set<SeqNo>> adversary_done_;  // one offense per sn per spec
    std::vector<std::vector<SwarmPeer>> swarms_;   // parallel to sc_.adversaries

    // Safety pins. Promoted views: once any honest node promotes a view at
    // some sn, every later promotion at that sn must carry the same hash.
    // Finalized headers: at most one signed package header may ever cross
    // the acceptance threshold per base sn. Endorsement-chain variants of
    // one package may finalize as differing views at the same sn before
    // sampling converges them, which is why finalization pins compare
    // headers, not view hashes.
    std::map<SeqNo, Digest> pinned_;
    std::map<SeqNo, Digest> pinned_headers_;
    std::vector<std::string> violations_;
    std::set<OffenseKey> penalized_union_;

    TickMetrics tick_metrics_;
    MetricsReport report_;
    bool ran_ = false;
};

// ---------------------------------------------------------------------------
// Pure absorbing-chain mode: views are opaque ids, no packages, no ledger.

struct MarkovScenario {
    uint32_t nodes = 20;
    uint32_t distinct_views = 2;
    uint32_t sample_size = 9;
    std::vector<Amount> weights;        // per node; empty = all 1
    std::vector<uint32_t> initial_views;  // per node, values < distinct_views
    uint64_t max_steps = 1'000'000;
};

struct MarkovResult {
    bool absorbed = false;
    uint64_t steps = 0;       // steps taken until one view remained
    uint32_t final_view = 0;  // meaningful when absorbed
};

MarkovResult run_markov_mode(const MarkovScenario& ms, uint64_t seed);

// Trajectory of the view multiset: entry s holds, for each view id, how
// many nodes held it before step s. Recording stops one entry after
// absorption or at n_steps, whichever comes first.
std::vector<std::vector<uint32_t>> markov_trajectory(const MarkovScenario& ms, uint64_t seed,
                                                     uint64_t n_steps);

// Absorption probability estimated at each grid step count over `trials`
// independent runs.
struct MarkovCurvePoint {
    uint64_t steps = 0;
    double absorbed_fraction = 0.0;
};
std::vector<MarkovCurvePoint> markov_absorption_curve(const MarkovScenario& ms, uint64_t seed,
                                                      uint32_t trials,
                                                      const std::vector<uint64_t>& grid);

// Fraction of `trials` runs absorbed within `steps` chain steps.
double estimate_absorption_probability(const MarkovScenario& ms, uint64_t steps, uint32_t trials,
                                       uint64_t seed);

// ---------------------------------------------------------------------------
// Closed-form load model for one package cycle

// Modeled wire sizes: a vester item is a 32-byte key plus a 64-byte
// signature; a transaction is 136 bytes.
inline constexpr uint64_t kModelVesterItemBytes = 96;
inline constexpr uint64_t kModelTransactionBytes = 136;

// Vester-list length that pushes accumulated stake strictly past the
// threshold when `reserve` never vests and the rest is spread equally over
// `accounts` holders: one agent plus ceil((threshold - reserve) / share).
uint64_t required_vester_list_len(Amount threshold, Amount reserve, Amount rest,
                                  uint64_t accounts);

// Transactions accumulated over one package period at a sustained rate,
// rounded to the nearest integer.
uint64_t txs_per_package(double tx_rate_per_sec, uint64_t package_period_secs);

struct LoadModel {
    uint64_t vester_list_len = 0;
    uint64_t package_bytes = 0;
    uint64_t verifications_per_sec = 0;  // signatures checked per second, rounded
};

LoadModel load_model(uint64_t vester_list_len, uint64_t n_txs, uint64_t package_period_secs);

// ---------------------------------------------------------------------------
// Bootstrap-attack trial: a rejoining node facing a sybil flood

struct SybilBootstrapTrial {
    uint32_t honest_holders = 10;
    uint32_t sybil_responders = 10'000;
    Amount total_supply = 100'000;
    Amount honest_weight = 1'000;      // seed weight deposited per honest holder
    bool remove_matching_peers = false;  // simulate takedown of list-matching peers
    uint64_t seed = 0;
};

struct SybilBootstrapOutcome {
    bool seed_recovery_honest = false;  // stake-weighted seeds named the honest view
    bool location_pick_honest = false;  // location-filtered sampling named it
    bool location_alert = false;        // or raised the alarm instead of answering
};

SybilBootstrapOutcome run_sybil_bootstrap_trial(const SybilBootstrapTrial& t);

}  // namespace ccsim
