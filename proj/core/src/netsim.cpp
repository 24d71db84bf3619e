#include "ccsim/netsim.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "ccsim/genesis.hpp"
#include "ccsim/ledger.hpp"
#include "ccsim/security.hpp"

namespace ccsim {

namespace {

Digest label_digest(const char* tag, uint64_t a, uint64_t b = 0) {
    ByteWriter w;
    w.var_bytes(Bytes(tag, tag + std::strlen(tag)));
    w.u64(a);
    w.u64(b);
    return digest_of(w);
}

AccountId pseudo_account(const char* tag, uint64_t a, uint64_t b) {
    AccountId id;
    id.bytes = label_digest(tag, a, b).bytes;
    return id;
}

size_t message_bytes(const Message& msg) {
    return std::visit([](const auto& v) { return serialize(v).size(); }, msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

Simulation::Simulation(Scenario sc)
    : sc_(std::move(sc)),
      scheme_(test_scheme()),
      traffic_rng_(sc_.seed, "traffic") {
    keys_.reserve(sc_.node_count);
    labels_.reserve(sc_.node_count);
    for (uint32_t i = 0; i < sc_.node_count; ++i) {
        keys_.push_back(scheme_.keygen(Rng(sc_.seed, "node-key", i).next()));
        labels_.push_back("loc-" + std::to_string(i % sc_.locations));
    }
    build_genesis();

    switch (sc_.params.kind) {
        case ParamKind::Auto:
            params_ = derive_params(std::max<uint64_t>(1, genesis_.nonzero_accounts()));
            break;
        case ParamKind::Accounts: params_ = derive_params(sc_.params.accounts); break;
        case ParamKind::Digits: {
            uint32_t b = sc_.params.digits;
            params_.serious_accounts = 0;
            params_.digits = b;
            params_.sample_size = b * b;
            params_.stability_rounds = b * b;
            break;
        }
    }

    build_nodes();

    update_rngs_.reserve(sc_.node_count);
    audit_rngs_.reserve(sc_.node_count);
    for (uint32_t i = 0; i < sc_.node_count; ++i) {
        update_rngs_.emplace_back(sc_.seed, "update", i);
        audit_rngs_.emplace_back(sc_.seed, "audit", i);
    }

    adversary_done_.resize(sc_.adversaries.size());
    swarms_.resize(sc_.adversaries.size());
    for (size_t a = 0; a < sc_.adversaries.size(); ++a) {
        const AdversarySpec& adv = sc_.adversaries[a];
        if (adv.kind != AdversaryKind::SybilSwarm) continue;
        Digest fake = label_digest("sybil-view", sc_.seed, a);
        swarms_[a].reserve(adv.swarm_size);
        for (uint32_t k = 0; k < adv.swarm_size; ++k) {
            SwarmPeer p;
            p.pubkey = pseudo_account("sybil-peer", sc_.seed ^ a, k);
            p.advertised_hash = fake;
            p.advertised_sn = adv.swarm_view_sn;
            p.label = adv.swarm_label;
            swarms_[a].push_back(std::move(p));
        }
    }

    pinned_[genesis_.sn] = genesis_.hash;
}

void Simulation::build_genesis() {
    const uint32_t n = sc_.node_count;
    std::vector<Amount> amounts(n, 0);
    switch (sc_.stakes.kind) {
        case StakeKind::Uniform: {
            Amount per = sc_.total_supply / n;
            for (auto& a : amounts) a = per;
            break;
        }
        case StakeKind::Pareto: {
            // Heavy-tailed weights, floor-proportional shares; division dust
            // stays in the recycled record.
            std::vector<long double> w(n);
            long double sum = 0.0L;
            for (uint32_t i = 0; i < n; ++i) {
                double u = Rng(sc_.seed, "stake", i).unit();
                w[i] = std::pow(1.0L - static_cast<long double>(u),
                                -1.0L / static_cast<long double>(sc_.stakes.pareto_alpha));
                sum += w[i];
            }
            for (uint32_t i = 0; i < n; ++i) {
                long double share = w[i] / sum * static_cast<long double>(sc_.total_supply);
                amounts[i] = static_cast<Amount>(share);
            }
            break;
        }
        case StakeKind::Explicit:
            amounts = sc_.stakes.amounts;
            break;
        case StakeKind::Genesis: {
            // Launch-style distribution run in-simulation: node 0 sponsors,
            // everyone else registers a claim with a legacy key.
            DistributionPolicy policy;
            policy.total_supply = sc_.total_supply;
            policy.sponsor = keys_[0].pub;
            policy.deadline = 0;
            std::set<AccountId> eligible;
            std::vector<KeyPair> legacy;
            legacy.reserve(n);
            for (uint32_t i = 0; i < n; ++i) {
                legacy.push_back(scheme_.keygen(Rng(sc_.seed, "legacy-key", i).next()));
                eligible.insert(legacy.back().pub);
            }
            Registrar reg(policy, std::move(eligible));
            for (uint32_t i = 1; i < n; ++i) {
                auto err = reg.submit(scheme_, make_registration(scheme_, legacy[i], keys_[i].pub),
                                      /*now=*/0);
                if (err) throw std::logic_error("genesis registration rejected");
            }
            auto view = build_initial_view(policy, reg.accepted());
            if (!view) throw std::logic_error("genesis distribution produced no view");
            genesis_ = std::move(*view);
            return;
        }
    }

    std::vector<std::pair<AccountId, Amount>> sorted;
    Amount issued = 0;
    for (uint32_t i = 0; i < n; ++i) {
        issued = checked_add(issued, amounts[i]);
        sorted.emplace_back(keys_[i].pub, amounts[i]);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    genesis_ = BalanceView{};
    genesis_.sn = 0;
    genesis_.base_view_sn = 0;
    for (const auto& [pub, amount] : sorted)
        genesis_.records.push_back(BalanceRecord{pub, amount, 0});
    genesis_.recycled.balance = checked_sub(sc_.total_supply, issued);
    seal_view(genesis_);
}

void Simulation::build_nodes() {
    nodes_.reserve(sc_.node_count);
    std::set<NodeId> agents(sc_.agents.begin(), sc_.agents.end());
    std::set<NodeId> vesters(sc_.vesters.begin(), sc_.vesters.end());
    for (uint32_t i = 0; i < sc_.node_count; ++i) {
        NodeState n;
        n.id = i;
        n.identity = keys_[i];
        n.is_agent = agents.contains(i);
        n.is_vester = vesters.contains(i);
        n.config.agent_criteria = sc_.agent_criteria;
        n.config.vester_criteria = sc_.vester_criteria;
        n.config.audit_ratio = sc_.audit_ratio;
        n.config.audit_cap = sc_.audit_cap;
        n.config.blacklist_decay = sc_.blacklist_decay;
        n.init_genesis(genesis_);
        nodes_.push_back(std::move(n));
    }
}

// ---------------------------------------------------------------------------
// Topology and transport

bool Simulation::tilp_admits(const std::string& label) const {
    if (!sc_.tilp.enabled) return true;
    for (const auto& loc : sc_.tilp.locations)
        if (loc == label) return true;
    return false;
}

bool Simulation::link_open(NodeId a, NodeId b, Tick t) const {
    for (const auto& w : sc_.partitions) {
        if (t < w.from || t >= w.to) continue;
        for (const auto& g : w.groups) {
            bool has_a = std::find(g.begin(), g.end(), a) != g.end();
            bool has_b = std::find(g.begin(), g.end(), b) != g.end();
            if (has_a || has_b) return has_a && has_b;
        }
        return false;
    }
    return true;
}

Rng& Simulation::link_rng(NodeId from, NodeId to) {
    auto key = std::make_pair(from, to);
    auto it = link_rngs_.find(key);
    if (it == link_rngs_.end())
        it = link_rngs_.emplace(key, Rng(sc_.seed, "link", from, to)).first;
    return it->second;
}

void Simulation::send(NodeId from, NodeId to, const Message& msg) {
    if (!link_open(from, to, now_)) return;
    Rng& r = link_rng(from, to);
    if (r.chance(sc_.loss_probability)) return;
    Tick latency = sc_.latency.kind == LatencyKind::Fixed
                       ? sc_.latency.fixed
                       : r.range(sc_.latency.lo, sc_.latency.hi);
    events_.push(Event{now_ + latency, next_seq_++, to, msg});
    tick_metrics_.messages++;
    tick_metrics_.bytes += message_bytes(msg);
}

void Simulation::broadcast(NodeId from, const Message& msg) {
    for (NodeId to = 0; to < sc_.node_count; ++to)
        if (to != from) send(from, to, msg);
}

// ---------------------------------------------------------------------------
// Safety pins

void Simulation::pin(SeqNo sn, const Digest& hash, NodeId node, const char* occasion) {
    auto [it, inserted] = pinned_.try_emplace(sn, hash);
    if (!inserted && it->second != hash) {
        std::ostringstream os;
        os << "promoted-view conflict at sn " << sn << ": node " << node << " (" << occasion
           << ") holds " << hash.hex().substr(0, 12) << ", pinned "
           << it->second.hex().substr(0, 12);
        violations_.push_back(os.str());
    }
}

void Simulation::pin_header(SeqNo base_sn, const Digest& header, NodeId node) {
    auto [it, inserted] = pinned_headers_.try_emplace(base_sn, header);
    if (!inserted && it->second != header) {
        std::ostringstream os;
        os << "finalized-package conflict at base sn " << base_sn << ": node " << node
           << " accepted header " << header.hex().substr(0, 12) << ", pinned "
           << it->second.hex().substr(0, 12);
        violations_.push_back(os.str());
    }
}

void Simulation::after_finalize(NodeId id, const TxPackage& pkg) {
    NodeState& me = nodes_[id];
    tick_metrics_.finalizations++;
    pin_header(pkg.base_view_sn, header_digest(pkg), id);
    penalized_union_.insert(me.penalized_offenses.begin(), me.penalized_offenses.end());
}

void Simulation::after_promotion(NodeId id) {
    NodeState& me = nodes_[id];
    tick_metrics_.promotions++;
    pin(me.baseview.sn, me.baseview.hash, id, "promote");
    if (me.baseview.sn > 0)
        pin(me.baseview.base_view_sn, me.baseview.base_view_hash, id, "promote-base");
}

// ---------------------------------------------------------------------------
// Per-node behavior

bool Simulation::is_honest(NodeId id) const {
    for (const auto& adv : sc_.adversaries)
        if (adv.kind != AdversaryKind::SybilSwarm && adv.node == id) return false;
    return true;
}

std::optional<AdversaryKind> Simulation::active_adversary(NodeId id) const {
    for (const auto& adv : sc_.adversaries) {
        if (adv.kind == AdversaryKind::SybilSwarm) continue;
        if (adv.node == id && now_ >= adv.from && now_ < adv.to) return adv.kind;
    }
    return std::nullopt;
}

void Simulation::deliver(NodeId to, Message msg) {
    if (active_adversary(to) == AdversaryKind::StaleBroadcaster)
        return;  // frozen: serves its stale view but processes nothing
    NodeState& me = nodes_[to];
    if (const Transaction* tx = std::get_if<Transaction>(&msg)) {
        me.blacklist_check(tx->sender, tx->base_view_sn, tx->base_view_hash);
        if (me.is_agent) me.agent_collect(scheme_, *tx);
        return;
    }
    if (const ViolationReport* rep = std::get_if<ViolationReport>(&msg)) {
        if (me.is_agent) me.agent_note_report(scheme_, *rep);
        return;
    }
    const TxPackage& pkg = std::get<TxPackage>(msg);
    me.blacklist_check(pkg.agent_pubkey, pkg.base_view_sn, pkg.base_view_hash);
    if (auto rep = me.audit_package(scheme_, pkg, audit_rngs_[to], now_)) {
        tick_metrics_.reports++;
        if (me.is_agent) me.agent_note_report(scheme_, *rep);
        broadcast(to, *rep);
    }
    if (pkg.flag_51) {
        if (auto fin = me.check_and_finalize(scheme_, pkg, sc_.total_supply, params_, now_)) {
            after_finalize(to, *fin);
            broadcast(to, *fin);
        }
    } else {
        me.note_candidate(pkg);
    }
}

void Simulation::honest_update(NodeId id) {
    NodeState& me = nodes_[id];
    struct Entry {
        bool real;
        NodeId peer;
        const SwarmPeer* swarm;
    };
    std::vector<Entry> eligible;
    for (NodeId peer = 0; peer < sc_.node_count; ++peer) {
        if (peer == id) continue;
        if (!link_open(id, peer, now_)) continue;
        if (me.is_blacklisted(keys_[peer].pub)) continue;
        if (!tilp_admits(labels_[peer])) continue;
        eligible.push_back({true, peer, nullptr});
    }
    for (size_t a = 0; a < sc_.adversaries.size(); ++a) {
        const AdversarySpec& adv = sc_.adversaries[a];
        if (adv.kind != AdversaryKind::SybilSwarm) continue;
        if (now_ < adv.from || now_ >= adv.to) continue;
        if (!tilp_admits(adv.swarm_label)) continue;
        for (const SwarmPeer& p : swarms_[a]) eligible.push_back({false, 0, &p});
    }
    if (eligible.empty()) {
        me.update_step({}, params_, [](const Digest&) -> const BalanceView* { return nullptr; });
        return;
    }
    size_t m = std::min<size_t>(params_.sample_size, eligible.size());
    std::vector<size_t> chosen = update_rngs_[id].sample_indices(eligible.size(), m);
    std::vector<HashSample> samples;
    samples.reserve(m);
    for (size_t ix : chosen) {
        const Entry& e = eligible[ix];
        if (e.real) {
            const NodeState& peer = nodes_[e.peer];
            samples.push_back(HashSample{peer.current_view.hash, peer.current_view.sn,
                                         me.baseview.balance_of(keys_[e.peer].pub)});
        } else {
            samples.push_back(HashSample{e.swarm->advertised_hash, e.swarm->advertised_sn,
                                         me.baseview.balance_of(e.swarm->pubkey)});
        }
    }
    auto resolve = [&](const Digest& h) -> const BalanceView* {
        for (const Entry& e : eligible) {
            if (!e.real) continue;
            const BalanceView& v = nodes_[e.peer].current_view;
            if (v.hash == h) return &v;
        }
        return nullptr;
    };
    UpdateOutcome out = me.update_step(samples, params_, resolve);
    if (out.promoted) after_promotion(id);
}

void Simulation::agent_step(NodeId id) {
    NodeState& me = nodes_[id];
    if (!me.is_agent) return;
    if (auto pkg = me.agent_make_package(scheme_, now_)) {
        broadcast(id, *pkg);
        return;
    }
    // Keep an unsettled package circulating so losses cannot strand it;
    // prefer the most-endorsed version seen so far.
    if (now_ % sc_.rebroadcast_every != id % sc_.rebroadcast_every) return;
    SeqNo sn = me.baseview.sn;
    auto mine = me.my_packages.find(sn);
    if (mine == me.my_packages.end()) return;
    if (me.accepted_51_sns.contains(sn) || me.current_view.hash != me.baseview.hash) return;
    const TxPackage* best = &mine->second;
    auto csn = me.candidate_packages.find(sn);
    if (csn != me.candidate_packages.end()) {
        auto ci = csn->second.find(header_digest(mine->second));
        if (ci != csn->second.end()) best = &ci->second;
    }
    broadcast(id, *best);
}

void Simulation::vester_step(NodeId id) {
    NodeState& me = nodes_[id];
    if (!me.is_vester) return;
    const TxPackage* best = me.best_candidate();
    if (!best) return;
    auto aug = me.vester_vest(scheme_, *best, now_);
    if (!aug) return;
    if (params_.above_threshold(vesting_stake(me.baseview, *aug), sc_.total_supply)) {
        if (auto fin = me.check_and_finalize(scheme_, *aug, sc_.total_supply, params_, now_)) {
            after_finalize(id, *fin);
            broadcast(id, *fin);
            return;
        }
    }
    broadcast(id, *aug);
}

void Simulation::adversary_step(const AdversarySpec& adv, size_t adv_index) {
    NodeState& me = nodes_[adv.node];
    SeqNo sn = me.baseview.sn;
    switch (adv.kind) {
        case AdversaryKind::DoublePackageAgent: {
            if (adversary_done_[adv_index].contains(sn)) return;
            adversary_done_[adv_index].insert(sn);
            me.packaged_sns.insert(sn);
            // Two validly signed packages on one baseview, distinguished by
            // timestamp: the exclusivity breach in its purest form.
            TxPackage p1 = make_package(scheme_, me.identity, sn, me.baseview.hash, {}, {}, now_);
            TxPackage p2 =
                make_package(scheme_, me.identity, sn, me.baseview.hash, {}, {}, now_ + 1);
            broadcast(adv.node, p1);
            broadcast(adv.node, p2);
            return;
        }
        case AdversaryKind::DoubleVester: {
            if (adversary_done_[adv_index].contains(sn)) return;
            auto csn = me.candidate_packages.find(sn);
            if (csn == me.candidate_packages.end()) return;
            std::vector<const TxPackage*> targets;
            for (const auto& [hd, cand] : csn->second) {
                if (cand.base_view_hash != me.baseview.hash) continue;
                bool already = false;
                for (const auto& item : cand.vester_items)
                    if (item.vester_pubkey == me.identity.pub) already = true;
                if (!already) targets.push_back(&cand);
                if (targets.size() == 2) break;
            }
            if (targets.size() < 2) return;  // wait until two agents offered packages
            adversary_done_[adv_index].insert(sn);
            for (const TxPackage* t : targets) {
                TxPackage copy = *t;
                if (append_vester(scheme_, copy, me.identity, now_)) continue;
                broadcast(adv.node, copy);
            }
            return;
        }
        case AdversaryKind::WithholdingVester:
        case AdversaryKind::StaleBroadcaster:
        case AdversaryKind::SybilSwarm: return;  // passive kinds
    }
}

void Simulation::traffic_step() {
    if (!sc_.traffic.enabled || now_ < sc_.traffic.from || now_ >= sc_.traffic.to) return;
    std::set<NodeId> excluded(sc_.traffic.exclude.begin(), sc_.traffic.exclude.end());
    Amount need = checked_add(sc_.traffic.volume, sc_.traffic.fee);
    for (uint32_t k = 0; k < sc_.traffic.per_tick; ++k) {
        for (int attempt = 0; attempt < 10; ++attempt) {
            NodeId sender = static_cast<NodeId>(traffic_rng_.below(sc_.node_count));
            if (excluded.contains(sender)) continue;
            const NodeState& s = nodes_[sender];
            if (s.baseview.balance_of(keys_[sender].pub) < need) continue;
            NodeId receiver = sender;
            for (int r = 0; r < 10 && (receiver == sender || excluded.contains(receiver)); ++r)
                receiver = static_cast<NodeId>(traffic_rng_.below(sc_.node_count));
            if (receiver == sender || excluded.contains(receiver)) continue;
            Transaction tx =
                make_transaction(scheme_, keys_[sender], keys_[receiver].pub, sc_.traffic.volume,
                                 sc_.traffic.fee, s.baseview.sn, s.baseview.hash, now_);
            report_.injected_txs++;
            broadcast(sender, tx);
            break;
        }
    }
}

uint32_t Simulation::distinct_honest_hashes() const {
    std::set<Digest> hashes;
    for (NodeId i = 0; i < sc_.node_count; ++i)
        if (is_honest(i)) hashes.insert(nodes_[i].current_view.hash);
    return static_cast<uint32_t>(hashes.size());
}

// ---------------------------------------------------------------------------
// Main loop

MetricsReport Simulation::run(const std::function<void(Tick)>& after_tick) {
    if (ran_) throw std::logic_error("Simulation::run may only be called once");
    ran_ = true;
    report_.scenario_name = sc_.name;
    report_.seed = sc_.seed;
    report_.nodes = sc_.node_count;
    report_.run_ticks = sc_.run_ticks;

    try {
        for (now_ = 0; now_ < sc_.run_ticks; ++now_) {
            tick_metrics_ = TickMetrics{};
            tick_metrics_.tick = now_;

            traffic_step();
            while (!events_.empty() && events_.top().at <= now_) {
                Event ev = events_.top();
                events_.pop();
                deliver(ev.to, std::move(ev.msg));
            }
            for (NodeId id = 0; id < sc_.node_count; ++id) {
                auto kind = active_adversary(id);
                if (now_ % sc_.update_period == id % sc_.update_period &&
                    kind != AdversaryKind::StaleBroadcaster)
                    honest_update(id);
                if (kind) {
                    for (size_t a = 0; a < sc_.adversaries.size(); ++a)
                        if (sc_.adversaries[a].kind != AdversaryKind::SybilSwarm &&
                            sc_.adversaries[a].node == id && now_ >= sc_.adversaries[a].from &&
                            now_ < sc_.adversaries[a].to) {
                            adversary_step(sc_.adversaries[a], a);
                            break;
                        }
                    if (kind == AdversaryKind::DoublePackageAgent) {
                        vester_step(id);
                        continue;
                    }
                    continue;  // other adversary kinds act neither as agent nor vester
                }
                agent_step(id);
                vester_step(id);
            }

            tick_metrics_.distinct_hashes = distinct_honest_hashes();
            report_.per_tick.push_back(tick_metrics_);
            report_.total_messages += tick_metrics_.messages;
            report_.total_bytes += tick_metrics_.bytes;
            report_.total_reports += tick_metrics_.reports;
            report_.total_finalizations += tick_metrics_.finalizations;
            report_.total_promotions += tick_metrics_.promotions;
            if (after_tick) after_tick(now_);
        }
    } catch (const std::logic_error& e) {
        violations_.push_back(std::string("balance conservation: ") + e.what());
    }

    for (const NodeState& n : nodes_) {
        report_.fetch_failures += n.fetch_failures;
        report_.dropped_txs += n.dropped_txs;
        report_.blacklist_sizes.push_back(n.blacklist.size());
    }
    report_.penalized_offenses = penalized_union_.size();
    report_.invariant_violations = violations_;

    Tick ticks = static_cast<Tick>(report_.per_tick.size());
    report_.first_consensus_tick = ticks;
    report_.settled_tick = ticks;
    for (Tick t = 0; t < ticks; ++t) {
        if (report_.per_tick[t].distinct_hashes <= 1) {
            report_.first_consensus_tick = t;
            break;
        }
    }
    for (Tick t = ticks; t > 0; --t) {
        if (report_.per_tick[t - 1].distinct_hashes > 1) break;
        report_.settled_tick = t - 1;
    }
    report_.converged = ticks > 0 && report_.per_tick[ticks - 1].distinct_hashes <= 1 &&
                        violations_.empty();
    return report_;
}

// ---------------------------------------------------------------------------
// Reports

std::string MetricsReport::csv() const {
    std::ostringstream os;
    os << "tick,distinct_hashes,messages,bytes,reports,finalizations,promotions\n";
    for (const TickMetrics& m : per_tick) {
        os << m.tick << ',' << m.distinct_hashes << ',' << m.messages << ',' << m.bytes << ','
           << m.reports << ',' << m.finalizations << ',' << m.promotions << '\n';
    }
    return os.str();
}

std::string MetricsReport::json_summary() const {
    nlohmann::ordered_json j;
    j["scenario"] = scenario_name;
    j["seed"] = seed;
    j["nodes"] = nodes;
    j["run_ticks"] = run_ticks;
    j["ticks_executed"] = per_tick.size();
    j["converged"] = converged;
    j["first_consensus_tick"] = first_consensus_tick;
    j["settled_tick"] = settled_tick;
    j["total_messages"] = total_messages;
    j["total_bytes"] = total_bytes;
    j["total_reports"] = total_reports;
    j["total_finalizations"] = total_finalizations;
    j["total_promotions"] = total_promotions;
    j["fetch_failures"] = fetch_failures;
    j["injected_txs"] = injected_txs;
    j["dropped_txs"] = dropped_txs;
    j["penalized_offenses"] = penalized_offenses;
    j["blacklist_sizes"] = blacklist_sizes;
    j["invariant_violations"] = invariant_violations;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Pure absorbing-chain mode

namespace {

// The model loop shared by all chain-mode entry points: per step, sample M
// nodes, take the stake-weighted winner through the production kernel, and
// overwrite one uniformly random node with it.
struct MarkovRun {
    const MarkovScenario& ms;
    std::vector<Amount> weights;
    std::vector<uint32_t> views;
    std::vector<Digest> digest_of_view;
    std::map<Digest, uint32_t> view_of_digest;
    Rng rng;

    MarkovRun(const MarkovScenario& scenario, uint64_t seed)
        : ms(scenario), rng(seed, "markov") {
        if (ms.nodes == 0) throw std::invalid_argument("markov: nodes must be positive");
        if (ms.distinct_views == 0) throw std::invalid_argument("markov: need at least one view");
        if (ms.sample_size == 0)
            throw std::invalid_argument("markov: sample_size must be positive");
        if (!ms.weights.empty() && ms.weights.size() != ms.nodes)
            throw std::invalid_argument("markov: weights must match nodes");
        if (!ms.initial_views.empty() && ms.initial_views.size() != ms.nodes)
            throw std::invalid_argument("markov: initial_views must match nodes");
        weights = ms.weights;
        if (weights.empty()) weights.assign(ms.nodes, 1);
        views.resize(ms.nodes);
        for (uint32_t i = 0; i < ms.nodes; ++i) {
            views[i] = ms.initial_views.empty() ? i % ms.distinct_views : ms.initial_views[i];
            if (views[i] >= ms.distinct_views)
                throw std::invalid_argument("markov: initial view out of range");
        }
        digest_of_view.resize(ms.distinct_views);
        for (uint32_t v = 0; v < ms.distinct_views; ++v) {
            digest_of_view[v] = label_digest("markov-view", v);
            view_of_digest[digest_of_view[v]] = v;
        }
    }

    bool absorbed() const {
        for (uint32_t i = 1; i < ms.nodes; ++i)
            if (views[i] != views[0]) return false;
        return true;
    }

    void step() {
        size_t m = std::min<size_t>(ms.sample_size, ms.nodes);
        std::vector<size_t> chosen = rng.sample_indices(ms.nodes, m);
        std::vector<HashSample> samples;
        samples.reserve(m);
        for (size_t ix : chosen)
            samples.push_back(HashSample{digest_of_view[views[ix]], 0, weights[ix]});
        auto win = weighted_winner(samples);
        views[rng.below(ms.nodes)] = view_of_digest.at(win->hash);
    }

    std::vector<uint32_t> counts() const {
        std::vector<uint32_t> c(ms.distinct_views, 0);
        for (uint32_t v : views) c[v]++;
        return c;
    }
};

}  // namespace

MarkovResult run_markov_mode(const MarkovScenario& ms, uint64_t seed) {
    MarkovRun run(ms, seed);
    for (uint64_t step = 0; step < ms.max_steps; ++step) {
        if (run.absorbed()) return MarkovResult{true, step, run.views[0]};
        run.step();
    }
    if (run.absorbed()) return MarkovResult{true, ms.max_steps, run.views[0]};
    return MarkovResult{false, ms.max_steps, 0};
}

std::vector<std::vector<uint32_t>> markov_trajectory(const MarkovScenario& ms, uint64_t seed,
                                                     uint64_t n_steps) {
    MarkovRun run(ms, seed);
    std::vector<std::vector<uint32_t>> trajectory;
    trajectory.push_back(run.counts());
    for (uint64_t step = 0; step < n_steps && !run.absorbed(); ++step) {
        run.step();
        trajectory.push_back(run.counts());
    }
    return trajectory;
}

std::vector<MarkovCurvePoint> markov_absorption_curve(const MarkovScenario& ms, uint64_t seed,
                                                      uint32_t trials,
                                                      const std::vector<uint64_t>& grid) {
    if (trials == 0) throw std::invalid_argument("markov curve: trials must be positive");
    std::vector<uint64_t> absorbed_at;
    absorbed_at.reserve(trials);
    for (uint32_t t = 0; t < trials; ++t) {
        MarkovResult r = run_markov_mode(ms, Rng(seed, "markov-curve", t).next());
        if (r.absorbed) absorbed_at.push_back(r.steps);
    }
    std::sort(absorbed_at.begin(), absorbed_at.end());
    std::vector<MarkovCurvePoint> curve;
    curve.reserve(grid.size());
    for (uint64_t g : grid) {
        size_t count = static_cast<size_t>(
            std::upper_bound(absorbed_at.begin(), absorbed_at.end(), g) - absorbed_at.begin());
        curve.push_back(MarkovCurvePoint{g, static_cast<double>(count) / trials});
    }
    return curve;
}

double estimate_absorption_probability(const MarkovScenario& ms, uint64_t steps, uint32_t trials,
                                       uint64_t seed) {
    return markov_absorption_curve(ms, seed, trials, {steps}).front().absorbed_fraction;
}

// ---------------------------------------------------------------------------
// Load model

uint64_t required_vester_list_len(Amount threshold, Amount reserve, Amount rest,
                                  uint64_t accounts) {
    if (accounts == 0) throw std::invalid_argument("load model: accounts must be positive");
    Amount per_account = rest / accounts;
    if (per_account == 0) throw std::invalid_argument("load model: zero per-account stake");
    Amount missing = checked_sub(threshold, reserve);
    uint64_t vesters = (missing + per_account - 1) / per_account;  // ceil
    return 1 + vesters;                                            // the agent counts too
}

uint64_t txs_per_package(double tx_rate_per_sec, uint64_t package_period_secs) {
    if (tx_rate_per_sec < 0) throw std::invalid_argument("load model: negative rate");
    double txs = tx_rate_per_sec * static_cast<double>(package_period_secs);
    return static_cast<uint64_t>(txs + 0.5);
}

LoadModel load_model(uint64_t vester_list_len, uint64_t n_txs, uint64_t package_period_secs) {
    if (package_period_secs == 0) throw std::invalid_argument("load model: zero period");
    LoadModel m;
    m.vester_list_len = vester_list_len;
    m.package_bytes = vester_list_len * kModelVesterItemBytes + n_txs * kModelTransactionBytes;
    uint64_t checks = vester_list_len + n_txs;
    m.verifications_per_sec = (checks + package_period_secs / 2) / package_period_secs;
    return m;
}

// ---------------------------------------------------------------------------
// Bootstrap-attack trial

SybilBootstrapOutcome run_sybil_bootstrap_trial(const SybilBootstrapTrial& t) {
    Rng rng(t.seed, "bootstrap");
    Digest honest_hash = label_digest("honest-view", t.seed);
    Digest sybil_hash = label_digest("sybil-view", t.seed);

    SybilBootstrapOutcome out;

    // Recovery by deposited seeds: holder weight is on-ledger balance, so
    // the flood answers with weight zero.
    std::vector<SeedResponse> responses;
    responses.reserve(t.honest_holders + t.sybil_responders);
    for (uint32_t i = 0; i < t.honest_holders; ++i)
        responses.push_back(SeedResponse{t.honest_weight, honest_hash, 7});
    for (uint32_t i = 0; i < t.sybil_responders; ++i)
        responses.push_back(SeedResponse{0, sybil_hash, 1'000'000});
    rng.shuffle(responses);
    auto recovered = sss_recover(responses, default_seed_floor(t.total_supply));
    if (const Digest* d = std::get_if<Digest>(&recovered))
        out.seed_recovery_honest = (*d == honest_hash);

    // Recovery by location pattern: honest peers answer from known
    // locations, the flood from one unlisted place.
    std::set<std::string> known;
    std::vector<PeerDescriptor> peers;
    peers.reserve(t.honest_holders + t.sybil_responders);
    for (uint32_t i = 0; i < t.honest_holders; ++i) {
        std::string label = "home-" + std::to_string(i);
        known.insert(label);
        peers.push_back(PeerDescriptor{i, label, !t.remove_matching_peers, honest_hash, 7});
    }
    for (uint32_t i = 0; i < t.sybil_responders; ++i)
        peers.push_back(
            PeerDescriptor{t.honest_holders + i, "swarm", true, sybil_hash, 1'000'000});
    rng.shuffle(peers);
    auto picked = tilp_bootstrap(peers, Tilp::explicit_set(std::move(known)));
    if (const Digest* d = std::get_if<Digest>(&picked))
        out.location_pick_honest = (*d == honest_hash);
    else
        out.location_alert = std::holds_alternative<SybilAlert>(picked);
    return out;
}

}  // namespace ccsim
