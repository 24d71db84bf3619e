#include "ccsim/node.hpp"

#include <algorithm>

namespace ccsim {

Amount package_fees(const TxPackage& pkg) {
    Amount sum = 0;
    for (const auto& tx : pkg.transactions) sum = checked_add(sum, tx.tx_fee);
    return sum;
}

void NodeState::init_genesis(const BalanceView& genesis) {
    baseview = genesis;
    current_view = genesis;
    stability_counter = 0;
    last_winner = Digest{};
    promoted_baseviews[genesis.sn] = genesis.hash;
}

void NodeState::agent_collect(const SignatureScheme& scheme, const Transaction& tx) {
    if (!is_agent) return;
    if (tx.tx_fee < config.agent_criteria.min_tx_fee || is_blacklisted(tx.sender) ||
        validate_transaction(scheme, baseview, tx) != TxCheck::Ok) {
        ++dropped_txs;
        return;
    }
    Digest d = sha256(serialize(tx));
    if (!pending_tx_digests.insert(d).second) return;  // rebroadcast duplicate
    pending_txs.push_back(tx);
}

void NodeState::agent_note_report(const SignatureScheme& scheme, const ViolationReport& report) {
    if (!is_agent) return;
    if (!verify_violation(scheme, report)) return;
    OffenseKey key = offense_key(report);
    if (pending_offenses.contains(key) || penalized_offenses.contains(key)) return;
    pending_offenses.insert(key);
    pending_reports.push_back(report);
}

std::optional<TxPackage> NodeState::agent_make_package(const SignatureScheme& scheme, Tick now) {
    if (!is_agent) return std::nullopt;
    if (packaged_sns.contains(baseview.sn)) return std::nullopt;  // one package per sn, ever

    std::vector<ViolationReport> reports;
    for (const auto& rep : pending_reports) {
        if (!penalized_offenses.contains(offense_key(rep))) reports.push_back(rep);
    }

    std::vector<const Transaction*> usable;
    for (const auto& tx : pending_txs) {
        if (!is_blacklisted(tx.sender) &&
            validate_transaction(scheme, baseview, tx) == TxCheck::Ok)
            usable.push_back(&tx);
    }
    if (reports.empty() && usable.empty()) return std::nullopt;
    std::stable_sort(usable.begin(), usable.end(),
                     [](const Transaction* a, const Transaction* b) { return a->tx_fee > b->tx_fee; });

    // Reports ship unconditionally; transactions fill the remaining byte
    // budget in fee order.
    size_t budget = config.agent_criteria.max_package_bytes;
    size_t used = 256;  // fixed fields, signature, list headers
    for (const auto& rep : reports) used += serialize(rep).size();
    std::vector<Transaction> txs;
    Amount fees = 0;
    for (const Transaction* tx : usable) {
        size_t sz = serialize(*tx).size();
        if (used + sz > budget) break;
        used += sz;
        txs.push_back(*tx);
        fees = checked_add(fees, tx->tx_fee);
    }
    if (reports.empty() && fees < config.agent_criteria.min_fee_per_package)
        return std::nullopt;  // not worth packaging yet

    TxPackage pkg = make_package(scheme, identity, baseview.sn, baseview.hash, std::move(reports),
                                 std::move(txs), now);
    packaged_sns.insert(baseview.sn);
    my_packages[baseview.sn] = pkg;
    note_candidate(pkg);
    return pkg;
}

void NodeState::note_candidate(const TxPackage& pkg) {
    if (pkg.base_view_sn < baseview.sn) return;  // stale
    Digest hd = header_digest(pkg);
    auto& slot = candidate_packages[pkg.base_view_sn];
    auto it = slot.find(hd);
    if (it == slot.end()) {
        slot.emplace(hd, pkg);
        return;
    }
    // Same agent package: keep the version carrying more endorsements;
    // equal lengths settle on the smaller full digest for determinism.
    const TxPackage& held = it->second;
    if (pkg.vester_items.size() > held.vester_items.size() ||
        (pkg.vester_items.size() == held.vester_items.size() &&
         package_digest(pkg) < package_digest(held))) {
        it->second = pkg;
    }
}

const TxPackage* NodeState::best_candidate() const {
    auto slot = candidate_packages.find(baseview.sn);
    if (slot == candidate_packages.end()) return nullptr;
    const TxPackage* best = nullptr;
    Amount best_stake = 0;
    for (const auto& [hd, pkg] : slot->second) {  // header-digest order breaks stake ties
        if (pkg.base_view_hash != baseview.hash) continue;
        if (is_blacklisted(pkg.agent_pubkey)) continue;
        Amount stake = vesting_stake(baseview, pkg);
        if (best == nullptr || stake > best_stake) {
            best = &pkg;
            best_stake = stake;
        }
    }
    return best;
}

std::optional<TxPackage> NodeState::vester_vest(const SignatureScheme& scheme,
                                                const TxPackage& pkg, Tick now) {
    if (!is_vester) return std::nullopt;
    if (pkg.base_view_sn != baseview.sn || pkg.base_view_hash != baseview.hash)
        return std::nullopt;
    if (is_blacklisted(pkg.agent_pubkey)) return std::nullopt;

    Digest hd = header_digest(pkg);
    auto it = vested_sns.find(pkg.base_view_sn);
    if (it != vested_sns.end() && it->second != hd)
        return std::nullopt;  // one package per sn; other chain versions of it are fine

    const VesterCriteria& crit = config.vester_criteria;
    if (baseview.balance_of(identity.pub) < crit.min_vester_balance) return std::nullopt;
    if (baseview.balance_of(pkg.agent_pubkey) < crit.min_agent_balance) return std::nullopt;
    if (package_fees(pkg) < crit.min_fee_per_package) return std::nullopt;

    if (!verify_agent_signature(scheme, pkg)) return std::nullopt;
    if (!verify_vester_chain(scheme, pkg)) return std::nullopt;
    for (const auto& rep : pkg.reports) {
        if (!verify_violation(scheme, rep)) return std::nullopt;
        if (penalized_offenses.contains(offense_key(rep))) return std::nullopt;  // double jeopardy
    }
    for (const auto& tx : pkg.transactions) {
        if (validate_transaction(scheme, baseview, tx) != TxCheck::Ok) return std::nullopt;
    }

    TxPackage out = pkg;
    if (append_vester(scheme, out, identity, now)) return std::nullopt;  // already in the chain
    vested_sns[pkg.base_view_sn] = hd;
    note_candidate(out);
    return out;
}

std::optional<TxPackage> NodeState::check_and_finalize(const SignatureScheme& scheme,
                                                       TxPackage pkg, Amount total_supply,
                                                       const ConsensusParams& params, Tick now) {
    if (pkg.base_view_sn != baseview.sn || pkg.base_view_hash != baseview.hash)
        return std::nullopt;
    auto held = accepted_51_packages.find(pkg.base_view_sn);
    if (held == accepted_51_packages.end()) {
        // Not accepted here yet; if current_view advanced past the baseview
        // by adoption instead, this sn is already settled from elsewhere.
        if (current_view.hash != baseview.hash) return std::nullopt;
    } else {
        // Re-finalize only onto a strictly stronger chain variant, so nodes
        // agree on the winning variant independent of arrival order.
        Amount incoming = vesting_stake(baseview, pkg);
        Amount kept = vesting_stake(baseview, held->second);
        bool stronger = incoming > kept ||
                        (incoming == kept &&
                         package_digest(pkg) < package_digest(held->second));
        if (!stronger) return std::nullopt;
    }

    pkg.flag_51 = true;
    auto next = apply_tx_package_51(scheme, baseview, pkg, params, total_supply, now);
    if (!next) return std::nullopt;  // signatures, chain, or stake threshold failed

    current_view = std::move(*next);
    accepted_51_sns.insert(pkg.base_view_sn);
    accepted_51_packages[pkg.base_view_sn] = pkg;
    for (const auto& rep : pkg.reports) {
        if (verify_violation(scheme, rep)) penalized_offenses.insert(offense_key(rep));
    }
    if (!pending_reports.empty()) {
        std::vector<ViolationReport> keep;
        for (auto& rep : pending_reports) {
            if (!penalized_offenses.contains(offense_key(rep))) keep.push_back(std::move(rep));
        }
        pending_reports = std::move(keep);
        pending_offenses.clear();
        for (const auto& rep : pending_reports) pending_offenses.insert(offense_key(rep));
    }
    return pkg;
}

UpdateOutcome NodeState::update_step(const std::vector<HashSample>& samples,
                                     const ConsensusParams& params, const ViewResolver& resolve) {
    UpdateOutcome out;
    auto winner = weighted_winner(samples);
    if (!winner) return out;  // nothing sampled; everything stays frozen
    out.ran = true;
    out.winner_hash = winner->hash;

    if (winner->hash != current_view.hash && accept_winner(baseview.sn, winner->sn)) {
        const BalanceView* fetched = resolve(winner->hash);
        if (fetched == nullptr || fetched->hash != winner->hash ||
            view_hash(*fetched) != fetched->hash) {
            ++fetch_failures;
            out.fetch_failed = true;
            return out;  // state unchanged, retry next round
        }
        current_view = *fetched;
        stability_counter = 0;
        out.adopted = true;
    }

    // Promotion seals current_view, so the streak backing it must be on that
    // exact view. A stable winner this node does not hold (stale peers, or a
    // same-sn sibling it has not switched to) stabilizes nothing.
    if (winner->hash != current_view.hash) {
        stability_counter = 0;
        last_winner = winner->hash;
        return out;
    }

    StabilityResult st =
        stability_step(stability_counter, last_winner, winner->hash, params.stability_rounds);
    stability_counter = st.counter;
    last_winner = winner->hash;
    if (st.promoted) {
        promote();
        out.promoted = true;
    }
    return out;
}

void NodeState::promote() {
    baseview = current_view;
    ++promotions;
    promoted_baseviews[baseview.sn] = baseview.hash;
    stability_counter = 0;
    last_winner = Digest{};

    SeqNo keep_from = baseview.sn;
    std::erase_if(packaged_sns, [&](SeqNo sn) { return sn < keep_from; });
    std::erase_if(my_packages, [&](const auto& kv) { return kv.first < keep_from; });
    std::erase_if(vested_sns, [&](const auto& kv) { return kv.first < keep_from; });
    std::erase_if(accepted_51_sns, [&](SeqNo sn) { return sn < keep_from; });
    std::erase_if(accepted_51_packages, [&](const auto& kv) { return kv.first < keep_from; });
    std::erase_if(candidate_packages, [&](const auto& kv) { return kv.first < keep_from; });
    std::erase_if(audit_buffer,
                  [&](const TxPackage& pkg) { return pkg.base_view_sn < keep_from; });

    std::vector<Transaction> keep;
    for (auto& tx : pending_txs) {
        if (tx.base_view_sn == baseview.sn && tx.base_view_hash == baseview.hash)
            keep.push_back(std::move(tx));
    }
    pending_txs = std::move(keep);
    pending_tx_digests.clear();
    for (const auto& tx : pending_txs) pending_tx_digests.insert(sha256(serialize(tx)));

    std::erase_if(blacklist, [&](const auto& kv) {
        return promotions - kv.second >= config.blacklist_decay;
    });
}

namespace {

VestProof vest_proof_at(const TxPackage& pkg, uint32_t index) {
    VestProof p;
    p.header = pkg.header();
    p.agent_signature = pkg.agent_signature;
    p.vester_items.assign(pkg.vester_items.begin(), pkg.vester_items.begin() + index + 1);
    p.item_index = index;
    return p;
}

}  // namespace

std::optional<ViolationReport> NodeState::audit_package(const SignatureScheme& scheme,
                                                        const TxPackage& pkg, Rng& rng,
                                                        Tick now) {
    auto fresh = [&](const AccountId& accused, ViolationType type, SeqNo sn) {
        OffenseKey key{accused, static_cast<uint8_t>(type), sn};
        return !reported_offenses.contains(key) && !penalized_offenses.contains(key) &&
               !pending_offenses.contains(key);
    };
    auto emit = [&](const AccountId& accused, ViolationProofs proofs) {
        ViolationReport rep = make_report(scheme, identity, accused, std::move(proofs), now);
        if (!verify_violation(scheme, rep)) return std::optional<ViolationReport>{};
        reported_offenses.insert(offense_key(rep));
        return std::optional<ViolationReport>{std::move(rep)};
    };

    std::optional<ViolationReport> found;

    // A chain that vests one account twice convicts itself.
    for (uint32_t i = 0; i < pkg.vester_items.size() && !found; ++i) {
        for (uint32_t j = i + 1; j < pkg.vester_items.size() && !found; ++j) {
            const AccountId& who = pkg.vester_items[i].vester_pubkey;
            if (pkg.vester_items[j].vester_pubkey != who) continue;
            if (!fresh(who, ViolationType::DoubleVest, pkg.base_view_sn)) continue;
            found = emit(who, std::pair{vest_proof_at(pkg, i), vest_proof_at(pkg, j)});
        }
    }

    Digest hd = header_digest(pkg);
    for (const auto& held : audit_buffer) {
        if (found) break;
        if (held.base_view_sn != pkg.base_view_sn) continue;
        Digest held_hd = header_digest(held);
        if (held_hd == hd) {
            continue;  // same agent package, possibly another chain version
        }
        if (held.agent_pubkey == pkg.agent_pubkey &&
            fresh(pkg.agent_pubkey, ViolationType::DoublePackage, pkg.base_view_sn)) {
            std::pair proofs{PackageProof{held.header(), held.agent_signature},
                             PackageProof{pkg.header(), pkg.agent_signature}};
            found = emit(pkg.agent_pubkey, proofs);
            if (found) break;
        }
        for (uint32_t i = 0; i < held.vester_items.size() && !found; ++i) {
            for (uint32_t j = 0; j < pkg.vester_items.size() && !found; ++j) {
                const AccountId& who = held.vester_items[i].vester_pubkey;
                if (pkg.vester_items[j].vester_pubkey != who) continue;
                if (!fresh(who, ViolationType::DoubleVest, pkg.base_view_sn)) continue;
                found = emit(who, std::pair{vest_proof_at(held, i), vest_proof_at(pkg, j)});
            }
        }
    }

    if (rng.chance(config.audit_ratio)) {
        Digest full = package_digest(pkg);
        bool already = false;
        for (const auto& held : audit_buffer) {
            if (package_digest(held) == full) {
                already = true;
                break;
            }
        }
        if (!already) {
            audit_buffer.push_back(pkg);
            if (audit_buffer.size() > config.audit_cap)
                audit_buffer.erase(audit_buffer.begin());
        }
    }
    return found;
}

void NodeState::blacklist_check(const AccountId& actor, SeqNo acted_sn,
                                const Digest& acted_hash) {
    auto it = promoted_baseviews.find(acted_sn);
    if (it == promoted_baseviews.end() || it->second == acted_hash) return;
    blacklist.try_emplace(actor, promotions);
}

std::optional<BaseviewAgreement> NodeState::sign_agreement(const SignatureScheme& scheme,
                                                           SeqNo sn, const Digest& hash,
                                                           const AccountId& sender) {
    if (sn != baseview.sn || hash != baseview.hash) return std::nullopt;
    BaseviewAgreement a;
    a.baseview_sn = sn;
    a.baseview_hash = hash;
    a.sender = sender;
    a.receiver = identity.pub;
    a.receiver_signature = scheme.sign(identity.sec, agreement_signing_bytes(a));
    return a;
}

void NodeState::archive_proof(const BaseviewAgreement& agreement, const TxPackage& effecting,
                              const TxPackage& successor) {
    archive.push_back(ReceptionEvidence{agreement, {effecting, successor}});
}

bool verify_agreement(const SignatureScheme& scheme, const BaseviewAgreement& a) {
    return scheme.verify(a.receiver, agreement_signing_bytes(a), a.receiver_signature);
}

bool verify_reception_evidence(const SignatureScheme& scheme, const BalanceView& agreed_base,
                               const ReceptionEvidence& evidence, const AccountId& receiver,
                               Amount min_credit, const ConsensusParams& params,
                               Amount total_supply) {
    if (!verify_agreement(scheme, evidence.agreement)) return false;
    if (evidence.agreement.receiver != receiver) return false;
    if (evidence.agreement.baseview_sn != agreed_base.sn ||
        evidence.agreement.baseview_hash != agreed_base.hash)
        return false;
    if (evidence.packages.size() != 2) return false;

    auto v1 = apply_tx_package_51(scheme, agreed_base, evidence.packages[0], params, total_supply,
                                  evidence.packages[0].timestamp);
    if (!v1) return false;
    Amount before = agreed_base.balance_of(receiver);
    Amount after = v1->balance_of(receiver);
    if (after < checked_add(before, min_credit)) return false;

    auto v2 = apply_tx_package_51(scheme, *v1, evidence.packages[1], params, total_supply,
                                  evidence.packages[1].timestamp);
    return v2.has_value();
}

}  // namespace ccsim
