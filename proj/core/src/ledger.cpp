#include "ccsim/ledger.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ccsim {

namespace {

std::atomic<uint64_t> g_conservation_checks{0};
std::atomic<uint64_t> g_conservation_failures{0};

void check_conservation(Amount before, const BalanceView& after) {
    g_conservation_checks.fetch_add(1, std::memory_order_relaxed);
    if (after.total() != before) {
        g_conservation_failures.fetch_add(1, std::memory_order_relaxed);
        throw std::logic_error("ledger transition broke conservation");
    }
}

// Mutable working copy of a view's accounts keyed by pubkey.
struct WorkingView {
    std::map<AccountId, BalanceRecord> accounts;
    BalanceRecord recycled;

    explicit WorkingView(const BalanceView& v) : recycled(v.recycled) {
        for (const auto& r : v.records) accounts.emplace(r.pubkey, r);
    }

    Amount balance(const AccountId& id) const {
        auto it = accounts.find(id);
        return it == accounts.end() ? 0 : it->second.balance;
    }

    void credit(const AccountId& id, Amount amount, Tick now) {
        auto [it, inserted] = accounts.try_emplace(id, BalanceRecord{id, 0, now});
        it->second.balance = checked_add(it->second.balance, amount);
        it->second.time_last_activity = now;
    }

    void debit(const AccountId& id, Amount amount, Tick now) {
        auto it = accounts.find(id);
        if (it == accounts.end() || it->second.balance < amount)
            throw std::logic_error("debit without funds");
        it->second.balance -= amount;
        it->second.time_last_activity = now;
    }

    BalanceView materialize(SeqNo sn, SeqNo base_sn, const Digest& base_hash,
                            const Digest& pkg_hash) const {
        BalanceView v;
        v.sn = sn;
        v.base_view_sn = base_sn;
        v.base_view_hash = base_hash;
        v.tx_package_51_hash = pkg_hash;
        v.records.reserve(accounts.size());
        for (const auto& [id, rec] : accounts) v.records.push_back(rec);  // map order == pubkey order
        v.recycled = recycled;
        seal_view(v);
        return v;
    }
};

TxCheck validate_against(const SignatureScheme& scheme, const WorkingView& w,
                         SeqNo base_sn, const Digest& base_hash, const Transaction& tx) {
    if (tx.base_view_sn != base_sn || tx.base_view_hash != base_hash)
        return TxCheck::BaseviewMismatch;
    if (tx.receiver == recycled_key() || tx.sender == recycled_key()) return TxCheck::BadReceiver;
    auto it = w.accounts.find(tx.sender);
    if (it == w.accounts.end()) return TxCheck::UnknownSender;
    if (!verify_transaction_signature(scheme, tx)) return TxCheck::BadSignature;
    unsigned __int128 need = static_cast<unsigned __int128>(tx.volume) + tx.tx_fee;
    if (need > it->second.balance) return TxCheck::InsufficientFunds;
    return TxCheck::Ok;
}

}  // namespace

const char* to_string(TxCheck c) {
    switch (c) {
        case TxCheck::Ok: return "ok";
        case TxCheck::BaseviewMismatch: return "baseview_mismatch";
        case TxCheck::UnknownSender: return "unknown_sender";
        case TxCheck::BadSignature: return "bad_signature";
        case TxCheck::InsufficientFunds: return "insufficient_funds";
        case TxCheck::BadReceiver: return "bad_receiver";
    }
    return "?";
}

TxCheck validate_transaction(const SignatureScheme& scheme, const BalanceView& view,
                             const Transaction& tx) {
    WorkingView w(view);
    return validate_against(scheme, w, view.sn, view.hash, tx);
}

Amount FeeSplit::total() const {
    Amount t = checked_add(agent_share, dust);
    for (const auto& [id, v] : vester_shares) t = checked_add(t, v);
    return t;
}

FeeSplit split_fees(Amount total_fees, const AccountId& agent,
                    const std::vector<std::pair<AccountId, Amount>>& vesters) {
    FeeSplit out;
    if (total_fees == 0) {
        for (const auto& [id, stake] : vesters) out.vester_shares.emplace_back(id, 0);
        return out;
    }
    out.agent_share = total_fees / 2;
    Amount rest = total_fees - out.agent_share;
    (void)agent;

    Amount stake_sum = 0;
    for (const auto& [id, stake] : vesters) stake_sum = checked_add(stake_sum, stake);
    if (vesters.empty() || stake_sum == 0) {
        // No way to divide proportionally; the remainder is dust.
        for (const auto& [id, stake] : vesters) out.vester_shares.emplace_back(id, 0);
        out.dust = rest;
        return out;
    }

    // Largest-remainder apportionment of `rest` by stake. Ties broken by
    // list position so the result is a pure function of the input order.
    struct Part {
        size_t idx;
        Amount floor_share;
        unsigned __int128 remainder;
    };
    std::vector<Part> parts;
    parts.reserve(vesters.size());
    Amount assigned = 0;
    for (size_t i = 0; i < vesters.size(); ++i) {
        unsigned __int128 prod = static_cast<unsigned __int128>(rest) * vesters[i].second;
        Amount fl = static_cast<Amount>(prod / stake_sum);
        parts.push_back({i, fl, prod % stake_sum});
        assigned = checked_add(assigned, fl);
    }
    Amount leftover = rest - assigned;
    std::vector<size_t> order(parts.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return parts[a].remainder > parts[b].remainder;
    });
    for (size_t k = 0; k < order.size() && leftover > 0; ++k, --leftover) {
        parts[order[k]].floor_share += 1;
    }
    out.vester_shares.resize(vesters.size());
    for (const auto& p : parts)
        out.vester_shares[p.idx] = {vesters[p.idx].first, p.floor_share};
    out.dust = leftover;  // zero unless fewer vesters than leftover units, impossible here
    return out;
}

Amount vesting_stake(const BalanceView& base, const TxPackage& pkg) {
    std::set<AccountId> seen;
    Amount sum = 0;
    for (const auto& it : pkg.vester_items) {
        if (seen.insert(it.vester_pubkey).second)
            sum = checked_add(sum, base.balance_of(it.vester_pubkey));
    }
    return sum;
}

std::optional<BalanceView> apply_tx_package_51(const SignatureScheme& scheme,
                                               const BalanceView& base, const TxPackage& pkg,
                                               const ConsensusParams& params, Amount total_supply,
                                               Tick now, ApplyStats* stats) {
    if (!pkg.flag_51) return std::nullopt;
    if (pkg.base_view_sn != base.sn || pkg.base_view_hash != base.hash) return std::nullopt;
    if (!verify_agent_signature(scheme, pkg)) return std::nullopt;
    if (!verify_vester_chain(scheme, pkg)) return std::nullopt;
    if (!params.above_threshold(vesting_stake(base, pkg), total_supply)) return std::nullopt;

    Amount before = base.total();
    WorkingView w(base);
    ApplyStats local;

    // Violation reports first: they carry higher priority than common
    // transactions. Each offense is penalized at most once per package.
    std::set<OffenseKey> penalized;
    for (const auto& rep : pkg.reports) {
        if (!verify_violation(scheme, rep) || !penalized.insert(offense_key(rep)).second) {
            ++local.skipped_reports;
            continue;
        }
        auto it = w.accounts.find(rep.accused);
        Amount bal = it == w.accounts.end() ? 0 : it->second.balance;
        Amount penalty = bal / 2;
        if (it != w.accounts.end()) {
            it->second.balance -= penalty;
            it->second.time_last_activity = now;
        }
        w.recycled.balance = checked_add(w.recycled.balance, penalty);
        w.recycled.time_last_activity = now;
        ++local.applied_reports;
    }

    for (const auto& tx : pkg.transactions) {
        if (validate_against(scheme, w, pkg.base_view_sn, pkg.base_view_hash, tx) != TxCheck::Ok) {
            ++local.skipped_txs;
            continue;
        }
        w.debit(tx.sender, checked_add(tx.volume, tx.tx_fee), now);
        w.credit(tx.receiver, tx.volume, now);
        local.fees_collected = checked_add(local.fees_collected, tx.tx_fee);
        ++local.applied_txs;
    }

    if (local.fees_collected > 0) {
        std::vector<std::pair<AccountId, Amount>> vesters;
        std::set<AccountId> seen;
        for (const auto& it : pkg.vester_items) {
            if (seen.insert(it.vester_pubkey).second)
                vesters.emplace_back(it.vester_pubkey, base.balance_of(it.vester_pubkey));
        }
        FeeSplit split = split_fees(local.fees_collected, pkg.agent_pubkey, vesters);
        if (split.agent_share > 0) w.credit(pkg.agent_pubkey, split.agent_share, now);
        for (const auto& [id, share] : split.vester_shares) {
            if (share > 0) w.credit(id, share, now);
        }
        if (split.dust > 0) {
            w.recycled.balance = checked_add(w.recycled.balance, split.dust);
            w.recycled.time_last_activity = now;
        }
    }

    BalanceView next = w.materialize(base.sn + 1, base.sn, base.hash, package_digest(pkg));
    check_conservation(before, next);
    if (stats) *stats = local;
    return next;
}

namespace {

// A verified single vesting: which agent content, which chain position.
struct VestFact {
    SeqNo sn;
    Digest agent_header;
};

bool check_vest_proof(const SignatureScheme& scheme, const AccountId& accused,
                      const VestProof& p, VestFact& out) {
    if (p.item_index >= p.vester_items.size()) return false;
    if (!scheme.verify(p.header.agent_pubkey, header_signing_bytes(p.header), p.agent_signature))
        return false;
    const Signature* predecessor = &p.agent_signature;
    for (uint32_t i = 0; i <= p.item_index; ++i) {
        const auto& it = p.vester_items[i];
        if (!scheme.verify(it.vester_pubkey, *predecessor, it.signature)) return false;
        predecessor = &it.signature;
    }
    if (p.vester_items[p.item_index].vester_pubkey != accused) return false;
    out.sn = p.header.base_view_sn;
    out.agent_header = header_digest(p.header);
    return true;
}

// True iff the shorter proof's items are an exact prefix of the longer
// proof's, which places both accused items inside one chain lineage.
// Timestamps are not signed, so only the signed fields identify an item.
bool same_chain_lineage(const VestProof& a, const VestProof& b) {
    const VestProof& s = a.item_index <= b.item_index ? a : b;
    const VestProof& l = a.item_index <= b.item_index ? b : a;
    for (uint32_t i = 0; i <= s.item_index; ++i) {
        if (s.vester_items[i].vester_pubkey != l.vester_items[i].vester_pubkey ||
            s.vester_items[i].signature != l.vester_items[i].signature)
            return false;
    }
    return true;
}

}  // namespace

OffenseKey offense_key(const ViolationReport& report) {
    SeqNo sn = std::visit([](const auto& pair) { return pair.first.header.base_view_sn; },
                          report.proofs);
    return {report.accused, static_cast<uint8_t>(report.violation_type), sn};
}

bool verify_violation(const SignatureScheme& scheme, const ViolationReport& report) {
    if (!scheme.verify(report.reporter, report_signing_bytes(report), report.signature))
        return false;
    if (const auto* pp = std::get_if<std::pair<PackageProof, PackageProof>>(&report.proofs)) {
        const auto& [a, b] = *pp;
        if (report.violation_type != ViolationType::DoublePackage) return false;
        if (a.header.agent_pubkey != report.accused || b.header.agent_pubkey != report.accused)
            return false;
        if (a.header.base_view_sn != b.header.base_view_sn) return false;
        if (!scheme.verify(report.accused, header_signing_bytes(a.header), a.agent_signature))
            return false;
        if (!scheme.verify(report.accused, header_signing_bytes(b.header), b.agent_signature))
            return false;
        // Two identical artifacts witness nothing.
        return header_digest(a.header) != header_digest(b.header);
    }
    const auto& [a, b] = std::get<std::pair<VestProof, VestProof>>(report.proofs);
    if (report.violation_type != ViolationType::DoubleVest) return false;
    VestFact fa, fb;
    if (!check_vest_proof(scheme, report.accused, a, fa)) return false;
    if (!check_vest_proof(scheme, report.accused, b, fb)) return false;
    if (fa.sn != fb.sn) return false;
    // Conflict: vested two different agent packages at one sn, or twice
    // within one chain lineage. Re-appending to a heavier chain version of
    // the same package after one's own item was dropped is legal, so two
    // sightings in divergent chains of one package witness nothing.
    if (fa.agent_header != fb.agent_header) return true;
    return a.item_index != b.item_index && same_chain_lineage(a, b);
}

std::optional<BalanceView> apply_violation(const SignatureScheme& scheme, const BalanceView& view,
                                           const ViolationReport& report, Tick now) {
    if (!verify_violation(scheme, report)) return std::nullopt;
    Amount before = view.total();
    WorkingView w(view);
    auto it = w.accounts.find(report.accused);
    Amount bal = it == w.accounts.end() ? 0 : it->second.balance;
    Amount penalty = bal / 2;
    if (it != w.accounts.end()) {
        it->second.balance -= penalty;
        it->second.time_last_activity = now;
    }
    w.recycled.balance = checked_add(w.recycled.balance, penalty);
    w.recycled.time_last_activity = now;
    BalanceView next = w.materialize(view.sn, view.base_view_sn, view.base_view_hash,
                                     view.tx_package_51_hash);
    check_conservation(before, next);
    return next;
}

std::pair<Amount, Amount> DeflationPolicy::rate(uint32_t d) const {
    if (d == 0) return {0, 1};
    // base * 2^(d-1), capped at 1.
    Amount num = base_rate_num;
    for (uint32_t i = 1; i < d; ++i) {
        if (num >= base_rate_den) break;
        num = checked_add(num, num);
    }
    if (num > base_rate_den) num = base_rate_den;
    return {num, base_rate_den};
}

BalanceView apply_deflation(const BalanceView& view, Tick prev_now, Tick now,
                            const DeflationPolicy& policy) {
    Amount before = view.total();
    BalanceView next = view;
    Amount taxed_total = 0;
    for (auto& rec : next.records) {
        if (rec.time_last_activity > now) continue;
        uint64_t d_now = (now - rec.time_last_activity) / policy.decade_length;
        uint64_t d_prev = prev_now <= rec.time_last_activity
                              ? 0
                              : (prev_now - rec.time_last_activity) / policy.decade_length;
        for (uint64_t d = d_prev + 1; d <= d_now; ++d) {
            auto [num, den] = policy.rate(static_cast<uint32_t>(std::min<uint64_t>(d, 64)));
            Amount tax = mul_div(rec.balance, num, den);
            rec.balance -= tax;
            taxed_total = checked_add(taxed_total, tax);
        }
        // time_last_activity untouched: inactivity keeps accruing.
    }
    if (taxed_total > 0) {
        next.recycled.balance = checked_add(next.recycled.balance, taxed_total);
        next.recycled.time_last_activity = now;
    }
    seal_view(next);
    check_conservation(before, next);
    return next;
}

std::optional<BalanceView> redistribute_recycled(const BalanceView& view, Tick now,
                                                 RedistributeError* err) {
    if (view.recycled.balance == 0) {
        if (err) *err = RedistributeError::NothingToRedistribute;
        return std::nullopt;
    }
    Amount before = view.total();
    Amount pot = view.recycled.balance;
    Amount stake_sum = 0;
    for (const auto& r : view.records) stake_sum = checked_add(stake_sum, r.balance);

    BalanceView next = view;
    if (stake_sum == 0) {
        // Nobody to receive proportionally; the pot stays recycled.
        seal_view(next);
        check_conservation(before, next);
        return next;
    }

    struct Part {
        size_t idx;
        Amount share;
        unsigned __int128 remainder;
    };
    std::vector<Part> parts;
    parts.reserve(next.records.size());
    Amount assigned = 0;
    for (size_t i = 0; i < next.records.size(); ++i) {
        unsigned __int128 prod = static_cast<unsigned __int128>(pot) * next.records[i].balance;
        Amount fl = static_cast<Amount>(prod / stake_sum);
        parts.push_back({i, fl, prod % stake_sum});
        assigned = checked_add(assigned, fl);
    }
    Amount leftover = pot - assigned;
    std::vector<size_t> order(parts.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return parts[a].remainder > parts[b].remainder;
    });
    for (size_t k = 0; k < order.size() && leftover > 0; ++k) {
        if (next.records[parts[order[k]].idx].balance == 0) continue;  // dust goes to holders
        parts[order[k]].share += 1;
        --leftover;
    }
    for (const auto& p : parts) {
        if (p.share > 0) {
            next.records[p.idx].balance = checked_add(next.records[p.idx].balance, p.share);
            next.records[p.idx].time_last_activity = now;
        }
    }
    next.recycled.balance = leftover;
    next.recycled.time_last_activity = now;
    seal_view(next);
    check_conservation(before, next);
    return next;
}

uint64_t conservation_checks() { return g_conservation_checks.load(std::memory_order_relaxed); }
uint64_t conservation_failures() { return g_conservation_failures.load(std::memory_order_relaxed); }

}  // namespace ccsim
