#include "ccsim/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace ccsim {

Amount checked_add(Amount a, Amount b) {
    Amount s = a + b;
    if (s < a) throw std::overflow_error("amount overflow in add");
    return s;
}

Amount checked_sub(Amount a, Amount b) {
    if (b > a) throw std::underflow_error("amount underflow in sub");
    return a - b;
}

Amount mul_div(Amount value, Amount num, Amount den) {
    if (den == 0) throw std::invalid_argument("mul_div by zero");
    unsigned __int128 p = static_cast<unsigned __int128>(value) * num;
    unsigned __int128 q = p / den;
    if (q > static_cast<unsigned __int128>(UINT64_MAX))
        throw std::overflow_error("amount overflow in mul_div");
    return static_cast<Amount>(q);
}

// ---------------------------------------------------------------------------
// BalanceView

const BalanceRecord* BalanceView::find(const AccountId& id) const {
    auto it = std::lower_bound(records.begin(), records.end(), id,
                               [](const BalanceRecord& r, const AccountId& k) { return r.pubkey < k; });
    if (it != records.end() && it->pubkey == id) return &*it;
    return nullptr;
}

Amount BalanceView::balance_of(const AccountId& id) const {
    const BalanceRecord* r = find(id);
    return r ? r->balance : 0;
}

Amount BalanceView::total() const {
    Amount sum = recycled.balance;
    for (const auto& r : records) sum = checked_add(sum, r.balance);
    return sum;
}

size_t BalanceView::nonzero_accounts() const {
    return static_cast<size_t>(
        std::count_if(records.begin(), records.end(), [](const BalanceRecord& r) { return r.balance > 0; }));
}

// ---------------------------------------------------------------------------
// Serialization

static void put_record(ByteWriter& w, const BalanceRecord& r) {
    w.fixed32(r.pubkey.bytes);
    w.u64(r.balance);
    w.u64(r.time_last_activity);
}

static BalanceRecord get_record(ByteReader& r) {
    BalanceRecord rec;
    rec.pubkey.bytes = r.fixed32();
    rec.balance = r.u64();
    rec.time_last_activity = r.u64();
    return rec;
}

Bytes serialize(const BalanceRecord& v) {
    ByteWriter w;
    put_record(w, v);
    return w.take();
}

template <>
BalanceRecord deserialize<BalanceRecord>(std::span<const uint8_t> data) {
    ByteReader r(data);
    BalanceRecord rec = get_record(r);
    r.expect_done();
    return rec;
}

static void put_view_prefix(ByteWriter& w, const BalanceView& v) {
    w.u64(v.sn);
    w.u64(v.base_view_sn);
    w.fixed32(v.base_view_hash.bytes);
    w.fixed32(v.tx_package_51_hash.bytes);
    w.u32(static_cast<uint32_t>(v.records.size()));
    for (const auto& rec : v.records) put_record(w, rec);
    put_record(w, v.recycled);
}

Bytes serialize(const BalanceView& v) {
    ByteWriter w;
    put_view_prefix(w, v);
    w.fixed32(v.hash.bytes);
    return w.take();
}

template <>
BalanceView deserialize<BalanceView>(std::span<const uint8_t> data) {
    ByteReader r(data);
    BalanceView v;
    v.sn = r.u64();
    v.base_view_sn = r.u64();
    v.base_view_hash.bytes = r.fixed32();
    v.tx_package_51_hash.bytes = r.fixed32();
    uint32_t n = r.u32();
    v.records.reserve(n);
    for (uint32_t i = 0; i < n; ++i) v.records.push_back(get_record(r));
    v.recycled = get_record(r);
    v.hash.bytes = r.fixed32();
    r.expect_done();
    return v;
}

Digest view_hash(const BalanceView& view) {
    ByteWriter w;
    put_view_prefix(w, view);
    return digest_of(w);
}

void seal_view(BalanceView& view) { view.hash = view_hash(view); }

static void put_tx_body(ByteWriter& w, const Transaction& tx) {
    w.u64(tx.base_view_sn);
    w.fixed32(tx.base_view_hash.bytes);
    w.fixed32(tx.sender.bytes);
    w.fixed32(tx.receiver.bytes);
    w.u64(tx.volume);
    w.u64(tx.tx_fee);
    w.u64(tx.timestamp);
}

Bytes tx_signing_bytes(const Transaction& tx) {
    ByteWriter w;
    put_tx_body(w, tx);
    return w.take();
}

Bytes serialize(const Transaction& v) {
    ByteWriter w;
    put_tx_body(w, v);
    w.var_bytes(v.signature);
    return w.take();
}

static Transaction get_tx(ByteReader& r) {
    Transaction tx;
    tx.base_view_sn = r.u64();
    tx.base_view_hash.bytes = r.fixed32();
    tx.sender.bytes = r.fixed32();
    tx.receiver.bytes = r.fixed32();
    tx.volume = r.u64();
    tx.tx_fee = r.u64();
    tx.timestamp = r.u64();
    tx.signature = r.var_bytes();
    return tx;
}

template <>
Transaction deserialize<Transaction>(std::span<const uint8_t> data) {
    ByteReader r(data);
    Transaction tx = get_tx(r);
    r.expect_done();
    return tx;
}

Transaction make_transaction(const SignatureScheme& scheme, const KeyPair& sender,
                             const AccountId& receiver, Amount volume, Amount fee,
                             SeqNo base_sn, const Digest& base_hash, Tick now) {
    Transaction tx;
    tx.base_view_sn = base_sn;
    tx.base_view_hash = base_hash;
    tx.sender = sender.pub;
    tx.receiver = receiver;
    tx.volume = volume;
    tx.tx_fee = fee;
    tx.timestamp = now;
    tx.signature = scheme.sign(sender.sec, tx_signing_bytes(tx));
    return tx;
}

bool verify_transaction_signature(const SignatureScheme& scheme, const Transaction& tx) {
    return scheme.verify(tx.sender, tx_signing_bytes(tx), tx.signature);
}

static void put_item(ByteWriter& w, const VesterItem& it) {
    w.fixed32(it.vester_pubkey.bytes);
    w.var_bytes(it.signature);
}

static VesterItem get_item(ByteReader& r) {
    VesterItem it;
    it.vester_pubkey.bytes = r.fixed32();
    it.signature = r.var_bytes();
    return it;
}

Bytes serialize(const VesterItem& v) {
    ByteWriter w;
    put_item(w, v);
    return w.take();
}

template <>
VesterItem deserialize<VesterItem>(std::span<const uint8_t> data) {
    ByteReader r(data);
    VesterItem it = get_item(r);
    r.expect_done();
    return it;
}

static void put_header(ByteWriter& w, const PackageHeader& h) {
    w.u64(h.base_view_sn);
    w.fixed32(h.base_view_hash.bytes);
    w.fixed32(h.agent_pubkey.bytes);
    w.fixed32(h.payload_digest.bytes);
    w.u64(h.timestamp);
}

static PackageHeader get_header(ByteReader& r) {
    PackageHeader h;
    h.base_view_sn = r.u64();
    h.base_view_hash.bytes = r.fixed32();
    h.agent_pubkey.bytes = r.fixed32();
    h.payload_digest.bytes = r.fixed32();
    h.timestamp = r.u64();
    return h;
}

Bytes serialize(const PackageHeader& v) {
    ByteWriter w;
    put_header(w, v);
    return w.take();
}

template <>
PackageHeader deserialize<PackageHeader>(std::span<const uint8_t> data) {
    ByteReader r(data);
    PackageHeader h = get_header(r);
    r.expect_done();
    return h;
}

Bytes header_signing_bytes(const PackageHeader& h) { return serialize(h); }

Digest payload_digest(const std::vector<ViolationReport>& reports,
                      const std::vector<Transaction>& txs) {
    ByteWriter w;
    w.u32(static_cast<uint32_t>(reports.size()));
    for (const auto& rep : reports) {
        Bytes b = serialize(rep);
        w.var_bytes(b);
    }
    w.u32(static_cast<uint32_t>(txs.size()));
    for (const auto& tx : txs) {
        put_tx_body(w, tx);
        w.var_bytes(tx.signature);
    }
    return digest_of(w);
}

PackageHeader TxPackage::header() const {
    PackageHeader h;
    h.base_view_sn = base_view_sn;
    h.base_view_hash = base_view_hash;
    h.agent_pubkey = agent_pubkey;
    h.payload_digest = payload_digest(reports, transactions);
    h.timestamp = timestamp;
    return h;
}

Digest header_digest(const PackageHeader& h) { return sha256(serialize(h)); }
Digest header_digest(const TxPackage& pkg) { return header_digest(pkg.header()); }

Bytes serialize(const TxPackage& v) {
    ByteWriter w;
    w.u64(v.base_view_sn);
    w.fixed32(v.base_view_hash.bytes);
    w.fixed32(v.agent_pubkey.bytes);
    w.u32(static_cast<uint32_t>(v.reports.size()));
    for (const auto& rep : v.reports) {
        Bytes b = serialize(rep);
        w.var_bytes(b);
    }
    w.u32(static_cast<uint32_t>(v.transactions.size()));
    for (const auto& tx : v.transactions) {
        put_tx_body(w, tx);
        w.var_bytes(tx.signature);
    }
    w.u64(v.timestamp);
    w.var_bytes(v.agent_signature);
    w.u8(v.flag_51 ? 1 : 0);
    w.u32(static_cast<uint32_t>(v.vester_items.size()));
    for (const auto& it : v.vester_items) put_item(w, it);
    w.u64(v.last_item_timestamp);
    return w.take();
}

template <>
TxPackage deserialize<TxPackage>(std::span<const uint8_t> data) {
    ByteReader r(data);
    TxPackage p;
    p.base_view_sn = r.u64();
    p.base_view_hash.bytes = r.fixed32();
    p.agent_pubkey.bytes = r.fixed32();
    uint32_t nr = r.u32();
    p.reports.reserve(nr);
    for (uint32_t i = 0; i < nr; ++i) {
        Bytes b = r.var_bytes();
        p.reports.push_back(deserialize<ViolationReport>(b));
    }
    uint32_t nt = r.u32();
    p.transactions.reserve(nt);
    for (uint32_t i = 0; i < nt; ++i) p.transactions.push_back(get_tx(r));
    p.timestamp = r.u64();
    p.agent_signature = r.var_bytes();
    p.flag_51 = r.u8() != 0;
    uint32_t ni = r.u32();
    p.vester_items.reserve(ni);
    for (uint32_t i = 0; i < ni; ++i) p.vester_items.push_back(get_item(r));
    p.last_item_timestamp = r.u64();
    r.expect_done();
    return p;
}

Digest package_digest(const TxPackage& pkg) { return sha256(serialize(pkg)); }

TxPackage make_package(const SignatureScheme& scheme, const KeyPair& agent,
                       SeqNo base_sn, const Digest& base_hash,
                       std::vector<ViolationReport> reports,
                       std::vector<Transaction> txs, Tick now) {
    TxPackage p;
    p.base_view_sn = base_sn;
    p.base_view_hash = base_hash;
    p.agent_pubkey = agent.pub;
    p.reports = std::move(reports);
    p.transactions = std::move(txs);
    p.timestamp = now;
    p.agent_signature = scheme.sign(agent.sec, header_signing_bytes(p.header()));
    p.last_item_timestamp = now;
    return p;
}

bool verify_agent_signature(const SignatureScheme& scheme, const TxPackage& pkg) {
    return scheme.verify(pkg.agent_pubkey, header_signing_bytes(pkg.header()), pkg.agent_signature);
}

std::optional<AppendVesterError> append_vester(const SignatureScheme& scheme, TxPackage& pkg,
                                               const KeyPair& vester, Tick now) {
    for (const auto& it : pkg.vester_items) {
        if (it.vester_pubkey == vester.pub) return AppendVesterError::DuplicateVester;
    }
    const Signature& predecessor =
        pkg.vester_items.empty() ? pkg.agent_signature : pkg.vester_items.back().signature;
    VesterItem item;
    item.vester_pubkey = vester.pub;
    item.signature = scheme.sign(vester.sec, predecessor);
    pkg.vester_items.push_back(std::move(item));
    pkg.last_item_timestamp = now;
    return std::nullopt;
}

bool verify_vester_chain(const SignatureScheme& scheme, const TxPackage& pkg) {
    const Signature* predecessor = &pkg.agent_signature;
    for (const auto& it : pkg.vester_items) {
        if (!scheme.verify(it.vester_pubkey, *predecessor, it.signature)) return false;
        predecessor = &it.signature;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Violation reports

static void put_package_proof(ByteWriter& w, const PackageProof& p) {
    put_header(w, p.header);
    w.var_bytes(p.agent_signature);
}

static PackageProof get_package_proof(ByteReader& r) {
    PackageProof p;
    p.header = get_header(r);
    p.agent_signature = r.var_bytes();
    return p;
}

static void put_vest_proof(ByteWriter& w, const VestProof& p) {
    put_header(w, p.header);
    w.var_bytes(p.agent_signature);
    w.u32(static_cast<uint32_t>(p.vester_items.size()));
    for (const auto& it : p.vester_items) put_item(w, it);
    w.u32(p.item_index);
}

static VestProof get_vest_proof(ByteReader& r) {
    VestProof p;
    p.header = get_header(r);
    p.agent_signature = r.var_bytes();
    uint32_t n = r.u32();
    p.vester_items.reserve(n);
    for (uint32_t i = 0; i < n; ++i) p.vester_items.push_back(get_item(r));
    p.item_index = r.u32();
    return p;
}

static void put_report_body(ByteWriter& w, const ViolationReport& rep) {
    w.u8(static_cast<uint8_t>(rep.violation_type));
    w.fixed32(rep.reporter.bytes);
    w.fixed32(rep.accused.bytes);
    if (const auto* pp = std::get_if<std::pair<PackageProof, PackageProof>>(&rep.proofs)) {
        w.u8(0);
        put_package_proof(w, pp->first);
        put_package_proof(w, pp->second);
    } else {
        const auto& vp = std::get<std::pair<VestProof, VestProof>>(rep.proofs);
        w.u8(1);
        put_vest_proof(w, vp.first);
        put_vest_proof(w, vp.second);
    }
    w.u64(rep.timestamp);
}

Bytes report_signing_bytes(const ViolationReport& r) {
    ByteWriter w;
    put_report_body(w, r);
    return w.take();
}

Bytes serialize(const ViolationReport& v) {
    ByteWriter w;
    put_report_body(w, v);
    w.var_bytes(v.signature);
    return w.take();
}

template <>
ViolationReport deserialize<ViolationReport>(std::span<const uint8_t> data) {
    ByteReader r(data);
    ViolationReport rep;
    rep.violation_type = static_cast<ViolationType>(r.u8());
    rep.reporter.bytes = r.fixed32();
    rep.accused.bytes = r.fixed32();
    uint8_t kind = r.u8();
    if (kind == 0) {
        PackageProof a = get_package_proof(r);
        PackageProof b = get_package_proof(r);
        rep.proofs = std::make_pair(std::move(a), std::move(b));
    } else if (kind == 1) {
        VestProof a = get_vest_proof(r);
        VestProof b = get_vest_proof(r);
        rep.proofs = std::make_pair(std::move(a), std::move(b));
    } else {
        throw DeserializeError("unknown proof kind");
    }
    rep.timestamp = r.u64();
    rep.signature = r.var_bytes();
    r.expect_done();
    return rep;
}

ViolationReport make_report(const SignatureScheme& scheme, const KeyPair& reporter,
                            const AccountId& accused, ViolationProofs proofs, Tick now) {
    ViolationReport rep;
    rep.violation_type = std::holds_alternative<std::pair<PackageProof, PackageProof>>(proofs)
                             ? ViolationType::DoublePackage
                             : ViolationType::DoubleVest;
    rep.reporter = reporter.pub;
    rep.accused = accused;
    rep.proofs = std::move(proofs);
    rep.timestamp = now;
    rep.signature = scheme.sign(reporter.sec, report_signing_bytes(rep));
    return rep;
}

// ---------------------------------------------------------------------------
// Agreements and registrations

Bytes agreement_signing_bytes(const BaseviewAgreement& a) {
    ByteWriter w;
    w.u64(a.baseview_sn);
    w.fixed32(a.baseview_hash.bytes);
    w.fixed32(a.sender.bytes);
    return w.take();
}

Bytes serialize(const BaseviewAgreement& v) {
    ByteWriter w;
    w.u64(v.baseview_sn);
    w.fixed32(v.baseview_hash.bytes);
    w.fixed32(v.sender.bytes);
    w.fixed32(v.receiver.bytes);
    w.var_bytes(v.receiver_signature);
    return w.take();
}

template <>
BaseviewAgreement deserialize<BaseviewAgreement>(std::span<const uint8_t> data) {
    ByteReader r(data);
    BaseviewAgreement a;
    a.baseview_sn = r.u64();
    a.baseview_hash.bytes = r.fixed32();
    a.sender.bytes = r.fixed32();
    a.receiver.bytes = r.fixed32();
    a.receiver_signature = r.var_bytes();
    r.expect_done();
    return a;
}

Bytes registration_signing_bytes(const RegistrationMessage& m) {
    ByteWriter w;
    w.fixed32(m.old_pubkey.bytes);
    w.fixed32(m.new_pubkey.bytes);
    return w.take();
}

Bytes serialize(const RegistrationMessage& v) {
    ByteWriter w;
    w.fixed32(v.old_pubkey.bytes);
    w.fixed32(v.new_pubkey.bytes);
    w.var_bytes(v.signature);
    return w.take();
}

template <>
RegistrationMessage deserialize<RegistrationMessage>(std::span<const uint8_t> data) {
    ByteReader r(data);
    RegistrationMessage m;
    m.old_pubkey.bytes = r.fixed32();
    m.new_pubkey.bytes = r.fixed32();
    m.signature = r.var_bytes();
    r.expect_done();
    return m;
}

}  // namespace ccsim
