#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ccsim/bytes.hpp"
#include "ccsim/crypto.hpp"

namespace ccsim {

// Atomic coin units. Default scenarios issue a total supply of 10^10 units.
using Amount = uint64_t;
using Tick = uint64_t;
using SeqNo = uint64_t;

constexpr Amount kDefaultTotalSupply = 10'000'000'000ULL;

// Checked arithmetic: amounts never overflow and never go negative.
Amount checked_add(Amount a, Amount b);
Amount checked_sub(Amount a, Amount b);
// floor(value * num / den) with 128-bit intermediates; den must be nonzero.
Amount mul_div(Amount value, Amount num, Amount den);

// ---------------------------------------------------------------------------
// Balance view

struct BalanceRecord {
    AccountId pubkey;
    Amount balance = 0;
    Tick time_last_activity = 0;

    bool operator==(const BalanceRecord&) const = default;
};

// Snapshot of every account's balance, chained to its predecessor by hash.
// Records are kept sorted ascending by pubkey bytes so that the view hash is
// independent of insertion order.
struct BalanceView {
    SeqNo sn = 0;
    SeqNo base_view_sn = 0;
    Digest base_view_hash;
    Digest tx_package_51_hash;
    std::vector<BalanceRecord> records;  // sorted by pubkey, excludes recycled
    BalanceRecord recycled{recycled_key(), 0, 0};
    Digest hash;

    bool operator==(const BalanceView&) const = default;

    const BalanceRecord* find(const AccountId& id) const;
    Amount balance_of(const AccountId& id) const;  // 0 if absent
    // Sum of all record balances plus the recycled record; throws on overflow.
    Amount total() const;
    size_t nonzero_accounts() const;
};

// Digest over the canonical serialization of everything before the hash field.
Digest view_hash(const BalanceView& view);
// Recomputes and stores the hash; records must already be sorted.
void seal_view(BalanceView& view);

// ---------------------------------------------------------------------------
// Transactions and packages

struct Transaction {
    SeqNo base_view_sn = 0;
    Digest base_view_hash;
    AccountId sender;
    AccountId receiver;
    Amount volume = 0;
    Amount tx_fee = 0;  // max fee the sender will pay
    Tick timestamp = 0;
    Signature signature;

    bool operator==(const Transaction&) const = default;
};

Bytes tx_signing_bytes(const Transaction& tx);
Transaction make_transaction(const SignatureScheme& scheme, const KeyPair& sender,
                             const AccountId& receiver, Amount volume, Amount fee,
                             SeqNo base_sn, const Digest& base_hash, Tick now);
bool verify_transaction_signature(const SignatureScheme& scheme, const Transaction& tx);

struct VesterItem {
    AccountId vester_pubkey;
    Signature signature;  // over the predecessor's signature bytes

    bool operator==(const VesterItem&) const = default;
};

// What the agent actually signs: the package identity. Transactions and
// violation reports enter through payload_digest, so two packages by one
// agent at one baseview_sn with different contents are distinguishable from
// the headers alone.
struct PackageHeader {
    SeqNo base_view_sn = 0;
    Digest base_view_hash;
    AccountId agent_pubkey;
    Digest payload_digest;
    Tick timestamp = 0;

    bool operator==(const PackageHeader&) const = default;
};

struct ViolationReport;  // below

// An agent's batch of transactions accumulating chained vester endorsements.
// Violation reports ride along with higher priority than common transactions.
struct TxPackage {
    SeqNo base_view_sn = 0;
    Digest base_view_hash;
    AccountId agent_pubkey;
    std::vector<ViolationReport> reports;
    std::vector<Transaction> transactions;
    Tick timestamp = 0;
    Signature agent_signature;
    bool flag_51 = false;
    std::vector<VesterItem> vester_items;
    Tick last_item_timestamp = 0;

    bool operator==(const TxPackage&) const = default;

    PackageHeader header() const;
};

Digest payload_digest(const std::vector<ViolationReport>& reports,
                      const std::vector<Transaction>& txs);
Bytes header_signing_bytes(const PackageHeader& h);
// Identity of the agent's package: digest of the signed header. Versions of
// one package that differ only in vester items share this digest.
Digest header_digest(const TxPackage& pkg);
Digest header_digest(const PackageHeader& h);
// Digest of the full serialization including vester items and flag.
Digest package_digest(const TxPackage& pkg);

TxPackage make_package(const SignatureScheme& scheme, const KeyPair& agent,
                       SeqNo base_sn, const Digest& base_hash,
                       std::vector<ViolationReport> reports,
                       std::vector<Transaction> txs, Tick now);
bool verify_agent_signature(const SignatureScheme& scheme, const TxPackage& pkg);

enum class AppendVesterError { DuplicateVester };

// Appends one chained endorsement: the new item signs the predecessor's
// signature bytes (the agent signature for the first item).
std::optional<AppendVesterError> append_vester(const SignatureScheme& scheme, TxPackage& pkg,
                                               const KeyPair& vester, Tick now);
// True iff every item i verifies over item i-1's signature (item 0 over the
// agent signature). Empty list is vacuously true. Never throws.
bool verify_vester_chain(const SignatureScheme& scheme, const TxPackage& pkg);

// ---------------------------------------------------------------------------
// Violation reports

enum class ViolationType : uint8_t { DoublePackage = 0, DoubleVest = 1 };

// Self-contained proof that an agent signed a second package at one
// baseview_sn: two signed headers.
struct PackageProof {
    PackageHeader header;
    Signature agent_signature;

    bool operator==(const PackageProof&) const = default;
};

// Evidence of one vesting: the signed header plus the chain up to and
// including the accused item. item_index addresses the accused VesterItem.
struct VestProof {
    PackageHeader header;
    Signature agent_signature;
    std::vector<VesterItem> vester_items;
    uint32_t item_index = 0;

    bool operator==(const VestProof&) const = default;
};

using ViolationProofs = std::variant<std::pair<PackageProof, PackageProof>,
                                     std::pair<VestProof, VestProof>>;

struct ViolationReport {
    ViolationType violation_type = ViolationType::DoublePackage;
    AccountId reporter;
    AccountId accused;
    ViolationProofs proofs;
    Tick timestamp = 0;
    Signature signature;

    bool operator==(const ViolationReport&) const = default;
};

Bytes report_signing_bytes(const ViolationReport& r);
ViolationReport make_report(const SignatureScheme& scheme, const KeyPair& reporter,
                            const AccountId& accused, ViolationProofs proofs, Tick now);

// ---------------------------------------------------------------------------
// Deny-reception prevention and genesis registration

struct BaseviewAgreement {
    SeqNo baseview_sn = 0;
    Digest baseview_hash;
    AccountId sender;
    AccountId receiver;
    Signature receiver_signature;  // over (sn, hash, sender)

    bool operator==(const BaseviewAgreement&) const = default;
};

Bytes agreement_signing_bytes(const BaseviewAgreement& a);

struct RegistrationMessage {
    AccountId old_pubkey;  // legacy system
    AccountId new_pubkey;  // this system
    Signature signature;   // by the old key over (old_pubkey, new_pubkey)

    bool operator==(const RegistrationMessage&) const = default;
};

Bytes registration_signing_bytes(const RegistrationMessage& m);

// ---------------------------------------------------------------------------
// Canonical serialization. serialize() is injective on logical values and
// stable across runs and platforms; deserialize() round-trips exactly.

Bytes serialize(const BalanceRecord& v);
Bytes serialize(const BalanceView& v);
Bytes serialize(const Transaction& v);
Bytes serialize(const VesterItem& v);
Bytes serialize(const PackageHeader& v);
Bytes serialize(const TxPackage& v);
Bytes serialize(const ViolationReport& v);
Bytes serialize(const BaseviewAgreement& v);
Bytes serialize(const RegistrationMessage& v);

template <typename T>
T deserialize(std::span<const uint8_t> data);

template <> BalanceRecord deserialize<BalanceRecord>(std::span<const uint8_t>);
template <> BalanceView deserialize<BalanceView>(std::span<const uint8_t>);
template <> Transaction deserialize<Transaction>(std::span<const uint8_t>);
template <> VesterItem deserialize<VesterItem>(std::span<const uint8_t>);
template <> PackageHeader deserialize<PackageHeader>(std::span<const uint8_t>);
template <> TxPackage deserialize<TxPackage>(std::span<const uint8_t>);
template <> ViolationReport deserialize<ViolationReport>(std::span<const uint8_t>);
template <> BaseviewAgreement deserialize<BaseviewAgreement>(std::span<const uint8_t>);
template <> RegistrationMessage deserialize<RegistrationMessage>(std::span<const uint8_t>);

}  // namespace ccsim
