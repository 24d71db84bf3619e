#pragma once

#include <cstdint>
#include <optional>
#include <tuple>
#include <vector>

#include "ccsim/consensus.hpp"
#include "ccsim/types.hpp"

namespace ccsim {

enum class TxCheck {
    Ok,
    BaseviewMismatch,
    UnknownSender,
    BadSignature,
    InsufficientFunds,
    BadReceiver,  // reserved recycled key, or self-send to recycled
};

const char* to_string(TxCheck c);

// Ok iff the transaction's baseview matches `view`, the sender exists and can
// cover volume + fee, the signature verifies, and the receiver key is a
// well-formed user key.
TxCheck validate_transaction(const SignatureScheme& scheme, const BalanceView& view,
                             const Transaction& tx);

struct FeeSplit {
    Amount agent_share = 0;
    std::vector<std::pair<AccountId, Amount>> vester_shares;
    Amount dust = 0;  // routed to the recycled record

    Amount total() const;
};

// Agent gets floor(total/2); the remainder is divided among vesters
// proportionally to stake by the largest-remainder method. Exact
// conservation: agent + vesters + dust == total_fees. Dust only arises in
// degenerate cases (no vesters, or zero total stake).
FeeSplit split_fees(Amount total_fees, const AccountId& agent,
                    const std::vector<std::pair<AccountId, Amount>>& vesters);

struct ApplyStats {
    uint32_t applied_txs = 0;
    uint32_t skipped_txs = 0;
    uint32_t applied_reports = 0;
    uint32_t skipped_reports = 0;
    Amount fees_collected = 0;
};

// Successor view from a baseview plus an accepted package. Transactions are
// applied in package order and re-validated against the evolving
// intermediate state; invalid ones are skipped (agents cannot foresee
// interleaving). Violation reports apply first. Fees are split per
// split_fees with vester stakes read from `base`. Returns nullopt if any
// precondition fails (flag not set, baseview mismatch, broken chain, stake
// sum not strictly above threshold) — callers treat such a package as
// hostile.
std::optional<BalanceView> apply_tx_package_51(const SignatureScheme& scheme,
                                               const BalanceView& base, const TxPackage& pkg,
                                               const ConsensusParams& params, Amount total_supply,
                                               Tick now, ApplyStats* stats = nullptr);

// Distinct-pubkey endorsement stake of a package, read from `base` balances.
Amount vesting_stake(const BalanceView& base, const TxPackage& pkg);

// True iff both proof artifacts carry valid signatures by the accused, share
// one baseview_sn, and witness a genuine exclusivity breach: two distinct
// signed headers by one agent, or two vestings by one vester in packages of
// different agent content (or twice within one chain). Never throws.
bool verify_violation(const SignatureScheme& scheme, const ViolationReport& report);

// Identity of the offense a report witnesses: accused, violation type, and
// the baseview_sn the proof artifacts refer to. A package applies at most
// one penalty per offense key, whatever it carries.
using OffenseKey = std::tuple<AccountId, uint8_t, SeqNo>;
OffenseKey offense_key(const ViolationReport& report);

// Moves floor(accused balance / 2) to the recycled record. Returns nullopt
// if the proofs do not verify.
std::optional<BalanceView> apply_violation(const SignatureScheme& scheme, const BalanceView& view,
                                           const ViolationReport& report, Tick now);

// Inactivity tax. rate(d) = base_rate * 2^(d-1), capped at 100%; fires once
// per decade boundary crossed between the previous application (prev_now)
// and now. time_last_activity is left untouched so inactivity keeps
// accruing.
struct DeflationPolicy {
    Tick decade_length = 10ULL * 365 * 24 * 3600;  // ticks modeling 10 years
    Amount base_rate_num = 1;
    Amount base_rate_den = 100;

    // Rate for the d-th decade crossing as a fraction (num, den); d >= 1.
    std::pair<Amount, Amount> rate(uint32_t d) const;
};

BalanceView apply_deflation(const BalanceView& view, Tick prev_now, Tick now,
                            const DeflationPolicy& policy);

enum class RedistributeError { NothingToRedistribute };

// Recycled balance divided among all accounts proportionally to balance,
// largest-remainder rounding; indivisible dust stays recycled. Errors if the
// recycled pot is empty; if no account holds a positive balance the pot
// stays put.
std::optional<BalanceView> redistribute_recycled(const BalanceView& view, Tick now,
                                                 RedistributeError* err = nullptr);

// Number of exact-conservation checks performed by ledger transitions since
// process start, and how many failed (must stay zero).
uint64_t conservation_checks();
uint64_t conservation_failures();

}  // namespace ccsim
