#include "ccsim/genesis.hpp"

#include <map>
#include <sstream>

namespace ccsim {

RegistrationMessage make_registration(const SignatureScheme& scheme, const KeyPair& old_key,
                                      const AccountId& new_pubkey) {
    RegistrationMessage m;
    m.old_pubkey = old_key.pub;
    m.new_pubkey = new_pubkey;
    m.signature = scheme.sign(old_key.sec, registration_signing_bytes(m));
    return m;
}

bool verify_registration_signature(const SignatureScheme& scheme, const RegistrationMessage& m) {
    return scheme.verify(m.old_pubkey, registration_signing_bytes(m), m.signature);
}

const char* to_string(RegistrationError e) {
    switch (e) {
        case RegistrationError::BadSignature: return "bad_signature";
        case RegistrationError::NotEligible: return "not_eligible";
        case RegistrationError::AlreadyRegistered: return "already_registered";
        case RegistrationError::CapacityFull: return "capacity_full";
        case RegistrationError::Expired: return "expired";
    }
    return "?";
}

Registrar::Registrar(DistributionPolicy policy, std::set<AccountId> eligible_old_keys)
    : policy_(std::move(policy)), eligible_(std::move(eligible_old_keys)) {}

std::optional<RegistrationError> Registrar::submit(const SignatureScheme& scheme,
                                                   const RegistrationMessage& m, Tick now) {
    if (!verify_registration_signature(scheme, m)) return RegistrationError::BadSignature;
    if (!eligible_.contains(m.old_pubkey)) return RegistrationError::NotEligible;
    if (claimed_old_keys_.contains(m.old_pubkey)) return RegistrationError::AlreadyRegistered;
    if (accepted_.size() >= policy_.max_registrants) return RegistrationError::CapacityFull;
    if (now > policy_.deadline) return RegistrationError::Expired;
    claimed_old_keys_.insert(m.old_pubkey);
    accepted_.push_back(m);
    return std::nullopt;
}

namespace {

BalanceView view_from_amounts(const std::map<AccountId, Amount>& amounts, Amount recycled,
                              Amount expected_total) {
    BalanceView v;
    v.sn = 0;
    v.base_view_sn = 0;
    // base_view_hash and tx_package_51_hash stay zeroed: the initial view
    // has no predecessor and no effecting package.
    v.records.reserve(amounts.size());
    for (const auto& [id, bal] : amounts) v.records.push_back({id, bal, 0});
    v.recycled = {recycled_key(), recycled, 0};
    seal_view(v);
    if (v.total() != expected_total) throw std::logic_error("initial view broke conservation");
    return v;
}

}  // namespace

std::optional<BalanceView> build_initial_view(const DistributionPolicy& policy,
                                              const std::vector<RegistrationMessage>& accepted) {
    if (accepted.empty()) return std::nullopt;
    Amount sponsor_share =
        mul_div(policy.total_supply, policy.sponsor_fraction_num, policy.sponsor_fraction_den);
    Amount pool = policy.total_supply - sponsor_share;
    Amount n = static_cast<Amount>(accepted.size());
    Amount per_head = pool / n;
    Amount dust = pool - per_head * n;

    std::map<AccountId, Amount> amounts;
    amounts[policy.sponsor] += sponsor_share;
    for (const auto& m : accepted) amounts[m.new_pubkey] += per_head;
    return view_from_amounts(amounts, dust, policy.total_supply);
}

const char* to_string(SnapshotError e) {
    switch (e) {
        case SnapshotError::ParseError: return "parse_error";
        case SnapshotError::EmptySnapshot: return "empty_snapshot";
        case SnapshotError::AllZero: return "all_zero";
    }
    return "?";
}

std::optional<BalanceView> import_snapshot(const std::string& text, Amount new_total,
                                           SnapshotError* err) {
    auto fail = [&](SnapshotError e) -> std::optional<BalanceView> {
        if (err) *err = e;
        return std::nullopt;
    };

    std::map<AccountId, Amount> legacy;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        std::istringstream fields(line);
        std::string key_hex, balance_str;
        if (!(fields >> key_hex)) continue;  // blank or comment-only line
        if (!(fields >> balance_str)) return fail(SnapshotError::ParseError);
        std::string extra;
        if (fields >> extra) return fail(SnapshotError::ParseError);

        AccountId id;
        try {
            id = AccountId::from_hex(key_hex);
        } catch (const std::exception&) {
            return fail(SnapshotError::ParseError);
        }
        if (id == recycled_key()) return fail(SnapshotError::ParseError);
        Amount bal = 0;
        try {
            size_t used = 0;
            unsigned long long parsed = std::stoull(balance_str, &used);
            if (used != balance_str.size()) return fail(SnapshotError::ParseError);
            bal = parsed;
        } catch (const std::exception&) {
            return fail(SnapshotError::ParseError);
        }
        legacy[id] = checked_add(legacy[id], bal);
    }
    if (legacy.empty()) return fail(SnapshotError::EmptySnapshot);

    Amount legacy_sum = 0;
    for (const auto& [id, bal] : legacy) legacy_sum = checked_add(legacy_sum, bal);
    if (legacy_sum == 0) return fail(SnapshotError::AllZero);

    std::map<AccountId, Amount> amounts;
    Amount assigned = 0;
    for (const auto& [id, bal] : legacy) {
        Amount share = mul_div(new_total, bal, legacy_sum);
        amounts[id] = share;
        assigned = checked_add(assigned, share);
    }
    return view_from_amounts(amounts, new_total - assigned, new_total);
}

}  // namespace ccsim
