#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccsim/types.hpp"

namespace ccsim {

RegistrationMessage make_registration(const SignatureScheme& scheme, const KeyPair& old_key,
                                      const AccountId& new_pubkey);
bool verify_registration_signature(const SignatureScheme& scheme, const RegistrationMessage& m);

// Launch distribution: a fixed fraction reserved for the sponsor, the rest
// split equally among accepted registrants.
struct DistributionPolicy {
    Amount total_supply = kDefaultTotalSupply;
    AccountId sponsor;
    Amount sponsor_fraction_num = 30;
    Amount sponsor_fraction_den = 100;
    uint32_t max_registrants = 50'000;
    Tick deadline = 0;  // registration closes strictly after this tick
};

enum class RegistrationError { BadSignature, NotEligible, AlreadyRegistered, CapacityFull, Expired };

const char* to_string(RegistrationError e);

// Accepts registrations one claim per legacy key, first come first served,
// up to capacity and deadline.
class Registrar {
public:
    Registrar(DistributionPolicy policy, std::set<AccountId> eligible_old_keys);

    // nullopt on acceptance. Rejections are reported with this precedence:
    // BadSignature, NotEligible, AlreadyRegistered, CapacityFull, Expired.
    std::optional<RegistrationError> submit(const SignatureScheme& scheme,
                                            const RegistrationMessage& m, Tick now);

    const std::vector<RegistrationMessage>& accepted() const { return accepted_; }
    const DistributionPolicy& policy() const { return policy_; }

private:
    DistributionPolicy policy_;
    std::set<AccountId> eligible_;
    std::set<AccountId> claimed_old_keys_;
    std::vector<RegistrationMessage> accepted_;
};

// Initial view at sn 0 (zeroed base hash sentinel): sponsor gets
// floor(total * fraction), the remainder is split equally among registrants
// with division dust routed to the recycled record. nullopt when no
// registration was accepted. Conservation is exact.
std::optional<BalanceView> build_initial_view(const DistributionPolicy& policy,
                                              const std::vector<RegistrationMessage>& accepted);

enum class SnapshotError { ParseError, EmptySnapshot, AllZero };

const char* to_string(SnapshotError e);

// Initial view from a legacy balance snapshot: each key receives
// floor(new_total * legacy_balance / legacy_sum), dust to recycled.
// Format: one `hex_pubkey balance` pair per line, `#` starts a comment,
// blank lines ignored; duplicate keys accumulate. The reserved recycled
// key may not appear.
std::optional<BalanceView> import_snapshot(const std::string& text, Amount new_total,
                                           SnapshotError* err = nullptr);

}  // namespace ccsim
