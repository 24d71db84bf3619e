#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>

#include "ccsim/bytes.hpp"

namespace ccsim {

// 32-byte collision-resistant digest over a canonical serialization (SHA-256).
struct Digest {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;
    bool is_zero() const;
    std::string hex() const { return to_hex(bytes); }
    static Digest from_hex(const std::string& h);
};

// Account identity: the public key of the signature scheme, fixed 32 bytes.
struct AccountId {
    std::array<uint8_t, 32> bytes{};

    auto operator<=>(const AccountId&) const = default;
    std::string hex() const { return to_hex(bytes); }
    static AccountId from_hex(const std::string& h);
};

// Reserved id of the recycled-money record. Never a user key: user keys are
// hash outputs, this is the all-ones block.
AccountId recycled_key();

Digest sha256(std::span<const uint8_t> data);
inline Digest digest_of(const ByteWriter& w) { return sha256(w.bytes()); }

using Signature = Bytes;
using SecretKey = std::array<uint8_t, 32>;

struct KeyPair {
    AccountId pub;
    SecretKey sec;
};

// Pluggable signing backend. The simulator runs thousands of keys per
// scenario, so the default is a deterministic keyed-MAC test scheme; a real
// asymmetric scheme can be dropped in behind the same interface.
class SignatureScheme {
public:
    virtual ~SignatureScheme() = default;
    virtual KeyPair keygen(uint64_t seed) const = 0;
    virtual Signature sign(const SecretKey& key, std::span<const uint8_t> message) const = 0;
    virtual bool verify(const AccountId& pub, std::span<const uint8_t> message,
                        const Signature& sig) const = 0;
};

// HMAC-SHA256 under a seed-derived key; the public key doubles as the MAC
// key so verification needs no shared registry. Unforgeability is a modeling
// assumption (simulated adversaries never sign without holding the key), not
// a cryptographic property.
const SignatureScheme& test_scheme();

}  // namespace ccsim
