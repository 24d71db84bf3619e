#include "ccsim/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <algorithm>
#include <stdexcept>

namespace ccsim {

std::string to_hex(std::span<const uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw DeserializeError("odd-length hex string");
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) throw DeserializeError("bad hex digit");
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

bool Digest::is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(), [](uint8_t b) { return b == 0; });
}

static std::array<uint8_t, 32> fixed_from_hex(const std::string& h, const char* what) {
    Bytes raw = from_hex(h);
    if (raw.size() != 32) throw DeserializeError(std::string(what) + ": expected 32 bytes");
    std::array<uint8_t, 32> a{};
    std::copy(raw.begin(), raw.end(), a.begin());
    return a;
}

Digest Digest::from_hex(const std::string& h) { return Digest{fixed_from_hex(h, "digest")}; }
AccountId AccountId::from_hex(const std::string& h) { return AccountId{fixed_from_hex(h, "account id")}; }

AccountId recycled_key() {
    AccountId id;
    id.bytes.fill(0xff);
    return id;
}

Digest sha256(std::span<const uint8_t> data) {
    Digest out;
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr) != 1 ||
        len != 32) {
        throw std::runtime_error("sha256 failed");
    }
    return out;
}

namespace {

class TestScheme final : public SignatureScheme {
public:
    KeyPair keygen(uint64_t seed) const override {
        ByteWriter w;
        const char* tag = "ccsim-test-key";
        w.raw(std::span(reinterpret_cast<const uint8_t*>(tag), 14));
        w.u64(seed);
        Digest d = sha256(w.bytes());
        KeyPair kp;
        kp.sec = d.bytes;
        kp.pub.bytes = d.bytes;
        return kp;
    }

    Signature sign(const SecretKey& key, std::span<const uint8_t> message) const override {
        Signature sig(32);
        unsigned int len = 0;
        if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), message.data(),
                 message.size(), sig.data(), &len) == nullptr ||
            len != 32) {
            throw std::runtime_error("hmac failed");
        }
        return sig;
    }

    bool verify(const AccountId& pub, std::span<const uint8_t> message,
                const Signature& sig) const override {
        if (sig.size() != 32) return false;
        return sign(pub.bytes, message) == sig;
    }
};

}  // namespace

const SignatureScheme& test_scheme() {
    static const TestScheme scheme;
    return scheme;
}

}  // namespace ccsim
