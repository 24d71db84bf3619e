#include <string>

#include "ccsim/crypto.hpp"
#include "doctest.h"

using namespace ccsim;

static Bytes str_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

// Published SHA-256 vectors (FIPS 180-2 appendix examples).
TEST_CASE("sha256 matches the standard test vectors") {
    CHECK(sha256(Bytes{}).hex() ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256(str_bytes("abc")).hex() ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256(str_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")).hex() ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("hex codec round-trips and rejects malformed input") {
    Bytes b{0x00, 0x7f, 0xff, 0x10};
    CHECK(to_hex(b) == "007fff10");
    CHECK(from_hex("007fff10") == b);
    CHECK(from_hex("AB") == Bytes{0xab});  // upper case accepted
    CHECK_THROWS_AS(from_hex("abc"), DeserializeError);
    CHECK_THROWS_AS(from_hex("zz"), DeserializeError);
}

TEST_CASE("digest and account helpers") {
    Digest z;
    CHECK(z.is_zero());
    Digest d = sha256(str_bytes("x"));
    CHECK_FALSE(d.is_zero());
    CHECK(Digest::from_hex(d.hex()) == d);
    CHECK_THROWS_AS(Digest::from_hex("abcd"), DeserializeError);

    AccountId r = recycled_key();
    for (uint8_t byte : r.bytes) CHECK(byte == 0xff);
    CHECK(AccountId::from_hex(r.hex()) == r);
}

// Key derivation and signatures pinned against an independent HMAC-SHA256
// implementation of the same scheme.
TEST_CASE("test scheme matches reference outputs") {
    const SignatureScheme& s = test_scheme();
    KeyPair k7 = s.keygen(7);
    CHECK(k7.pub.hex() == "9f7da6e6d2be6eae7169b96821529511b7724c9e1fb88850bf4516f086ec7b53");
    CHECK(to_hex(k7.sec) == k7.pub.hex());  // MAC key doubles as public key

    Signature sig = s.sign(k7.sec, str_bytes("hello"));
    CHECK(to_hex(sig) == "c47662e82946eb28ddc216f5f2a8d7950773c2755ff0b5e02111c422da4fa709");
    CHECK(s.verify(k7.pub, str_bytes("hello"), sig));
}

TEST_CASE("keygen is deterministic and seed-sensitive") {
    const SignatureScheme& s = test_scheme();
    CHECK(s.keygen(1).pub == s.keygen(1).pub);
    CHECK(s.keygen(1).pub != s.keygen(2).pub);
}

TEST_CASE("verification rejects the wrong key, message, or signature") {
    const SignatureScheme& s = test_scheme();
    KeyPair a = s.keygen(1), b = s.keygen(2);
    Bytes msg = str_bytes("payload");
    Signature sig = s.sign(a.sec, msg);

    CHECK(s.verify(a.pub, msg, sig));
    CHECK_FALSE(s.verify(b.pub, msg, sig));
    CHECK_FALSE(s.verify(a.pub, str_bytes("payloae"), sig));

    Signature tampered = sig;
    tampered[0] ^= 1;
    CHECK_FALSE(s.verify(a.pub, msg, tampered));
    CHECK_FALSE(s.verify(a.pub, msg, Signature{}));         // wrong length
    CHECK_FALSE(s.verify(a.pub, msg, Signature(31, 0x5a)));  // wrong length
}
