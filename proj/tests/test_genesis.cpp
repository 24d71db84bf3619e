#include "ccsim/genesis.hpp"

#include <set>
#include <string>

#include "ccsim/crypto.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace ccsim;
using namespace ccsim::testing;

namespace {

DistributionPolicy small_policy() {
    DistributionPolicy p;
    p.total_supply = 1000;
    p.sponsor = key(50).pub;
    p.sponsor_fraction_num = 30;
    p.sponsor_fraction_den = 100;
    p.max_registrants = 2;
    p.deadline = 10;
    return p;
}

RegistrationMessage reg(uint64_t old_seed, uint64_t new_seed) {
    return make_registration(scheme(), key(old_seed), key(new_seed).pub);
}

}  // namespace

TEST_CASE("registration signatures bind both keys") {
    RegistrationMessage m = reg(1, 100);
    CHECK(verify_registration_signature(scheme(), m));

    RegistrationMessage swapped_target = m;
    swapped_target.new_pubkey = key(101).pub;
    CHECK_FALSE(verify_registration_signature(scheme(), swapped_target));

    RegistrationMessage wrong_claimant = m;
    wrong_claimant.old_pubkey = key(2).pub;
    CHECK_FALSE(verify_registration_signature(scheme(), wrong_claimant));

    RegistrationMessage bitflip = m;
    bitflip.signature[5] ^= 1;
    CHECK_FALSE(verify_registration_signature(scheme(), bitflip));
}

TEST_CASE("registrar rejects in a fixed precedence order") {
    Registrar r(small_policy(), {key(1).pub, key(2).pub, key(3).pub});

    CHECK_FALSE(r.submit(scheme(), reg(1, 100), 0).has_value());
    CHECK(r.accepted().size() == 1);

    // A broken signature wins over every other objection.
    RegistrationMessage forged = reg(7, 104);  // not eligible either
    forged.signature[0] ^= 1;
    CHECK(r.submit(scheme(), forged, 99) == RegistrationError::BadSignature);

    CHECK(r.submit(scheme(), reg(7, 104), 0) == RegistrationError::NotEligible);

    // Re-claims are flagged as such even once capacity is used up.
    CHECK(r.submit(scheme(), reg(1, 105), 0) == RegistrationError::AlreadyRegistered);
    CHECK_FALSE(r.submit(scheme(), reg(2, 101), 5).has_value());
    CHECK(r.submit(scheme(), reg(1, 105), 5) == RegistrationError::AlreadyRegistered);

    // Capacity outranks expiry for a new claimant.
    CHECK(r.submit(scheme(), reg(3, 102), 99) == RegistrationError::CapacityFull);
    CHECK(r.accepted().size() == 2);
}

TEST_CASE("registration closes strictly after the deadline tick") {
    Registrar r(small_policy(), {key(1).pub, key(2).pub});
    CHECK_FALSE(r.submit(scheme(), reg(1, 100), 10).has_value());  // at the deadline: fine
    CHECK(r.submit(scheme(), reg(2, 101), 11) == RegistrationError::Expired);
}

TEST_CASE("launch distribution: sponsor floor, equal split, dust recycled") {
    CHECK_FALSE(build_initial_view(small_policy(), {}).has_value());

    DistributionPolicy p = small_policy();
    p.max_registrants = 10;
    std::vector<RegistrationMessage> accepted{reg(1, 100), reg(2, 101), reg(3, 102)};
    auto v = build_initial_view(p, accepted);
    REQUIRE(v.has_value());
    // 1000 total: sponsor 300, pool 700 -> 233 each, 1 recycled.
    CHECK(v->balance_of(key(50).pub) == 300);
    CHECK(v->balance_of(key(100).pub) == 233);
    CHECK(v->balance_of(key(101).pub) == 233);
    CHECK(v->balance_of(key(102).pub) == 233);
    CHECK(v->recycled.balance == 1);
    CHECK(v->total() == 1000);
    CHECK(v->sn == 0);
    CHECK(v->base_view_hash.is_zero());
    CHECK(v->tx_package_51_hash.is_zero());
    CHECK(v->hash == view_hash(*v));

    // A sponsor who also registers accumulates both shares.
    std::vector<RegistrationMessage> incl{make_registration(scheme(), key(1), p.sponsor),
                                          reg(2, 101)};
    auto both = build_initial_view(p, incl);
    REQUIRE(both.has_value());
    CHECK(both->balance_of(p.sponsor) == 300 + 350);
    CHECK(both->total() == 1000);
}

TEST_CASE("snapshot import: proportional shares with comments and dust") {
    std::string text = "# legacy holders\n" + key(1).pub.hex() + " 75  # whale\n\n" +
                       key(2).pub.hex() + " 25\n";
    auto v = import_snapshot(text, 1000);
    REQUIRE(v.has_value());
    CHECK(v->balance_of(key(1).pub) == 750);
    CHECK(v->balance_of(key(2).pub) == 250);
    CHECK(v->recycled.balance == 0);
    CHECK(v->total() == 1000);

    // Equal thirds of 100 leave one unit of dust.
    std::string thirds = key(1).pub.hex() + " 1\n" + key(2).pub.hex() + " 1\n" +
                         key(3).pub.hex() + " 1\n";
    auto t = import_snapshot(thirds, 100);
    REQUIRE(t.has_value());
    CHECK(t->balance_of(key(1).pub) == 33);
    CHECK(t->recycled.balance == 1);
    CHECK(t->total() == 100);

    // Duplicate lines accumulate before shares are computed.
    std::string dup = key(1).pub.hex() + " 10\n" + key(1).pub.hex() + " 20\n" +
                      key(2).pub.hex() + " 30\n";
    auto d = import_snapshot(dup, 600);
    REQUIRE(d.has_value());
    CHECK(d->balance_of(key(1).pub) == 300);
    CHECK(d->balance_of(key(2).pub) == 300);
}

TEST_CASE("snapshot import rejects malformed input with a reason") {
    SnapshotError err{};
    auto expect_err = [&](const std::string& text, SnapshotError want) {
        CHECK_FALSE(import_snapshot(text, 1000, &err).has_value());
        CHECK(err == want);
    };

    expect_err("zz not-hex 10\n", SnapshotError::ParseError);
    expect_err(key(1).pub.hex() + "\n", SnapshotError::ParseError);           // missing balance
    expect_err(key(1).pub.hex() + " 10 extra\n", SnapshotError::ParseError);  // trailing field
    expect_err(key(1).pub.hex() + " 1x\n", SnapshotError::ParseError);        // junk suffix
    expect_err(key(1).pub.hex() + " ten\n", SnapshotError::ParseError);
    expect_err(recycled_key().hex() + " 10\n", SnapshotError::ParseError);  // reserved key
    expect_err("", SnapshotError::EmptySnapshot);
    expect_err("# nothing but comments\n\n", SnapshotError::EmptySnapshot);
    expect_err(key(1).pub.hex() + " 0\n", SnapshotError::AllZero);

    // The error pointer is optional.
    CHECK_FALSE(import_snapshot("", 1000).has_value());
}
