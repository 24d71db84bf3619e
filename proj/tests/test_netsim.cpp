#include "ccsim/netsim.hpp"

#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

using namespace ccsim;
using Json = nlohmann::ordered_json;

namespace {

Scenario scenario_from(const Json& j) { return parse_scenario(j.dump()); }

// Five nodes, one agent, everyone vests, light paid traffic. Sampling is
// pinned at four peers with a four-round stability requirement: the derived
// single-digit setting would promote after one round, which seals a node's
// first endorsement-chain variant before the network can agree on one.
Json busy_doc() {
    Json j{{"name", "busy"},        {"seed", 5},       {"run_ticks", 60},
           {"total_supply", 1000},  {"nodes", 5},      {"roles", {{"agents", {0}}, {"vesters", "all"}}},
           {"params", {{"kind", "digits"}, {"digits", 2}}},
           {"traffic", {{"kind", "auto"}, {"per_tick", 1}, {"volume", 3}, {"fee", 1}, {"to", 40}}}};
    return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed-form load model

TEST_CASE("endorsement-list length from the stake arithmetic") {
    // 1 + ceil((5.1e9 - 3.0e9) / (7.0e9 / 50,000)) with the headline supply
    // split: 15,001 entries.
    CHECK(required_vester_list_len(5'100'000'000, 3'000'000'000, 7'000'000'000, 50'000) ==
          15'001);

    CHECK(required_vester_list_len(100, 10, 30, 10) == 31);  // 90/3 exactly
    CHECK(required_vester_list_len(101, 10, 30, 10) == 32);  // 91/3 rounds up
    CHECK(required_vester_list_len(10, 10, 30, 10) == 1);    // reserve already suffices

    CHECK_THROWS_AS(required_vester_list_len(100, 10, 30, 0), std::invalid_argument);
    CHECK_THROWS_AS(required_vester_list_len(100, 10, 5, 10), std::invalid_argument);
    CHECK_THROWS(required_vester_list_len(10, 20, 30, 10));  // threshold below reserve
}

TEST_CASE("transactions per package round to the nearest count") {
    CHECK(txs_per_package(0.8, 600) == 480);
    CHECK(txs_per_package(16.667, 600) == 10'000);
    CHECK(txs_per_package(1.5, 1) == 2);
    CHECK(txs_per_package(0.4, 1) == 0);
    CHECK_THROWS_AS(txs_per_package(-1.0, 10), std::invalid_argument);
}

TEST_CASE("package bytes and verification rate match the headline figures") {
    LoadModel a = load_model(15'001, 480, 600);
    CHECK(a.vester_list_len == 15'001);
    CHECK(a.package_bytes == 1'505'376);
    CHECK(a.verifications_per_sec == 26);

    LoadModel b = load_model(15'001, 10'000, 600);
    CHECK(b.package_bytes == 2'800'096);
    CHECK(b.verifications_per_sec == 42);

    CHECK(load_model(1, 0, 2).verifications_per_sec == 1);  // 0.5 rounds up
    CHECK(load_model(1, 0, 3).verifications_per_sec == 0);  // 0.33 rounds down
    CHECK_THROWS_AS(load_model(1, 1, 0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Pure absorbing-chain mode

TEST_CASE("chain mode validates its inputs") {
    MarkovScenario ms;
    ms.nodes = 0;
    CHECK_THROWS_AS(run_markov_mode(ms, 1), std::invalid_argument);
    ms = MarkovScenario{};
    ms.distinct_views = 0;
    CHECK_THROWS_AS(run_markov_mode(ms, 1), std::invalid_argument);
    ms = MarkovScenario{};
    ms.sample_size = 0;
    CHECK_THROWS_AS(run_markov_mode(ms, 1), std::invalid_argument);
    ms = MarkovScenario{};
    ms.weights = {1, 2};  // 20 nodes expected
    CHECK_THROWS_AS(run_markov_mode(ms, 1), std::invalid_argument);
    ms = MarkovScenario{};
    ms.initial_views = std::vector<uint32_t>(20, 9);  // out of range
    CHECK_THROWS_AS(run_markov_mode(ms, 1), std::invalid_argument);
}

TEST_CASE("a unanimous start is absorbed in zero steps") {
    MarkovScenario ms;
    ms.nodes = 5;
    ms.initial_views = {0, 0, 0, 0, 0};
    MarkovResult r = run_markov_mode(ms, 3);
    CHECK(r.absorbed);
    CHECK(r.steps == 0);
    CHECK(r.final_view == 0);
}

TEST_CASE("the default split run is absorbed and seed-reproducible") {
    MarkovScenario ms;  // 20 nodes, 2 views round-robin, sample 9
    MarkovResult a = run_markov_mode(ms, 42);
    MarkovResult b = run_markov_mode(ms, 42);
    CHECK(a.absorbed);
    CHECK(a.steps > 0);
    CHECK(a.steps < 10'000);
    CHECK(a.final_view < 2);
    CHECK(a.steps == b.steps);
    CHECK(a.final_view == b.final_view);
}

TEST_CASE("a dominant stake drags every node onto its view") {
    MarkovScenario ms;
    ms.nodes = 3;
    ms.distinct_views = 2;
    ms.sample_size = 9;  // clamps to all three nodes
    ms.weights = {1, 1, 1000};
    ms.initial_views = {0, 0, 1};
    for (uint64_t seed : {1, 2, 3, 4, 5}) {
        MarkovResult r = run_markov_mode(ms, seed);
        CHECK(r.absorbed);
        CHECK(r.final_view == 1);
    }
}

TEST_CASE("trajectories conserve the node count and end monochrome") {
    MarkovScenario ms;
    auto traj = markov_trajectory(ms, 7, 100'000);
    REQUIRE(!traj.empty());
    CHECK(traj.front() == std::vector<uint32_t>{10, 10});
    for (const auto& row : traj) {
        REQUIRE(row.size() == 2);
        CHECK(row[0] + row[1] == 20);
    }
    CHECK((traj.back()[0] == 20 || traj.back()[1] == 20));

    // Recording stops at the cap when absorption has not happened yet.
    auto cut = markov_trajectory(ms, 7, 3);
    CHECK(cut.size() <= 4);
}

TEST_CASE("absorption probability estimates are monotone over the grid") {
    MarkovScenario ms;
    auto curve = markov_absorption_curve(ms, 11, 200, {0, 25, 50, 100, 200, 400, 800, 1600});
    REQUIRE(curve.size() == 8);
    double prev = -1;
    for (const auto& p : curve) {
        CHECK(p.absorbed_fraction >= prev);
        CHECK(p.absorbed_fraction >= 0.0);
        CHECK(p.absorbed_fraction <= 1.0);
        prev = p.absorbed_fraction;
    }
    CHECK(curve.front().absorbed_fraction == 0.0);
    CHECK(curve.back().absorbed_fraction == 1.0);

    CHECK(estimate_absorption_probability(ms, 1600, 100, 11) == 1.0);
    CHECK_THROWS_AS(markov_absorption_curve(ms, 11, 0, {10}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Bootstrap-attack trial

TEST_CASE("a rejoining node beats the flood on both recovery paths") {
    SybilBootstrapTrial t;  // 10 honest vs 10,000 fakes
    t.seed = 21;
    SybilBootstrapOutcome out = run_sybil_bootstrap_trial(t);
    CHECK(out.seed_recovery_honest);
    CHECK(out.location_pick_honest);
    CHECK_FALSE(out.location_alert);

    SybilBootstrapOutcome again = run_sybil_bootstrap_trial(t);
    CHECK(again.seed_recovery_honest == out.seed_recovery_honest);
    CHECK(again.location_pick_honest == out.location_pick_honest);
}

TEST_CASE("losing every listed peer raises the alarm instead of a wrong answer") {
    SybilBootstrapTrial t;
    t.seed = 22;
    t.remove_matching_peers = true;
    SybilBootstrapOutcome out = run_sybil_bootstrap_trial(t);
    CHECK(out.seed_recovery_honest);  // deposited seeds are unaffected
    CHECK_FALSE(out.location_pick_honest);
    CHECK(out.location_alert);
}

TEST_CASE("with no honest holders both recovery paths refuse to answer") {
    SybilBootstrapTrial t;
    t.honest_holders = 0;
    t.seed = 23;
    SybilBootstrapOutcome out = run_sybil_bootstrap_trial(t);
    CHECK_FALSE(out.seed_recovery_honest);
    CHECK_FALSE(out.location_pick_honest);
    CHECK(out.location_alert);
}

// ---------------------------------------------------------------------------
// Full network simulation

TEST_CASE("an idle network stays converged at genesis") {
    Json j{{"name", "idle"}, {"run_ticks", 20}, {"total_supply", 1000}, {"nodes", 4},
           {"roles", {{"agents", {0}}, {"vesters", "all"}}}};
    Simulation sim(scenario_from(j));
    CHECK(sim.genesis_view().total() == 1000);
    MetricsReport r = sim.run();
    CHECK(r.converged);
    CHECK(r.first_consensus_tick == 0);
    CHECK(r.settled_tick == 0);
    CHECK(r.total_finalizations == 0);
    CHECK(r.invariant_violations.empty());
    CHECK(r.per_tick.size() == 20);
    for (const auto& t : r.per_tick) CHECK(t.distinct_hashes == 1);
}

TEST_CASE("paid traffic drives packaging, finalization, and promotion") {
    Simulation sim(scenario_from(busy_doc()));
    MetricsReport r = sim.run();
    CHECK(r.converged);
    CHECK(r.invariant_violations.empty());
    CHECK(r.injected_txs > 0);
    CHECK(r.total_finalizations > 0);
    CHECK(r.total_promotions > 0);
    CHECK(r.total_messages > 0);
    CHECK(r.total_bytes > 0);
    for (const auto& n : sim.node_states()) {
        CHECK(n.current_view.sn > 0);
        CHECK(n.current_view.total() == 1000);
    }

    uint64_t msgs = 0, bytes = 0;
    for (const auto& t : r.per_tick) {
        msgs += t.messages;
        bytes += t.bytes;
    }
    CHECK(msgs == r.total_messages);
    CHECK(bytes == r.total_bytes);
}

TEST_CASE("one seed, one byte stream: reruns are identical") {
    Simulation a(scenario_from(busy_doc()));
    Simulation b(scenario_from(busy_doc()));
    MetricsReport ra = a.run();
    MetricsReport rb = b.run();
    CHECK(ra.csv() == rb.csv());
    CHECK(ra.json_summary() == rb.json_summary());

    Json shifted = busy_doc();
    shifted["seed"] = 6;
    Simulation c(scenario_from(shifted));
    CHECK(c.run().csv() != ra.csv());
}

TEST_CASE("the per-tick observer fires once per tick in order") {
    Simulation sim(scenario_from(busy_doc()));
    std::vector<Tick> seen;
    sim.run([&](Tick t) { seen.push_back(t); });
    REQUIRE(seen.size() == 60);
    for (size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == static_cast<Tick>(i));

    CHECK_THROWS_AS(sim.run(), std::logic_error);  // single-shot
}

TEST_CASE("reports carry a stable table layout and summary keys") {
    Simulation sim(scenario_from(busy_doc()));
    MetricsReport r = sim.run();

    std::string csv = r.csv();
    CHECK(csv.rfind("tick,distinct_hashes,messages,bytes,reports,finalizations,promotions\n",
                    0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);  // header + one row per tick

    Json j = Json::parse(r.json_summary());
    CHECK(j.at("scenario") == "busy");
    CHECK(j.at("seed") == 5);
    CHECK(j.at("nodes") == 5);
    CHECK(j.at("converged") == true);
    CHECK(j.at("total_finalizations").get<uint64_t>() == r.total_finalizations);
    CHECK(j.at("invariant_violations").empty());
}

TEST_CASE("every stake distribution produces a conserving genesis") {
    for (Json stakes : {Json{{"kind", "uniform"}},
                        Json{{"kind", "pareto"}, {"alpha", 1.2}},
                        Json{{"kind", "explicit"}, {"amounts", {400, 300, 200, 50, 0}}},
                        Json{{"kind", "genesis"}}}) {
        Json j{{"run_ticks", 5}, {"total_supply", 1000}, {"nodes", 5},
               {"roles", {{"agents", {0}}, {"vesters", "all"}}}};
        j["stakes"] = stakes;
        Simulation sim(scenario_from(j));
        CHECK(sim.genesis_view().total() == 1000);
        CHECK(sim.genesis_view().hash == view_hash(sim.genesis_view()));
        MetricsReport r = sim.run();
        CHECK(r.invariant_violations.empty());
    }
}

TEST_CASE("consensus parameters resolve from the configured source") {
    Json j{{"run_ticks", 5}, {"total_supply", 1000}, {"nodes", 5},
           {"roles", {{"agents", {0}}, {"vesters", "all"}}}};

    j["params"] = Json{{"kind", "digits"}, {"digits", 2}};
    CHECK(Simulation(scenario_from(j)).consensus_params().sample_size == 4);

    j["params"] = Json{{"kind", "accounts"}, {"accounts", 1000}};
    CHECK(Simulation(scenario_from(j)).consensus_params().sample_size == 16);

    j["params"] = Json{{"kind", "auto"}};  // five funded accounts -> one digit
    Simulation sim(scenario_from(j));
    CHECK(sim.consensus_params().serious_accounts == 5);
    CHECK(sim.consensus_params().sample_size == 1);
}

TEST_CASE("node identities are stable and funded per the stake spec") {
    Json j{{"run_ticks", 5}, {"total_supply", 1000}, {"nodes", 4},
           {"stakes", {{"kind", "explicit"}, {"amounts", {400, 300, 200, 100}}}},
           {"roles", {{"agents", {0}}, {"vesters", "all"}}}};
    Simulation sim(scenario_from(j));
    const BalanceView& g = sim.genesis_view();
    CHECK(g.balance_of(sim.node_key(0).pub) == 400);
    CHECK(g.balance_of(sim.node_key(1).pub) == 300);
    CHECK(g.balance_of(sim.node_key(2).pub) == 200);
    CHECK(g.balance_of(sim.node_key(3).pub) == 100);
    CHECK(sim.node_states().size() == 4);
    CHECK(sim.node_states()[2].identity.pub == sim.node_key(2).pub);
}
