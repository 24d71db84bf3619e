#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ccsim/node.hpp"
#include "ccsim/types.hpp"

namespace ccsim {

// A scenario file is rejected with this error; the CLI maps it to exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StakeKind : uint8_t { Uniform, Pareto, Explicit, Genesis };

struct StakeSpec {
    StakeKind kind = StakeKind::Uniform;
    double pareto_alpha = 1.5;           // Pareto only
    std::vector<Amount> amounts;         // Explicit only, one per node
};

enum class ParamKind : uint8_t { Auto, Accounts, Digits };

struct ParamSpec {
    ParamKind kind = ParamKind::Auto;    // Auto: count funded accounts at genesis
    uint64_t accounts = 0;               // Accounts: derive B from this count
    uint32_t digits = 0;                 // Digits: B given, M = N = B^2
};

enum class LatencyKind : uint8_t { Fixed, Uniform };

struct LatencySpec {
    LatencyKind kind = LatencyKind::Fixed;
    Tick fixed = 1;
    Tick lo = 1;
    Tick hi = 1;
};

struct PartitionWindow {
    Tick from = 0;                       // inclusive
    Tick to = 0;                         // exclusive
    std::vector<std::vector<NodeId>> groups;  // disjoint cover of all nodes
};

enum class AdversaryKind : uint8_t {
    DoublePackageAgent,   // signs two conflicting packages per sequence number
    DoubleVester,         // vests two different agent packages per sequence number
    WithholdingVester,    // silently never vests during the window
    StaleBroadcaster,     // freezes its view and keeps advertising it
    SybilSwarm,           // flood of zero-stake virtual peers pushing a fake view
};

struct AdversarySpec {
    AdversaryKind kind = AdversaryKind::DoublePackageAgent;
    NodeId node = 0;                     // unused for SybilSwarm
    Tick from = 0;                       // inclusive
    Tick to = 0;                         // exclusive
    uint32_t swarm_size = 0;             // SybilSwarm only
    std::string swarm_label = "swarm";   // SybilSwarm only: the peers' location
    SeqNo swarm_view_sn = 1'000'000'000; // SybilSwarm only: advertised sequence
};

struct TrafficSpec {
    bool enabled = false;
    uint32_t per_tick = 0;               // transactions injected per tick
    Amount volume = 1;
    Amount fee = 0;
    Tick from = 0;                       // inclusive
    Tick to = 0;                         // exclusive
    std::vector<NodeId> exclude;         // never senders nor receivers
};

struct TilpSpec {
    bool enabled = false;
    std::vector<std::string> locations;  // labels an incoming peer must match
};

struct Scenario {
    uint32_t version = 1;
    std::string name = "unnamed";
    uint64_t seed = 0;
    Tick run_ticks = 100;
    Amount total_supply = 1'000'000;
    uint32_t node_count = 0;
    StakeSpec stakes;
    std::vector<NodeId> agents;          // resolved, sorted, unique
    std::vector<NodeId> vesters;
    ParamSpec params;
    Tick update_period = 1;              // node i updates when tick % period == i % period
    Tick rebroadcast_every = 10;         // agents re-send an unsettled package this often
    LatencySpec latency;
    double loss_probability = 0.0;       // per delivery attempt
    std::vector<PartitionWindow> partitions;
    std::vector<AdversarySpec> adversaries;
    TrafficSpec traffic;
    double audit_ratio = 0.001;
    uint32_t audit_cap = 256;
    uint32_t blacklist_decay = 10;
    uint32_t locations = 1;              // node i serves from location "loc-" + i % locations
    TilpSpec tilp;
    AgentCriteria agent_criteria;
    VesterCriteria vester_criteria;
};

// Parses and validates a scenario document. Throws ConfigError with a
// human-readable message naming the offending field.
Scenario parse_scenario(const std::string& json_text);

// Reads the file and parses it; file-system failures also raise ConfigError.
Scenario load_scenario_file(const std::string& path);

// Serializes a scenario back to a canonical document (stable key order),
// usable both for tooling and round-trip tests.
std::string scenario_to_json(const Scenario& sc);

}  // namespace ccsim
