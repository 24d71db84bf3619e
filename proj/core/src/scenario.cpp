#include "ccsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ccsim {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& what) { throw ConfigError("scenario: " + what); }

const Json& require(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) bad(std::string("missing field '") + key + "'");
    return *it;
}

uint64_t get_u64(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number_unsigned()) bad(std::string("'") + key + "' must be a non-negative integer");
    return v.get<uint64_t>();
}

uint64_t opt_u64(const Json& j, const char* key, uint64_t fallback) {
    return j.contains(key) ? get_u64(j, key) : fallback;
}

double opt_prob(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
    double d = v.get<double>();
    if (d < 0.0 || d > 1.0) bad(std::string("'") + key + "' must lie in [0, 1]");
    return d;
}

std::string opt_str(const Json& j, const char* key, std::string fallback) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_string()) bad(std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<NodeId> node_list(const Json& v, const char* key, uint32_t node_count) {
    if (v.is_string() && v.get<std::string>() == "all") {
        std::vector<NodeId> all(node_count);
        for (uint32_t i = 0; i < node_count; ++i) all[i] = i;
        return all;
    }
    if (!v.is_array()) bad(std::string("'") + key + "' must be \"all\" or an array of node ids");
    std::vector<NodeId> out;
    for (const Json& e : v) {
        if (!e.is_number_unsigned()) bad(std::string("'") + key + "' entries must be node ids");
        uint64_t id = e.get<uint64_t>();
        if (id >= node_count) bad(std::string("'") + key + "' references node " +
                                  std::to_string(id) + " but only " +
                                  std::to_string(node_count) + " exist");
        out.push_back(static_cast<NodeId>(id));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

StakeSpec parse_stakes(const Json& j, uint32_t node_count, Amount total_supply) {
    StakeSpec s;
    if (!j.contains("stakes")) return s;
    const Json& v = j.at("stakes");
    std::string kind = opt_str(v, "kind", "uniform");
    if (kind == "uniform") {
        s.kind = StakeKind::Uniform;
    } else if (kind == "pareto") {
        s.kind = StakeKind::Pareto;
        if (v.contains("alpha")) {
            const Json& a = v.at("alpha");
            if (!a.is_number()) bad("'stakes.alpha' must be a number");
            s.pareto_alpha = a.get<double>();
            if (!(s.pareto_alpha > 0.0)) bad("'stakes.alpha' must be positive");
        }
    } else if (kind == "explicit") {
        s.kind = StakeKind::Explicit;
        const Json& amounts = require(v, "amounts");
        if (!amounts.is_array()) bad("'stakes.amounts' must be an array");
        unsigned __int128 sum = 0;
        for (const Json& e : amounts) {
            if (!e.is_number_unsigned()) bad("'stakes.amounts' entries must be non-negative");
            Amount a = e.get<Amount>();
            sum += a;
            s.amounts.push_back(a);
        }
        if (s.amounts.size() != node_count)
            bad("'stakes.amounts' must list exactly one amount per node");
        if (sum > total_supply) bad("'stakes.amounts' exceed total_supply");
    } else if (kind == "genesis") {
        s.kind = StakeKind::Genesis;
        if (node_count < 2) bad("'stakes.kind' genesis needs a sponsor and a registrant");
    } else {
        bad("'stakes.kind' must be uniform, pareto, explicit or genesis");
    }
    return s;
}

ParamSpec parse_params(const Json& j) {
    ParamSpec p;
    if (!j.contains("params")) return p;
    const Json& v = j.at("params");
    std::string kind = opt_str(v, "kind", "auto");
    if (kind == "auto") {
        p.kind = ParamKind::Auto;
    } else if (kind == "accounts") {
        p.kind = ParamKind::Accounts;
        p.accounts = get_u64(v, "accounts");
        if (p.accounts == 0) bad("'params.accounts' must be positive");
    } else if (kind == "digits") {
        p.kind = ParamKind::Digits;
        p.digits = static_cast<uint32_t>(get_u64(v, "digits"));
        if (p.digits == 0 || p.digits > 20) bad("'params.digits' must lie in [1, 20]");
    } else {
        bad("'params.kind' must be auto, accounts or digits");
    }
    return p;
}

LatencySpec parse_latency(const Json& j) {
    LatencySpec l;
    if (!j.contains("latency")) return l;
    const Json& v = j.at("latency");
    std::string kind = opt_str(v, "kind", "fixed");
    if (kind == "fixed") {
        l.kind = LatencyKind::Fixed;
        l.fixed = opt_u64(v, "ticks", 1);
        if (l.fixed < 1) bad("'latency.ticks' must be at least 1");
    } else if (kind == "uniform") {
        l.kind = LatencyKind::Uniform;
        l.lo = get_u64(v, "lo");
        l.hi = get_u64(v, "hi");
        if (l.lo < 1 || l.hi < l.lo) bad("'latency' needs 1 <= lo <= hi");
    } else {
        bad("'latency.kind' must be fixed or uniform");
    }
    return l;
}

std::vector<PartitionWindow> parse_partitions(const Json& j, uint32_t node_count, Tick run_ticks) {
    std::vector<PartitionWindow> out;
    if (!j.contains("partitions")) return out;
    const Json& v = j.at("partitions");
    if (!v.is_array()) bad("'partitions' must be an array");
    for (const Json& w : v) {
        PartitionWindow pw;
        pw.from = get_u64(w, "from");
        pw.to = get_u64(w, "to");
        if (pw.from >= pw.to) bad("'partitions' window needs from < to");
        if (pw.to > run_ticks) bad("'partitions' window ends after the run");
        const Json& groups = require(w, "groups");
        if (!groups.is_array() || groups.size() < 2)
            bad("'partitions.groups' must list at least two groups");
        std::set<NodeId> seen;
        for (const Json& g : groups) {
            pw.groups.push_back(node_list(g, "partitions.groups", node_count));
            if (pw.groups.back().empty()) bad("'partitions.groups' group may not be empty");
            for (NodeId id : pw.groups.back())
                if (!seen.insert(id).second)
                    bad("node " + std::to_string(id) + " appears in two partition groups");
        }
        if (seen.size() != node_count) bad("'partitions.groups' must cover every node");
        out.push_back(std::move(pw));
    }
    for (size_t a = 0; a < out.size(); ++a)
        for (size_t b = a + 1; b < out.size(); ++b)
            if (out[a].from < out[b].to && out[b].from < out[a].to)
                bad("'partitions' windows overlap");
    return out;
}

std::vector<AdversarySpec> parse_adversaries(const Json& j, uint32_t node_count, Tick run_ticks) {
    std::vector<AdversarySpec> out;
    if (!j.contains("adversaries")) return out;
    const Json& v = j.at("adversaries");
    if (!v.is_array()) bad("'adversaries' must be an array");
    for (const Json& a : v) {
        AdversarySpec spec;
        std::string kind = opt_str(a, "kind", "");
        if (kind == "double_package_agent") spec.kind = AdversaryKind::DoublePackageAgent;
        else if (kind == "double_vester") spec.kind = AdversaryKind::DoubleVester;
        else if (kind == "withholding_vester") spec.kind = AdversaryKind::WithholdingVester;
        else if (kind == "stale_broadcaster") spec.kind = AdversaryKind::StaleBroadcaster;
        else if (kind == "sybil_swarm") spec.kind = AdversaryKind::SybilSwarm;
        else bad("'adversaries.kind' unknown: " + kind);
        spec.from = opt_u64(a, "from", 0);
        spec.to = opt_u64(a, "to", run_ticks);
        if (spec.from >= spec.to) bad("'adversaries' window needs from < to");
        if (spec.kind == AdversaryKind::SybilSwarm) {
            spec.swarm_size = static_cast<uint32_t>(get_u64(a, "size"));
            if (spec.swarm_size == 0) bad("'adversaries.size' must be positive");
            spec.swarm_label = opt_str(a, "label", "swarm");
            spec.swarm_view_sn = opt_u64(a, "view_sn", spec.swarm_view_sn);
        } else {
            uint64_t node = get_u64(a, "node");
            if (node >= node_count) bad("'adversaries.node' out of range");
            spec.node = static_cast<NodeId>(node);
        }
        out.push_back(std::move(spec));
    }
    return out;
}

TrafficSpec parse_traffic(const Json& j, uint32_t node_count, Tick run_ticks) {
    TrafficSpec t;
    if (!j.contains("traffic")) return t;
    const Json& v = j.at("traffic");
    std::string kind = opt_str(v, "kind", "none");
    if (kind == "none") return t;
    if (kind != "auto") bad("'traffic.kind' must be none or auto");
    t.enabled = true;
    t.per_tick = static_cast<uint32_t>(get_u64(v, "per_tick"));
    t.volume = opt_u64(v, "volume", 1);
    t.fee = opt_u64(v, "fee", 0);
    t.from = opt_u64(v, "from", 0);
    t.to = opt_u64(v, "to", run_ticks);
    if (t.from >= t.to) bad("'traffic' window needs from < to");
    if (v.contains("exclude")) t.exclude = node_list(v.at("exclude"), "traffic.exclude", node_count);
    if (t.exclude.size() + 2 > node_count)
        bad("'traffic.exclude' leaves fewer than two participants");
    return t;
}

TilpSpec parse_tilp(const Json& j) {
    TilpSpec t;
    if (!j.contains("tilp")) return t;
    const Json& v = j.at("tilp");
    std::string kind = opt_str(v, "kind", "none");
    if (kind == "none") return t;
    if (kind != "explicit") bad("'tilp.kind' must be none or explicit");
    t.enabled = true;
    const Json& locs = require(v, "locations");
    if (!locs.is_array() || locs.empty()) bad("'tilp.locations' must be a non-empty array");
    for (const Json& e : locs) {
        if (!e.is_string()) bad("'tilp.locations' entries must be strings");
        t.locations.push_back(e.get<std::string>());
    }
    return t;
}

void parse_criteria(const Json& j, AgentCriteria& ac, VesterCriteria& vc) {
    if (j.contains("agent_criteria")) {
        const Json& v = j.at("agent_criteria");
        ac.min_tx_fee = opt_u64(v, "min_tx_fee", ac.min_tx_fee);
        ac.min_fee_per_package = opt_u64(v, "min_fee_per_package", ac.min_fee_per_package);
        ac.max_package_bytes = opt_u64(v, "max_package_bytes", ac.max_package_bytes);
        if (ac.max_package_bytes == 0) bad("'agent_criteria.max_package_bytes' must be positive");
    }
    if (j.contains("vester_criteria")) {
        const Json& v = j.at("vester_criteria");
        vc.min_fee_per_package = opt_u64(v, "min_fee_per_package", vc.min_fee_per_package);
        vc.min_agent_balance = opt_u64(v, "min_agent_balance", vc.min_agent_balance);
        vc.min_vester_balance = opt_u64(v, "min_vester_balance", vc.min_vester_balance);
    }
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    Json j = Json::parse(json_text, nullptr, false);
    if (j.is_discarded()) bad("document is not valid JSON");
    if (!j.is_object()) bad("document must be a JSON object");

    Scenario sc;
    sc.version = static_cast<uint32_t>(opt_u64(j, "version", 1));
    if (sc.version != 1) bad("unsupported version " + std::to_string(sc.version));
    sc.name = opt_str(j, "name", "unnamed");
    sc.seed = opt_u64(j, "seed", 0);
    sc.run_ticks = get_u64(j, "run_ticks");
    if (sc.run_ticks == 0) bad("'run_ticks' must be positive");
    sc.total_supply = get_u64(j, "total_supply");
    if (sc.total_supply == 0) bad("'total_supply' must be positive");
    uint64_t nodes = get_u64(j, "nodes");
    if (nodes == 0 || nodes > 100'000) bad("'nodes' must lie in [1, 100000]");
    sc.node_count = static_cast<uint32_t>(nodes);

    sc.stakes = parse_stakes(j, sc.node_count, sc.total_supply);
    if (j.contains("roles")) {
        const Json& r = j.at("roles");
        if (r.contains("agents")) sc.agents = node_list(r.at("agents"), "roles.agents", sc.node_count);
        if (r.contains("vesters"))
            sc.vesters = node_list(r.at("vesters"), "roles.vesters", sc.node_count);
    }
    sc.params = parse_params(j);
    sc.update_period = opt_u64(j, "update_period", 1);
    if (sc.update_period == 0) bad("'update_period' must be positive");
    sc.rebroadcast_every = opt_u64(j, "rebroadcast_every", 10);
    if (sc.rebroadcast_every == 0) bad("'rebroadcast_every' must be positive");
    sc.latency = parse_latency(j);
    sc.loss_probability = opt_prob(j, "loss_probability", 0.0);
    if (sc.loss_probability >= 1.0) bad("'loss_probability' must be below 1");
    sc.partitions = parse_partitions(j, sc.node_count, sc.run_ticks);
    sc.adversaries = parse_adversaries(j, sc.node_count, sc.run_ticks);
    sc.traffic = parse_traffic(j, sc.node_count, sc.run_ticks);
    sc.audit_ratio = opt_prob(j, "audit_ratio", 0.001);
    sc.audit_cap = static_cast<uint32_t>(opt_u64(j, "audit_cap", 256));
    if (sc.audit_cap == 0) bad("'audit_cap' must be positive");
    sc.blacklist_decay = static_cast<uint32_t>(opt_u64(j, "blacklist_decay", 10));
    if (sc.blacklist_decay == 0) bad("'blacklist_decay' must be positive");
    sc.locations = static_cast<uint32_t>(opt_u64(j, "locations", 1));
    if (sc.locations == 0) bad("'locations' must be positive");
    sc.tilp = parse_tilp(j);
    parse_criteria(j, sc.agent_criteria, sc.vester_criteria);
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("scenario: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& sc) {
    Json j;
    j["version"] = sc.version;
    j["name"] = sc.name;
    j["seed"] = sc.seed;
    j["run_ticks"] = sc.run_ticks;
    j["total_supply"] = sc.total_supply;
    j["nodes"] = sc.node_count;
    Json stakes;
    switch (sc.stakes.kind) {
        case StakeKind::Uniform: stakes["kind"] = "uniform"; break;
        case StakeKind::Pareto:
            stakes["kind"] = "pareto";
            stakes["alpha"] = sc.stakes.pareto_alpha;
            break;
        case StakeKind::Explicit:
            stakes["kind"] = "explicit";
            stakes["amounts"] = sc.stakes.amounts;
            break;
        case StakeKind::Genesis: stakes["kind"] = "genesis"; break;
    }
    j["stakes"] = stakes;
    j["roles"] = Json{{"agents", sc.agents}, {"vesters", sc.vesters}};
    Json params;
    switch (sc.params.kind) {
        case ParamKind::Auto: params["kind"] = "auto"; break;
        case ParamKind::Accounts:
            params["kind"] = "accounts";
            params["accounts"] = sc.params.accounts;
            break;
        case ParamKind::Digits:
            params["kind"] = "digits";
            params["digits"] = sc.params.digits;
            break;
    }
    j["params"] = params;
    j["update_period"] = sc.update_period;
    j["rebroadcast_every"] = sc.rebroadcast_every;
    if (sc.latency.kind == LatencyKind::Fixed) {
        j["latency"] = Json{{"kind", "fixed"}, {"ticks", sc.latency.fixed}};
    } else {
        j["latency"] = Json{{"kind", "uniform"}, {"lo", sc.latency.lo}, {"hi", sc.latency.hi}};
    }
    j["loss_probability"] = sc.loss_probability;
    Json parts = Json::array();
    for (const auto& w : sc.partitions)
        parts.push_back(Json{{"from", w.from}, {"to", w.to}, {"groups", w.groups}});
    j["partitions"] = parts;
    Json advs = Json::array();
    for (const auto& a : sc.adversaries) {
        Json e;
        switch (a.kind) {
            case AdversaryKind::DoublePackageAgent: e["kind"] = "double_package_agent"; break;
            case AdversaryKind::DoubleVester: e["kind"] = "double_vester"; break;
            case AdversaryKind::WithholdingVester: e["kind"] = "withholding_vester"; break;
            case AdversaryKind::StaleBroadcaster: e["kind"] = "stale_broadcaster"; break;
            case AdversaryKind::SybilSwarm: e["kind"] = "sybil_swarm"; break;
        }
        if (a.kind == AdversaryKind::SybilSwarm) {
            e["size"] = a.swarm_size;
            e["label"] = a.swarm_label;
            e["view_sn"] = a.swarm_view_sn;
        } else {
            e["node"] = a.node;
        }
        e["from"] = a.from;
        e["to"] = a.to;
        advs.push_back(e);
    }
    j["adversaries"] = advs;
    if (sc.traffic.enabled) {
        j["traffic"] = Json{{"kind", "auto"},       {"per_tick", sc.traffic.per_tick},
                            {"volume", sc.traffic.volume}, {"fee", sc.traffic.fee},
                            {"from", sc.traffic.from},     {"to", sc.traffic.to},
                            {"exclude", sc.traffic.exclude}};
    } else {
        j["traffic"] = Json{{"kind", "none"}};
    }
    j["audit_ratio"] = sc.audit_ratio;
    j["audit_cap"] = sc.audit_cap;
    j["blacklist_decay"] = sc.blacklist_decay;
    j["locations"] = sc.locations;
    if (sc.tilp.enabled) {
        j["tilp"] = Json{{"kind", "explicit"}, {"locations", sc.tilp.locations}};
    } else {
        j["tilp"] = Json{{"kind", "none"}};
    }
    j["agent_criteria"] = Json{{"min_tx_fee", sc.agent_criteria.min_tx_fee},
                               {"min_fee_per_package", sc.agent_criteria.min_fee_per_package},
                               {"max_package_bytes", sc.agent_criteria.max_package_bytes}};
    j["vester_criteria"] = Json{{"min_fee_per_package", sc.vester_criteria.min_fee_per_package},
                                {"min_agent_balance", sc.vester_criteria.min_agent_balance},
                                {"min_vester_balance", sc.vester_criteria.min_vester_balance}};
    return j.dump(2) + "\n";
}

}  // namespace ccsim
