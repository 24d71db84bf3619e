// Command-line front end: scenario runs, urn experiments, genesis
// construction, the load model, and parameter derivation. Every subcommand
// is a pure function of its flags; all randomness flows from --seed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ccsim/ballmodel.hpp"
#include "ccsim/genesis.hpp"
#include "ccsim/netsim.hpp"
#include "ccsim/scenario.hpp"

namespace fs = std::filesystem;
using namespace ccsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitConfig = 2;

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void write_file(const fs::path& path, const Bytes& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(content.data()),
              static_cast<std::streamsize>(content.size()));
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir);
    return p;
}

int cmd_sim_run(const std::string& scenario_path, bool seed_set, uint64_t seed,
                const std::string& out_dir) {
    Scenario sc = load_scenario_file(scenario_path);
    if (seed_set) sc.seed = seed;
    Simulation sim(std::move(sc));
    MetricsReport report = sim.run();

    fs::path dir = ensure_dir(out_dir);
    write_file(dir / (report.scenario_name + "_metrics.csv"), report.csv());
    write_file(dir / (report.scenario_name + "_summary.json"), report.json_summary());
    std::cout << report.json_summary();

    if (!report.invariant_violations.empty()) {
        for (const std::string& v : report.invariant_violations)
            std::cerr << "invariant violation: " << v << "\n";
        return kExitInvariant;
    }
    return kExitOk;
}

int cmd_urn_run(uint32_t red, uint32_t black, uint32_t sample, uint64_t seed,
                uint64_t max_steps) {
    UrnState s{red, black, sample};
    AbsorptionResult r = run_to_absorption(s, max_steps, seed);
    if (r.absorbed) {
        std::cout << "absorbed at step " << r.steps << ": red=" << r.final_state.red
                  << " black=" << r.final_state.black << "\n";
    } else {
        std::cout << "not absorbed within " << max_steps << " steps: red=" << r.final_state.red
                  << " black=" << r.final_state.black << "\n";
    }
    return kExitOk;
}

int cmd_urn_curve(uint32_t red, uint32_t black, uint32_t sample, uint64_t seed, uint32_t trials,
                  std::vector<uint64_t> grid, const std::string& out_dir) {
    std::sort(grid.begin(), grid.end());
    auto curve = absorption_curve(UrnState{red, black, sample}, grid, trials, seed);
    std::ostringstream csv;
    csv << "steps,fraction_absorbed\n";
    for (const CurvePoint& p : curve) {
        std::ostringstream num;
        num.precision(6);
        num << std::fixed << p.fraction_absorbed;
        csv << p.steps << ',' << num.str() << '\n';
    }
    std::cout << csv.str();
    if (!out_dir.empty()) write_file(ensure_dir(out_dir) / "urn_curve.csv", csv.str());
    return kExitOk;
}

int cmd_genesis_build(uint32_t registrants, Amount total, uint64_t seed,
                      const std::string& out_dir) {
    const SignatureScheme& scheme = test_scheme();
    DistributionPolicy policy;
    policy.total_supply = total;
    policy.sponsor = scheme.keygen(Rng(seed, "sponsor").next()).pub;
    policy.deadline = 0;
    std::set<AccountId> eligible;
    std::vector<KeyPair> legacy, fresh;
    for (uint32_t i = 0; i < registrants; ++i) {
        legacy.push_back(scheme.keygen(Rng(seed, "legacy", i).next()));
        fresh.push_back(scheme.keygen(Rng(seed, "fresh", i).next()));
        eligible.insert(legacy.back().pub);
    }
    Registrar reg(policy, std::move(eligible));
    for (uint32_t i = 0; i < registrants; ++i) {
        auto err = reg.submit(scheme, make_registration(scheme, legacy[i], fresh[i].pub), 0);
        if (err) throw ConfigError(std::string("registration rejected: ") + to_string(*err));
    }
    auto view = build_initial_view(policy, reg.accepted());
    if (!view) throw ConfigError("no registrations accepted");
    std::cout << "accounts=" << view->records.size() << " recycled=" << view->recycled.balance
              << " total=" << view->total() << "\n";
    std::cout << "hash=" << view->hash.hex() << "\n";
    if (!out_dir.empty()) write_file(ensure_dir(out_dir) / "genesis.view", serialize(*view));
    return kExitOk;
}

int cmd_genesis_import(const std::string& snapshot_path, Amount total,
                       const std::string& out_dir) {
    std::ifstream in(snapshot_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + snapshot_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    SnapshotError err{};
    auto view = import_snapshot(buf.str(), total, &err);
    if (!view) throw ConfigError(std::string("snapshot rejected: ") + to_string(err));
    std::cout << "accounts=" << view->records.size() << " recycled=" << view->recycled.balance
              << " total=" << view->total() << "\n";
    std::cout << "hash=" << view->hash.hex() << "\n";
    if (!out_dir.empty()) write_file(ensure_dir(out_dir) / "genesis.view", serialize(*view));
    return kExitOk;
}

int cmd_load_model(uint64_t vesters, bool txs_set, uint64_t txs, double rate, uint64_t period) {
    if (!txs_set) txs = txs_per_package(rate, period);
    LoadModel m = load_model(vesters, txs, period);
    std::cout << "vester_list_len=" << m.vester_list_len << "\n";
    std::cout << "txs_per_package=" << txs << "\n";
    std::cout << "package_bytes=" << m.package_bytes << "\n";
    std::cout << "verifications_per_sec=" << m.verifications_per_sec << "\n";
    return kExitOk;
}

int cmd_params(uint64_t accounts) {
    ConsensusParams p = derive_params(accounts);
    std::cout << "B=" << p.digits << "\n";
    std::cout << "M=" << p.sample_size << "\n";
    std::cout << "N=" << p.stability_rounds << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"converged-consensus simulator"};
    app.require_subcommand(1);

    // --- sim run ----------------------------------------------------------
    CLI::App* sim = app.add_subcommand("sim", "network simulation");
    sim->require_subcommand(1);
    CLI::App* sim_run = sim->add_subcommand("run", "run a scenario file");
    std::string scenario_path;
    uint64_t sim_seed = 0;
    std::string sim_out = ".";
    sim_run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    CLI::Option* sim_seed_opt =
        sim_run->add_option("--seed", sim_seed, "override the scenario seed");
    sim_run->add_option("--out", sim_out, "output directory")->capture_default_str();

    // --- urn run / urn curve ---------------------------------------------
    CLI::App* urn = app.add_subcommand("urn", "two-color urn experiments");
    urn->require_subcommand(1);
    uint32_t red = 100, black = 100, sample = 5, trials = 1000;
    uint64_t urn_seed = 0, max_steps = 1'000'000;
    std::vector<uint64_t> grid{0, 50, 100, 200, 400, 800, 1600, 3000};
    std::string urn_out;
    CLI::App* urn_run = urn->add_subcommand("run", "one urn to absorption");
    urn_run->add_option("--red", red, "initial red balls")->capture_default_str();
    urn_run->add_option("--black", black, "initial black balls")->capture_default_str();
    urn_run->add_option("--sample", sample, "balls drawn per step")->capture_default_str()
        ->check(CLI::Range(1u, 1'000'000u));
    urn_run->add_option("--seed", urn_seed, "rng seed")->capture_default_str();
    urn_run->add_option("--max-steps", max_steps, "step cap")->capture_default_str();
    CLI::App* urn_curve = urn->add_subcommand("curve", "absorption-probability curve");
    urn_curve->add_option("--red", red, "initial red balls")->capture_default_str();
    urn_curve->add_option("--black", black, "initial black balls")->capture_default_str();
    urn_curve->add_option("--sample", sample, "balls drawn per step")->capture_default_str()
        ->check(CLI::Range(1u, 1'000'000u));
    urn_curve->add_option("--seed", urn_seed, "rng seed")->capture_default_str();
    urn_curve->add_option("--trials", trials, "independent trials")->capture_default_str()
        ->check(CLI::Range(1u, 10'000'000u));
    urn_curve->add_option("--max-steps", max_steps, "per-trial step cap")->capture_default_str();
    urn_curve->add_option("--grid", grid, "step counts to report")->delimiter(',');
    urn_curve->add_option("--out", urn_out, "also write urn_curve.csv here");

    // --- genesis build / import ------------------------------------------
    CLI::App* genesis = app.add_subcommand("genesis", "initial view construction");
    genesis->require_subcommand(1);
    uint32_t registrants = 10;
    Amount total = kDefaultTotalSupply;
    uint64_t gen_seed = 0;
    std::string gen_out, snapshot_path;
    CLI::App* gen_build = genesis->add_subcommand("build", "launch distribution");
    gen_build->add_option("--registrants", registrants, "accepted registrants")->capture_default_str()
        ->check(CLI::Range(1u, 1'000'000u));
    gen_build->add_option("--total", total, "total supply")->capture_default_str()->check(CLI::Range(Amount{1}, ~Amount{0}));
    gen_build->add_option("--seed", gen_seed, "rng seed")->capture_default_str();
    gen_build->add_option("--out", gen_out, "write genesis.view here");
    CLI::App* gen_import = genesis->add_subcommand("import", "snapshot import");
    gen_import->add_option("--snapshot", snapshot_path, "snapshot text file")->required();
    gen_import->add_option("--total", total, "new total supply")->capture_default_str()
        ->check(CLI::Range(Amount{1}, ~Amount{0}));
    gen_import->add_option("--out", gen_out, "write genesis.view here");

    // --- load-model -------------------------------------------------------
    CLI::App* lm = app.add_subcommand("load-model", "package-cycle load model");
    uint64_t vesters =
        required_vester_list_len(mul_div(kDefaultTotalSupply, 51, 100), 3'000'000'000ULL,
                                 7'000'000'000ULL, 50'000);
    uint64_t txs = 0;
    double rate = 0.8;
    uint64_t period = 600;
    CLI::Option* txs_opt = lm->add_option("--txs", txs, "transactions per package");
    lm->add_option("--vesters", vesters, "vester list length")->capture_default_str();
    lm->add_option("--rate", rate, "sustained transactions per second")->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    lm->add_option("--period", period, "package period in seconds")->capture_default_str()
        ->check(CLI::Range(uint64_t{1}, ~uint64_t{0}));

    // --- params -----------------------------------------------------------
    CLI::App* params = app.add_subcommand("params", "derive sampling parameters");
    uint64_t accounts = 0;
    params->add_option("accounts", accounts, "count of serious accounts (A)")
        ->required()
        ->check(CLI::Range(uint64_t{1}, ~uint64_t{0}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim_run->parsed()) {
            return cmd_sim_run(scenario_path, sim_seed_opt->count() > 0, sim_seed, sim_out);
        }
        if (urn_run->parsed()) return cmd_urn_run(red, black, sample, urn_seed, max_steps);
        if (urn_curve->parsed())
            return cmd_urn_curve(red, black, sample, urn_seed, trials, grid, urn_out);
        if (gen_build->parsed()) return cmd_genesis_build(registrants, total, gen_seed, gen_out);
        if (gen_import->parsed()) return cmd_genesis_import(snapshot_path, total, gen_out);
        if (lm->parsed()) return cmd_load_model(vesters, txs_opt->count() > 0, txs, rate, period);
        if (params->parsed()) return cmd_params(accounts);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariant;
    }
    return kExitConfig;
}
