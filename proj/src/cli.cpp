#include "powecon/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "powecon/analytics.hpp"
#include "powecon/config.hpp"
#include "powecon/output.hpp"
#include "powecon/report.hpp"
#include "powecon/scenario.hpp"

namespace powecon::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path presets_dir()
{
    if (const char* env = std::getenv("POWECON_PRESETS_DIR"); env && *env)
        return env;
    return POWECON_DEFAULT_PRESETS_DIR;
}

fs::path data_dir()
{
    if (const char* env = std::getenv("POWECON_DATA_DIR"); env && *env)
        return env;
    return POWECON_DEFAULT_DATA_DIR;
}

fs::path resolve_config(const std::string& config_or_preset)
{
    const fs::path direct(config_or_preset);
    if (fs::is_regular_file(direct))
        return direct;
    const fs::path preset = presets_dir() / (config_or_preset + ".yaml");
    if (fs::is_regular_file(preset))
        return preset;
    throw output::IoError(config_or_preset + ": no such file or preset (looked in " + presets_dir().string() + ")");
}

namespace {

std::string g(double v, int digits = 6)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ---- analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    double btc_price = 48'000.0;
    double reward = 6.25;
    double fees = 0.25;
    double hash_rate = 1.5e8;
    double block_time = 600.0;
    double supply = 18.9e6;
    double energy_price = 0.05;
    std::optional<double> hash_value;
    std::vector<std::string> gens;
    std::optional<double> efficiency;
    std::optional<double> hardware_price;
    double attack_energy_price = 0.10;
    std::optional<double> attack_target;
    double squeeze = 1.0;
    std::string frontier = "NG";
    bool as_json = false;
};

int do_analyze(const AnalyzeArgs& a, std::ostream& out)
{
    using namespace analytics;
    const MarketSnapshot s{BtcPrice(a.btc_price), BtcAmount(a.reward), BtcAmount(a.fees), HashRate(a.hash_rate),
                           Duration(a.block_time), BtcAmount(a.supply)};
    const HashPrice computed_vh = hash_value(s);
    const HashPrice vh = a.hash_value ? HashPrice(*a.hash_value) : computed_vh;
    const AnnualShare vt = mining_share(s.reward, s.fees, s.supply, s.block_time);

    const auto catalog = config::load_catalog(data_dir() / "hardware-catalog.yaml");
    std::vector<market::HardwareGen> gens;
    const std::vector<std::string> wanted = a.gens.empty() ? std::vector<std::string>{"OG", "NG"} : a.gens;
    for (const auto& id : wanted) {
        const auto it = std::find_if(catalog.begin(), catalog.end(), [&](const auto& x) { return x.id == id; });
        if (it == catalog.end())
            throw DomainError("unknown generation '" + id + "' (catalog has OG, NG)");
        gens.push_back(*it);
    }
    struct Row {
        std::string id;
        double alpha;
        double ph;
    };
    std::vector<Row> rows;
    for (const auto& gen : gens)
        rows.push_back({gen.id, gen.efficiency.value(), gen.hash_price().value()});
    if (a.efficiency && a.hardware_price)
        rows.push_back({"custom", *a.efficiency, *a.hardware_price});

    const auto frontier =
        std::find_if(catalog.begin(), catalog.end(), [&](const auto& x) { return x.id == a.frontier; });
    if (frontier == catalog.end())
        throw DomainError("unknown frontier generation '" + a.frontier + "'");
    const HashRate target(a.attack_target.value_or(a.hash_rate));
    MarketSnapshot attack_state = s;
    if (a.hash_value) // value the network at the overridden V_h
        attack_state.btc_price = BtcPrice(vh.value() * a.hash_rate * a.block_time / (a.reward + a.fees));
    const auto attack = attack_cost(*frontier, target, EnergyPrice(a.attack_energy_price), attack_state, a.squeeze);

    if (a.as_json) {
        json doc;
        doc["hash_value_usd_per_TH"] = vh.value();
        doc["hash_value_source"] = a.hash_value ? "override" : "snapshot";
        doc["mining_share_frac_per_yr"] = vt.value();
        doc["energy_price_usd_per_kWh"] = a.energy_price;
        json feas = json::array();
        for (const auto& r : rows) {
            const auto cost = marginal_cost(EnergyPrice(a.energy_price), Efficiency(r.alpha), HashPrice(r.ph));
            const auto f = feasibility(vh, cost);
            feas.push_back({{"gen", r.id},
                            {"efficiency_kWh_per_TH", r.alpha},
                            {"hash_price_usd_per_TH", r.ph},
                            {"cost_usd_per_TH", cost.value()},
                            {"feasible", f.feasible},
                            {"epsilon", f.margin}});
        }
        doc["feasibility"] = feas;
        doc["attack"] = {{"frontier", frontier->id},
                         {"target_THs", target.value()},
                         {"squeeze", a.squeeze},
                         {"capex_usd", attack.capex.value()},
                         {"opex_usd_per_yr", attack.opex_rate.value()},
                         {"honest_revenue_post_entry_usd_per_yr", attack.honest_revenue_rate.value()},
                         {"honest_revenue_pre_entry_usd_per_yr", attack.honest_revenue_rate_pre_entry.value()},
                         {"total_mining_value_usd_per_yr", attack.total_mining_value_rate.value()}};
        out << doc.dump(2) << '\n';
        return kExitOk;
    }

    out << "snapshot: p_b = " << g(a.btc_price) << " $/BTC, R = " << g(a.reward) << " BTC, F = " << g(a.fees)
        << " BTC, H = " << g(a.hash_rate) << " TH/s, tau = " << g(a.block_time) << " s, M = " << g(a.supply)
        << " BTC\n";
    out << "V_h = " << g(vh.value()) << " $/TH" << (a.hash_value ? " (override; snapshot gives " + g(computed_vh.value()) + ")" : "")
        << '\n';
    out << "V_t = " << g(vt.value()) << " frac/yr\n";
    out << "feasibility at p_e = " << g(a.energy_price) << " $/kWh:\n";
    for (const auto& r : rows) {
        const auto cost = marginal_cost(EnergyPrice(a.energy_price), Efficiency(r.alpha), HashPrice(r.ph));
        const auto f = feasibility(vh, cost);
        out << "  " << r.id << ": alpha = " << g(r.alpha) << " kWh/TH, p_h = " << g(r.ph) << " $/TH, cost = "
            << g(cost.value()) << " $/TH, " << (f.feasible ? "feasible" : "infeasible") << ", epsilon = "
            << g(f.margin, 4) << '\n';
    }
    out << "attack with " << frontier->id << " hardware, target H = " << g(target.value()) << " TH/s, p_e = "
        << g(a.attack_energy_price) << " $/kWh, squeeze = " << g(a.squeeze) << ":\n";
    out << "  capex = " << g(attack.capex.value(), 4) << " $\n";
    out << "  opex = " << g(attack.opex_rate.value(), 4) << " $/yr\n";
    out << "  honest revenue = " << g(attack.honest_revenue_rate.value(), 4) << " $/yr (post-entry V_h), "
        << g(attack.honest_revenue_rate_pre_entry.value(), 4) << " $/yr (pre-entry V_h)\n";
    out << "  total mining value = " << g(attack.total_mining_value_rate.value(), 4) << " $/yr\n";
    return kExitOk;
}

// ---- limits -----------------------------------------------------------------

struct LimitsArgs {
    std::vector<double> temperatures{77.0, 300.0, 350.0};
    std::vector<double> ratios{1.0, 1e3, 1e6};
    double share = 0.018;
    double supply = 21e6;
    bool as_json = false;
};

int do_limits(const LimitsArgs& a, std::ostream& out)
{
    using namespace analytics;
    json rows = json::array();
    if (!a.as_json) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-8s %-22s %-12s %-18s %s\n", "T_K", "alpha_min_kWh_per_TH", "pb_over_pe",
                      "H_ceiling_THs", "coefficient_THs");
        out << "V_t = " << g(a.share) << " frac/yr, M = " << g(a.supply) << " BTC, 256-bit outputs\n" << buf;
    }
    for (double t : a.temperatures) {
        const Efficiency floor = landauer_limit(Temperature(t));
        for (double r : a.ratios) {
            if (floor.value() == 0.0) {
                rows.push_back({{"T_K", t}, {"alpha_min_kWh_per_TH", 0.0}, {"pb_over_pe", r}, {"H_ceiling_THs", nullptr}});
                if (!a.as_json)
                    out << g(t) << "  0  " << g(r) << "  unbounded\n";
                continue;
            }
            const double h =
                hash_rate_ceiling(AnnualShare(a.share), BtcAmount(a.supply), floor, BtcPrice(r), EnergyPrice(1.0))
                    .value();
            const double coeff = h / r;
            rows.push_back({{"T_K", t},
                            {"alpha_min_kWh_per_TH", floor.value()},
                            {"pb_over_pe", r},
                            {"H_ceiling_THs", h},
                            {"coefficient_THs", coeff}});
            if (!a.as_json) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "%-8s %-22s %-12s %-18s %s\n", g(t).c_str(), g(floor.value(), 6).c_str(),
                              g(r).c_str(), g(h, 6).c_str(), g(coeff, 6).c_str());
                out << buf;
            }
        }
    }
    if (a.as_json)
        out << json{{"share_frac_per_yr", a.share}, {"supply_btc", a.supply}, {"rows", rows}}.dump(2) << '\n';
    return kExitOk;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "csv";
    std::string mode;
    unsigned replicates = 1;
    unsigned threads = 0;
};

void write_run(const fs::path& dir, const scenario::SimConfig& cfg, output::Format format)
{
    fs::create_directories(dir);
    std::optional<scenario::LongRunProjection> projection;
    scenario::Trajectory traj;
    if (cfg.market.evolution.enabled) {
        projection = scenario::long_run_projection(cfg);
        traj = projection->trajectory;
    } else {
        traj = scenario::run(cfg);
    }
    output::write_text(dir / "config.yaml", config::dump_config(cfg));
    output::emit_trajectory(traj, format, dir / ("trajectory" + std::string(output::format_extension(format))),
                            cfg.name);
    output::write_text(dir / "run.json", report::run_summary_json(cfg, traj, projection));
}

int do_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err)
{
    const auto format = output::parse_format(a.format);
    if (!format)
        throw DomainError("unknown format '" + a.format + "'");
    const fs::path path = resolve_config(a.config);
    auto loaded = config::load_config(path);
    for (const auto& w : loaded.warnings)
        err << "warning: " << w << '\n';
    scenario::SimConfig cfg = loaded.config;
    if (cfg.name.empty())
        cfg.name = path.stem().string();
    if (a.seed)
        cfg.seed = *a.seed;
    if (a.mode == "deterministic")
        cfg.mode = scenario::Mode::Deterministic;
    else if (a.mode == "stochastic")
        cfg.mode = scenario::Mode::Stochastic;

    fs::path dir = a.out_dir;
    if (dir.empty()) {
        const char* env = std::getenv("POWECON_OUT_DIR");
        dir = fs::path(env && *env ? env : "runs") / cfg.name;
    }

    if (a.replicates <= 1) {
        write_run(dir, cfg, *format);
        out << "wrote " << dir.string() << '\n';
        return kExitOk;
    }
    // Independent seeds run concurrently, one output directory each.
    std::vector<scenario::SimConfig> configs;
    for (unsigned k = 0; k < a.replicates; ++k) {
        configs.push_back(cfg);
        configs.back().seed = cfg.seed + k;
    }
    const auto trajs = scenario::run_batch(configs, a.threads);
    for (std::size_t k = 0; k < configs.size(); ++k) {
        const fs::path sub = dir / ("seed-" + std::to_string(configs[k].seed));
        fs::create_directories(sub);
        output::write_text(sub / "config.yaml", config::dump_config(configs[k]));
        output::emit_trajectory(trajs[k], *format,
                                sub / ("trajectory" + std::string(output::format_extension(*format))), cfg.name);
        output::write_text(sub / "run.json", report::run_summary_json(configs[k], trajs[k], std::nullopt));
        out << "wrote " << sub.string() << '\n';
    }
    return kExitOk;
}

// ---- presets ---------------------------------------------------------------

int do_presets(bool list, const std::string& show, std::ostream& out)
{
    if (!show.empty()) {
        out << config::dump_config(config::load_config(resolve_config(show)).config);
        return kExitOk;
    }
    (void)list;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(presets_dir()))
        if (e.path().extension() == ".yaml")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        const auto cfg = config::load_config(f).config;
        char buf[512];
        std::snprintf(buf, sizeof buf, "%-22s %s\n", f.stem().string().c_str(), cfg.description.c_str());
        out << buf;
    }
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Proof-of-work mining economics: closed-form analytics and scenario simulation", "powecon"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Feasibility, V_h, V_t and attack cost for a market snapshot");
    analyze->add_option("--pb", an.btc_price, "BTC price, $/BTC")->capture_default_str();
    analyze->add_option("--reward", an.reward, "block reward R, BTC")->capture_default_str();
    analyze->add_option("--fees", an.fees, "fees per block F, BTC")->capture_default_str();
    analyze->add_option("--hash-rate", an.hash_rate, "network hash rate H, TH/s")->capture_default_str();
    analyze->add_option("--tau", an.block_time, "block time, s")->capture_default_str();
    analyze->add_option("--supply", an.supply, "minted supply M, BTC")->capture_default_str();
    analyze->add_option("--pe", an.energy_price, "energy price for feasibility, $/kWh")->capture_default_str();
    analyze->add_option("--vh", an.hash_value, "use this V_h ($/TH) instead of the snapshot's");
    analyze->add_option("--gen", an.gens, "catalog generations to evaluate (default OG NG)");
    auto* alpha = analyze->add_option("--alpha", an.efficiency, "custom hardware efficiency, kWh/TH");
    auto* ph = analyze->add_option("--ph", an.hardware_price, "custom hardware hash price, $/TH");
    alpha->needs(ph);
    ph->needs(alpha);
    analyze->add_option("--attack-pe", an.attack_energy_price, "attacker energy price, $/kWh")->capture_default_str();
    analyze->add_option("--attack-target", an.attack_target, "attacker hash rate, TH/s (default: H)");
    analyze->add_option("--squeeze", an.squeeze, "hardware price multiplier for the attacker")->capture_default_str();
    analyze->add_option("--frontier", an.frontier, "attacker hardware generation")->capture_default_str();
    analyze->add_flag("--json", an.as_json, "emit JSON");

    LimitsArgs li;
    auto* limits = app.add_subcommand("limits", "Landauer floor and hash-rate ceiling table");
    limits->add_option("--temperature", li.temperatures, "temperatures, K")->capture_default_str();
    limits->add_option("--ratio", li.ratios, "p_b/p_e ratios, kWh/BTC")->capture_default_str();
    limits->add_option("--share", li.share, "mining share V_t, frac/yr")->capture_default_str();
    limits->add_option("--supply", li.supply, "supply M, BTC")->capture_default_str();
    limits->add_flag("--json", li.as_json, "emit JSON");

    SimulateArgs si;
    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write its trajectory");
    simulate->add_option("--config", si.config, "scenario file or preset name")->required();
    simulate->add_option("--seed", si.seed, "override the scenario seed");
    simulate->add_option("--out", si.out_dir, "output directory (default $POWECON_OUT_DIR/<name> or runs/<name>)");
    simulate->add_option("--format", si.format, "trajectory format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    simulate->add_option("--mode", si.mode, "override the scenario mode")
        ->check(CLI::IsMember({"deterministic", "stochastic"}));
    simulate->add_option("--replicates", si.replicates, "run N consecutive seeds concurrently")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--threads", si.threads, "worker threads for replicates (0: hardware concurrency)");

    std::string run_dir;
    auto* rep = app.add_subcommand("report", "Invariant checks and reference comparison for a run directory");
    rep->add_option("--run", run_dir, "directory written by simulate")->required();

    bool list = false;
    std::string show;
    auto* presets = app.add_subcommand("presets", "List or print shipped scenarios");
    auto* list_flag = presets->add_flag("--list", list, "list presets with descriptions");
    presets->add_option("--show", show, "print a preset in normalized form")->excludes(list_flag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* sub = nullptr;
        for (const auto* s : app.get_subcommands())
            sub = s;
        err << (sub ? sub->help() : app.help());
        return kExitUsage;
    }

    try {
        if (*analyze)
            return do_analyze(an, out);
        if (*limits)
            return do_limits(li, out);
        if (*simulate)
            return do_simulate(si, out, err);
        if (*rep) {
            const auto r = report::build_run_report(run_dir, data_dir());
            report::print_report(r, out);
            return r.passed() ? kExitOk : kExitDomain;
        }
        if (*presets)
            return do_presets(list, show, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    return kExitUsage;
}

} // namespace powecon::cli
