#include "powecon/config.hpp"

#include <algorithm>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace powecon::config {

namespace fs = std::filesystem;
using scenario::SimConfig;

namespace {

struct UnitSpelling {
    std::string_view unit;
    double scale;
};

std::vector<UnitSpelling> spellings(Dimension dim)
{
    switch (dim) {
    case Dimension::Duration:
        return {{"s", 1.0}, {"min", 60.0}, {"h", 3600.0}, {"d", 86400.0}, {"yr", kSecondsPerYear}};
    case Dimension::HashRate:
        return {{"TH/s", 1.0}, {"PH/s", 1e3}, {"EH/s", 1e6}};
    case Dimension::Efficiency:
        return {{"kWh/TH", 1.0}, {"J/TH", 1.0 / kJoulesPerKwh}};
    case Dimension::HashPrice:
        return {{"$/TH", 1.0}};
    case Dimension::EnergyPrice:
        return {{"$/kWh", 1.0}, {"$/MWh", 1e-3}};
    case Dimension::BtcPrice:
        return {{"$/BTC", 1.0}};
    case Dimension::Btc:
        return {{"BTC", 1.0}};
    case Dimension::Usd:
        return {{"$", 1.0}};
    case Dimension::Temperature:
        return {{"K", 1.0}};
    case Dimension::Rate:
        return {{"1/s", 1.0}};
    case Dimension::ByteRate:
        return {{"bytes/s", 1.0}};
    case Dimension::Difficulty:
        return {{"TH", 1.0}};
    case Dimension::Blocks:
        return {{"blocks", 1.0}};
    }
    return {};
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

// Parses a full-string double. Rejects trailing garbage, NaN and inf.
std::optional<double> parse_number(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        return std::nullopt;
    return v;
}

// Shortest text that parses back to exactly `v`.
std::string shortest(double v)
{
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

class Reader {
public:
    Reader(std::string source, fs::path base_dir) : source_(std::move(source)), base_dir_(std::move(base_dir)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& path, const std::string& msg) const
    {
        std::string where = source_;
        const YAML::Mark m = node.Mark();
        if (m.line >= 0)
            where += ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
        throw ConfigError(where + ": " + path + ": " + msg);
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(source_ + ": " + msg); }

    void expect_map(const YAML::Node& node, const std::string& path, std::initializer_list<std::string_view> keys) const
    {
        if (!node.IsMap())
            fail(node, path, "expected a mapping");
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                fail(kv.first, join(path, key), "unknown key");
        }
    }

    static std::string join(const std::string& path, std::string_view key)
    {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }

    std::string scalar(const YAML::Node& node, const std::string& path) const
    {
        if (!node.IsScalar())
            fail(node, path, "expected a scalar");
        return node.Scalar();
    }

    double quantity(const YAML::Node& node, const std::string& path, Dimension dim) const
    {
        const std::string text = scalar(node, path);
        try {
            return parse_quantity(text, dim);
        } catch (const ConfigError& e) {
            fail(node, path, e.what());
        }
    }

    std::uint64_t blocks(const YAML::Node& node, const std::string& path) const
    {
        const double v = quantity(node, path, Dimension::Blocks);
        if (v < 0.0 || v != std::floor(v) || v > 9.0e15)
            fail(node, path, "block count must be a nonnegative integer");
        return static_cast<std::uint64_t>(v);
    }

    double number(const YAML::Node& node, const std::string& path) const
    {
        const auto v = parse_number(trim(scalar(node, path)));
        if (!v)
            fail(node, path, "expected a plain number");
        return *v;
    }

    std::uint64_t integer(const YAML::Node& node, const std::string& path) const
    {
        const std::string s = trim(scalar(node, path));
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            fail(node, path, "expected a nonnegative integer");
        errno = 0;
        const auto v = std::strtoull(s.c_str(), nullptr, 10);
        if (errno == ERANGE)
            fail(node, path, "integer out of range");
        return v;
    }

    bool boolean(const YAML::Node& node, const std::string& path) const
    {
        const std::string s = scalar(node, path);
        if (s == "true")
            return true;
        if (s == "false")
            return false;
        fail(node, path, "expected true or false");
    }

    std::string string(const YAML::Node& node, const std::string& path) const
    {
        const std::string s = scalar(node, path);
        if (s.empty())
            fail(node, path, "must not be empty");
        return s;
    }

    const std::string& source() const { return source_; }
    const fs::path& base_dir() const { return base_dir_; }

private:
    std::string source_;
    fs::path base_dir_;
};

// Each read_* overlays the keys present in `node` onto `out`.

void read_protocol(const Reader& r, const YAML::Node& node, protocol::ProtocolParams& p)
{
    const std::string path = "protocol";
    r.expect_map(node, path,
                 {"target_block_time", "retarget_interval", "retarget_clamp", "halving_interval", "initial_reward",
                  "supply_cap"});
    if (auto n = node["target_block_time"])
        p.target_block_time = Duration(r.quantity(n, path + ".target_block_time", Dimension::Duration));
    if (auto n = node["retarget_interval"])
        p.retarget_interval = r.blocks(n, path + ".retarget_interval");
    if (auto n = node["retarget_clamp"])
        p.retarget_clamp = r.number(n, path + ".retarget_clamp");
    if (auto n = node["halving_interval"])
        p.halving_interval = r.blocks(n, path + ".halving_interval");
    if (auto n = node["initial_reward"])
        p.initial_reward = BtcAmount(r.quantity(n, path + ".initial_reward", Dimension::Btc));
    if (auto n = node["supply_cap"])
        p.supply_cap = BtcAmount(r.quantity(n, path + ".supply_cap", Dimension::Btc));
}

void read_market(const Reader& r, const YAML::Node& node, const std::string& path, market::MarketParams& p)
{
    r.expect_map(node, path,
                 {"entry_elasticity", "exit_elasticity", "moore_doubling_period", "landauer_temperature",
                  "reference_energy_price", "epsilon_tolerance", "hardware_price_multiplier", "hardware_evolution"});
    if (auto n = node["entry_elasticity"])
        p.entry_elasticity = r.quantity(n, path + ".entry_elasticity", Dimension::Rate);
    if (auto n = node["exit_elasticity"])
        p.exit_elasticity = r.quantity(n, path + ".exit_elasticity", Dimension::Rate);
    if (auto n = node["moore_doubling_period"])
        p.moore_doubling_period = Duration(r.quantity(n, path + ".moore_doubling_period", Dimension::Duration));
    if (auto n = node["landauer_temperature"])
        p.landauer_temperature = Temperature(r.quantity(n, path + ".landauer_temperature", Dimension::Temperature));
    if (auto n = node["reference_energy_price"])
        p.reference_energy_price =
            EnergyPrice(r.quantity(n, path + ".reference_energy_price", Dimension::EnergyPrice));
    if (auto n = node["epsilon_tolerance"])
        p.epsilon_tolerance = r.number(n, path + ".epsilon_tolerance");
    if (auto n = node["hardware_price_multiplier"])
        p.hardware_price_multiplier = r.number(n, path + ".hardware_price_multiplier");
    if (auto ev = node["hardware_evolution"]) {
        const std::string epath = path + ".hardware_evolution";
        r.expect_map(ev, epath, {"enabled", "base", "cadence"});
        if (auto n = ev["enabled"])
            p.evolution.enabled = r.boolean(n, epath + ".enabled");
        if (auto n = ev["base"])
            p.evolution.base_gen = r.string(n, epath + ".base");
        if (auto n = ev["cadence"])
            p.evolution.cadence = Duration(r.quantity(n, epath + ".cadence", Dimension::Duration));
        if (p.evolution.enabled && p.evolution.base_gen.empty())
            r.fail(ev, epath + ".base", "required when enabled");
    }
    try {
        p.validate();
    } catch (const DomainError& e) {
        r.fail(node, path, e.what());
    }
}

market::HardwareGen read_gen(const Reader& r, const YAML::Node& node, const std::string& path)
{
    r.expect_map(node, path, {"id", "efficiency", "unit_hash_rate", "unit_price", "lifetime", "available_from"});
    for (const char* key : {"id", "efficiency", "unit_hash_rate", "unit_price"})
        if (!node[key])
            r.fail(node, Reader::join(path, key), "required");
    market::HardwareGen g{
        r.string(node["id"], path + ".id"),
        Efficiency(r.quantity(node["efficiency"], path + ".efficiency", Dimension::Efficiency)),
        HashRate(r.quantity(node["unit_hash_rate"], path + ".unit_hash_rate", Dimension::HashRate)),
        Usd(r.quantity(node["unit_price"], path + ".unit_price", Dimension::Usd)),
    };
    if (auto n = node["lifetime"])
        g.lifetime = Duration(r.quantity(n, path + ".lifetime", Dimension::Duration));
    if (auto n = node["available_from"])
        g.available_from = r.quantity(n, path + ".available_from", Dimension::Duration);
    return g;
}

using Catalog = std::map<std::string, market::HardwareGen>;

// A hardware entry is either an inline definition or a catalog id.
market::HardwareGen read_gen_or_ref(const Reader& r, const YAML::Node& node, const std::string& path,
                                    const Catalog& catalog)
{
    if (node.IsScalar()) {
        const std::string id = r.string(node, path);
        const auto it = catalog.find(id);
        if (it == catalog.end())
            r.fail(node, path, "'" + id + "' is not in the hardware catalog");
        return it->second;
    }
    return read_gen(r, node, path);
}

Catalog read_catalog_file(const Reader& outer, const YAML::Node& ref)
{
    fs::path p = outer.string(ref, "hardware_catalog");
    if (p.is_relative())
        p = outer.base_dir() / p;
    Catalog out;
    for (auto& g : load_catalog(p))
        out.emplace(g.id, std::move(g));
    return out;
}

scenario::FeeCurve read_curve(const Reader& r, const YAML::Node& node, const std::string& path)
{
    r.expect_map(node, path, {"quadratic", "table"});
    if (node.size() != 1)
        r.fail(node, path, "expected exactly one of quadratic, table");
    if (auto q = node["quadratic"]) {
        const std::string qp = path + ".quadratic";
        r.expect_map(q, qp, {"reference_fee", "threshold"});
        scenario::QuadraticFeeCurve c;
        if (auto n = q["reference_fee"])
            c.reference_fee = BtcAmount(r.quantity(n, qp + ".reference_fee", Dimension::Btc));
        if (auto n = q["threshold"])
            c.threshold = r.number(n, qp + ".threshold");
        return c;
    }
    const auto t = node["table"];
    const std::string tp = path + ".table";
    if (!t.IsSequence() || t.size() == 0)
        r.fail(t, tp, "expected a nonempty list");
    scenario::TableFeeCurve c;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const std::string ip = tp + "[" + std::to_string(i) + "]";
        r.expect_map(t[i], ip, {"utilization", "fee"});
        if (!t[i]["utilization"] || !t[i]["fee"])
            r.fail(t[i], ip, "utilization and fee are required");
        c.points.emplace_back(r.number(t[i]["utilization"], ip + ".utilization"),
                              BtcAmount(r.quantity(t[i]["fee"], ip + ".fee", Dimension::Btc)));
    }
    return c;
}

scenario::FeeModel read_fees(const Reader& r, const YAML::Node& node, const std::string& path)
{
    r.expect_map(node, path, {"constant", "congestion"});
    if (node.size() != 1)
        r.fail(node, path, "expected exactly one of constant, congestion");
    scenario::FeeModel model;
    if (auto n = node["constant"]) {
        model = scenario::ConstantFee{BtcAmount(r.quantity(n, path + ".constant", Dimension::Btc))};
    } else {
        const auto c = node["congestion"];
        const std::string cp = path + ".congestion";
        r.expect_map(c, cp, {"capacity", "demand", "curve"});
        scenario::CongestionFee m;
        if (auto n = c["capacity"])
            m.capacity = r.quantity(n, cp + ".capacity", Dimension::ByteRate);
        const auto d = c["demand"];
        if (!d || !d.IsSequence() || d.size() == 0)
            r.fail(d ? d : c, cp + ".demand", "expected a nonempty list");
        for (std::size_t i = 0; i < d.size(); ++i) {
            const std::string ip = cp + ".demand[" + std::to_string(i) + "]";
            r.expect_map(d[i], ip, {"at", "rate"});
            if (!d[i]["at"] || !d[i]["rate"])
                r.fail(d[i], ip, "at and rate are required");
            m.demand.push_back({r.quantity(d[i]["at"], ip + ".at", Dimension::Duration),
                                r.quantity(d[i]["rate"], ip + ".rate", Dimension::ByteRate)});
        }
        if (auto n = c["curve"])
            m.curve = read_curve(r, n, cp + ".curve");
        model = m;
    }
    try {
        scenario::validate_fee_model(model);
    } catch (const DomainError& e) {
        r.fail(node, path, e.what());
    }
    return model;
}

scenario::Action read_action(const Reader& r, const YAML::Node& node, const std::string& key,
                             const std::string& path, const SimConfig& base, const Catalog& catalog)
{
    namespace a = scenario::actions;
    const YAML::Node v = node[key];
    const std::string p = path + "." + key;
    if (key == "set_btc_price")
        return a::SetBtcPrice{BtcPrice(r.quantity(v, p, Dimension::BtcPrice))};
    if (key == "scale_population") {
        r.expect_map(v, p, {"factor", "gen", "tier", "retire_capacity"});
        if (!v["factor"])
            r.fail(v, p + ".factor", "required");
        a::ScalePopulation s;
        s.factor = r.number(v["factor"], p + ".factor");
        if (auto n = v["gen"])
            s.selector.gen = r.string(n, p + ".gen");
        if (auto n = v["tier"])
            s.selector.tier = r.string(n, p + ".tier");
        if (auto n = v["retire_capacity"])
            s.retire_capacity = r.boolean(n, p + ".retire_capacity");
        return s;
    }
    if (key == "set_energy_price") {
        r.expect_map(v, p, {"tier", "price"});
        if (!v["tier"] || !v["price"])
            r.fail(v, p, "tier and price are required");
        return a::SetEnergyPrice{r.string(v["tier"], p + ".tier"),
                                 EnergyPrice(r.quantity(v["price"], p + ".price", Dimension::EnergyPrice))};
    }
    if (key == "introduce_generation")
        return a::IntroduceGeneration{read_gen_or_ref(r, v, p, catalog)};
    if (key == "set_fee_model")
        return a::SetFeeModel{read_fees(r, v, p)};
    // set_market_params: keys overlay the scenario's market section.
    market::MarketParams m = base.market;
    read_market(r, v, p, m);
    return a::SetMarketParams{m};
}

constexpr std::string_view kActionKeys[] = {"set_btc_price",        "scale_population", "set_energy_price",
                                            "introduce_generation", "set_fee_model",    "set_market_params"};

void read_events(const Reader& r, const YAML::Node& node, SimConfig& cfg, const Catalog& catalog)
{
    if (!node.IsSequence())
        r.fail(node, "events", "expected a list");
    for (std::size_t i = 0; i < node.size(); ++i) {
        const YAML::Node e = node[i];
        const std::string path = "events[" + std::to_string(i) + "]";
        r.expect_map(e, path,
                     {"at", "set_btc_price", "scale_population", "set_energy_price", "introduce_generation",
                      "set_fee_model", "set_market_params"});
        if (!e["at"])
            r.fail(e, path + ".at", "required");
        std::string action_key;
        for (const auto key : kActionKeys) {
            if (!e[std::string(key)])
                continue;
            if (!action_key.empty())
                r.fail(e, path, "more than one action");
            action_key = key;
        }
        if (action_key.empty())
            r.fail(e, path, "missing action");
        cfg.events.push_back({r.quantity(e["at"], path + ".at", Dimension::Duration),
                              read_action(r, e, action_key, path, cfg, catalog)});
    }
}

LoadResult read_document(const Reader& r, const YAML::Node& root)
{
    if (!root.IsMap())
        r.fail(root, "<document>", "expected a mapping");
    r.expect_map(root, "",
                 {"schema_version", "name", "description", "simulation", "protocol", "market", "hardware_catalog",
                  "hardware", "energy_tiers", "population", "fees", "events", "equilibrium"});
    if (!root["schema_version"])
        r.fail(root, "schema_version", "required");
    const auto version = r.integer(root["schema_version"], "schema_version");
    if (version != static_cast<std::uint64_t>(kSchemaVersion))
        r.fail(root["schema_version"], "schema_version",
               "unsupported version " + std::to_string(version) + " (expected " + std::to_string(kSchemaVersion) +
                   ")");

    LoadResult out;
    SimConfig& cfg = out.config;
    if (auto n = root["name"])
        cfg.name = r.scalar(n, "name");
    if (auto n = root["description"])
        cfg.description = r.scalar(n, "description");

    if (auto sim = root["simulation"]) {
        const std::string p = "simulation";
        r.expect_map(sim, p,
                     {"horizon", "seed", "mode", "record_interval", "start_height", "initial_btc_price",
                      "initial_difficulty", "allow_negative_energy_price"});
        if (auto n = sim["horizon"])
            cfg.horizon = r.quantity(n, p + ".horizon", Dimension::Duration);
        if (auto n = sim["seed"])
            cfg.seed = r.integer(n, p + ".seed");
        if (auto n = sim["mode"]) {
            const std::string m = r.scalar(n, p + ".mode");
            if (m == "deterministic")
                cfg.mode = scenario::Mode::Deterministic;
            else if (m == "stochastic")
                cfg.mode = scenario::Mode::Stochastic;
            else
                r.fail(n, p + ".mode", "expected deterministic or stochastic");
        }
        if (auto n = sim["record_interval"])
            cfg.record_interval = r.blocks(n, p + ".record_interval");
        if (auto n = sim["start_height"])
            cfg.start_height = r.blocks(n, p + ".start_height");
        if (auto n = sim["initial_btc_price"]) {
            const double v = r.quantity(n, p + ".initial_btc_price", Dimension::BtcPrice);
            if (!(v > 0.0))
                r.fail(n, p + ".initial_btc_price", "must be > 0");
            cfg.initial_btc_price = BtcPrice(v);
        }
        if (auto n = sim["initial_difficulty"]) {
            const double v = r.quantity(n, p + ".initial_difficulty", Dimension::Difficulty);
            if (!(v > 0.0))
                r.fail(n, p + ".initial_difficulty", "must be > 0");
            cfg.initial_difficulty = Difficulty(v);
        }
        if (auto n = sim["allow_negative_energy_price"])
            cfg.allow_negative_energy_price = r.boolean(n, p + ".allow_negative_energy_price");
    }
    if (auto n = root["protocol"])
        read_protocol(r, n, cfg.protocol);
    if (auto n = root["market"])
        read_market(r, n, "market", cfg.market);

    Catalog catalog;
    if (auto n = root["hardware_catalog"])
        catalog = read_catalog_file(r, n);

    const auto hw = root["hardware"];
    if (!hw || !hw.IsSequence() || hw.size() == 0)
        r.fail(hw ? hw : root, "hardware", "expected a nonempty list");
    for (std::size_t i = 0; i < hw.size(); ++i)
        cfg.environment.gens.push_back(read_gen_or_ref(r, hw[i], "hardware[" + std::to_string(i) + "]", catalog));

    const auto tiers = root["energy_tiers"];
    if (!tiers || !tiers.IsSequence() || tiers.size() == 0)
        r.fail(tiers ? tiers : root, "energy_tiers", "expected a nonempty list");
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const std::string p = "energy_tiers[" + std::to_string(i) + "]";
        const auto t = tiers[i];
        r.expect_map(t, p, {"name", "price", "capacity"});
        if (!t["name"] || !t["price"])
            r.fail(t, p, "name and price are required");
        market::EnergyTier tier{r.string(t["name"], p + ".name"),
                                EnergyPrice(r.quantity(t["price"], p + ".price", Dimension::EnergyPrice)),
                                std::nullopt};
        if (auto c = t["capacity"]; c && r.scalar(c, p + ".capacity") != "unlimited")
            tier.capacity = HashRate(r.quantity(c, p + ".capacity", Dimension::HashRate));
        cfg.environment.tiers.push_back(tier);
    }

    if (auto pop = root["population"]) {
        if (!pop.IsSequence())
            r.fail(pop, "population", "expected a list");
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const std::string p = "population[" + std::to_string(i) + "]";
            const auto c = pop[i];
            r.expect_map(c, p, {"gen", "tier", "machines", "hash_rate", "sunk"});
            if (!c["gen"] || !c["tier"])
                r.fail(c, p, "gen and tier are required");
            const std::string gen_id = r.string(c["gen"], p + ".gen");
            const auto gen = cfg.environment.find_gen(gen_id);
            if (!gen)
                r.fail(c["gen"], p + ".gen", "unknown generation '" + gen_id + "'");
            const std::string tier_name = r.string(c["tier"], p + ".tier");
            const auto tier = cfg.environment.find_tier(tier_name);
            if (!tier)
                r.fail(c["tier"], p + ".tier", "unknown tier '" + tier_name + "'");
            if (static_cast<bool>(c["machines"]) == static_cast<bool>(c["hash_rate"]))
                r.fail(c, p, "exactly one of machines, hash_rate is required");
            market::MinerCohort cohort{*gen, *tier, 0.0, false};
            if (auto n = c["machines"])
                cohort.machine_count = r.number(n, p + ".machines");
            else
                cohort.machine_count = r.quantity(c["hash_rate"], p + ".hash_rate", Dimension::HashRate) /
                                       cfg.environment.gens[*gen].unit_hash_rate.value();
            if (auto n = c["sunk"])
                cohort.sunk = r.boolean(n, p + ".sunk");
            cfg.population.cohorts.push_back(cohort);
        }
    }

    if (auto n = root["fees"])
        cfg.fees = read_fees(r, n, "fees");
    if (auto n = root["events"])
        read_events(r, n, cfg, catalog);

    if (auto eq = root["equilibrium"]) {
        r.expect_map(eq, "equilibrium", {"window", "tolerance"});
        if (auto n = eq["window"])
            cfg.equilibrium.window = r.blocks(n, "equilibrium.window");
        if (auto n = eq["tolerance"])
            cfg.equilibrium.tolerance = r.number(n, "equilibrium.tolerance");
    }

    try {
        cfg.validate();
    } catch (const DomainError& e) {
        r.fail(e.what());
    }

    for (std::size_t i = 0; i < cfg.events.size(); ++i)
        if (cfg.events[i].at > cfg.horizon)
            out.warnings.push_back("events[" + std::to_string(i) + "] is scheduled after the horizon");
    if (cfg.population.cohorts.empty())
        out.warnings.push_back("population is empty; the fleet starts from entrants only");
    return out;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw ConfigError(path.string() + ": read error");
    return ss.str();
}

YAML::Node parse_yaml(std::string_view text, const std::string& source)
{
    try {
        return YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": parse error: " + e.msg);
    }
}

// ---- dump -----------------------------------------------------------------

void emit_q(YAML::Emitter& out, const char* key, double v, Dimension dim)
{
    out << YAML::Key << key << YAML::Value << format_quantity(v, dim);
}

void emit_blocks(YAML::Emitter& out, const char* key, std::uint64_t v)
{
    out << YAML::Key << key << YAML::Value << (std::to_string(v) + " blocks");
}

void emit_num(YAML::Emitter& out, const char* key, double v)
{
    out << YAML::Key << key << YAML::Value << shortest(v);
}

void emit_gen(YAML::Emitter& out, const market::HardwareGen& g)
{
    out << YAML::BeginMap;
    out << YAML::Key << "id" << YAML::Value << YAML::DoubleQuoted << g.id;
    emit_q(out, "efficiency", g.efficiency.value(), Dimension::Efficiency);
    emit_q(out, "unit_hash_rate", g.unit_hash_rate.value(), Dimension::HashRate);
    emit_q(out, "unit_price", g.unit_price.value(), Dimension::Usd);
    emit_q(out, "lifetime", g.lifetime.value(), Dimension::Duration);
    emit_q(out, "available_from", g.available_from, Dimension::Duration);
    out << YAML::EndMap;
}

void emit_market(YAML::Emitter& out, const market::MarketParams& m)
{
    out << YAML::BeginMap;
    emit_q(out, "entry_elasticity", m.entry_elasticity, Dimension::Rate);
    emit_q(out, "exit_elasticity", m.exit_elasticity, Dimension::Rate);
    emit_q(out, "moore_doubling_period", m.moore_doubling_period.value(), Dimension::Duration);
    emit_q(out, "landauer_temperature", m.landauer_temperature.value(), Dimension::Temperature);
    emit_q(out, "reference_energy_price", m.reference_energy_price.value(), Dimension::EnergyPrice);
    emit_num(out, "epsilon_tolerance", m.epsilon_tolerance);
    emit_num(out, "hardware_price_multiplier", m.hardware_price_multiplier);
    out << YAML::Key << "hardware_evolution" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "enabled" << YAML::Value << (m.evolution.enabled ? "true" : "false");
    if (!m.evolution.base_gen.empty())
        out << YAML::Key << "base" << YAML::Value << YAML::DoubleQuoted << m.evolution.base_gen;
    emit_q(out, "cadence", m.evolution.cadence.value(), Dimension::Duration);
    out << YAML::EndMap;
    out << YAML::EndMap;
}

void emit_fees(YAML::Emitter& out, const scenario::FeeModel& model)
{
    out << YAML::BeginMap;
    if (const auto* c = std::get_if<scenario::ConstantFee>(&model)) {
        emit_q(out, "constant", c->amount.value(), Dimension::Btc);
    } else {
        const auto& g = std::get<scenario::CongestionFee>(model);
        out << YAML::Key << "congestion" << YAML::Value << YAML::BeginMap;
        emit_q(out, "capacity", g.capacity, Dimension::ByteRate);
        out << YAML::Key << "demand" << YAML::Value << YAML::BeginSeq;
        for (const auto& d : g.demand) {
            out << YAML::Flow << YAML::BeginMap;
            emit_q(out, "at", d.at, Dimension::Duration);
            emit_q(out, "rate", d.rate, Dimension::ByteRate);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
        out << YAML::Key << "curve" << YAML::Value << YAML::BeginMap;
        if (const auto* q = std::get_if<scenario::QuadraticFeeCurve>(&g.curve)) {
            out << YAML::Key << "quadratic" << YAML::Value << YAML::BeginMap;
            emit_q(out, "reference_fee", q->reference_fee.value(), Dimension::Btc);
            emit_num(out, "threshold", q->threshold);
            out << YAML::EndMap;
        } else {
            out << YAML::Key << "table" << YAML::Value << YAML::BeginSeq;
            for (const auto& [u, f] : std::get<scenario::TableFeeCurve>(g.curve).points) {
                out << YAML::Flow << YAML::BeginMap;
                emit_num(out, "utilization", u);
                emit_q(out, "fee", f.value(), Dimension::Btc);
                out << YAML::EndMap;
            }
            out << YAML::EndSeq;
        }
        out << YAML::EndMap;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
}

} // namespace

std::string_view canonical_unit(Dimension dim)
{
    return spellings(dim).front().unit;
}

double parse_quantity(std::string_view text, Dimension dim)
{
    const std::string s = trim(text);
    const auto space = s.find_first_of(" \t");
    const auto expected = std::string(canonical_unit(dim));
    if (space == std::string::npos)
        throw ConfigError("'" + s + "' lacks a unit (expected " + expected + ")");
    const auto number = parse_number(s.substr(0, space));
    if (!number)
        throw ConfigError("'" + s + "' does not start with a finite number");
    const std::string unit = trim(s.substr(space));
    for (const auto& sp : spellings(dim))
        if (unit == sp.unit)
            return *number * sp.scale;
    throw ConfigError("unit '" + unit + "' is not valid here (expected " + expected + ")");
}

std::string format_quantity(double value, Dimension dim)
{
    return shortest(value) + " " + std::string(canonical_unit(dim));
}

std::vector<market::HardwareGen> load_catalog(const fs::path& path)
{
    const std::string source = path.string();
    const Reader r(source, path.parent_path());
    const YAML::Node root = parse_yaml(read_file(path), source);
    r.expect_map(root, "", {"schema_version", "hardware"});
    if (!root["schema_version"] || r.integer(root["schema_version"], "schema_version") != static_cast<std::uint64_t>(kSchemaVersion))
        r.fail(root, "schema_version", "expected " + std::to_string(kSchemaVersion));
    const auto hw = root["hardware"];
    if (!hw || !hw.IsSequence())
        r.fail(root, "hardware", "expected a list");
    std::vector<market::HardwareGen> out;
    for (std::size_t i = 0; i < hw.size(); ++i)
        out.push_back(read_gen(r, hw[i], "hardware[" + std::to_string(i) + "]"));
    return out;
}

LoadResult parse_config(std::string_view text, const std::string& source, const fs::path& base_dir)
{
    const Reader r(source, base_dir);
    return read_document(r, parse_yaml(text, source));
}

LoadResult load_config(const fs::path& path)
{
    return parse_config(read_file(path), path.string(), path.parent_path());
}

std::string dump_config(const SimConfig& cfg)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "schema_version" << YAML::Value << kSchemaVersion;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << cfg.name;
    out << YAML::Key << "description" << YAML::Value << YAML::DoubleQuoted << cfg.description;

    out << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
    emit_q(out, "horizon", cfg.horizon, Dimension::Duration);
    out << YAML::Key << "seed" << YAML::Value << std::to_string(cfg.seed);
    out << YAML::Key << "mode" << YAML::Value
        << (cfg.mode == scenario::Mode::Deterministic ? "deterministic" : "stochastic");
    emit_blocks(out, "record_interval", cfg.record_interval);
    emit_blocks(out, "start_height", cfg.start_height);
    emit_q(out, "initial_btc_price", cfg.initial_btc_price.value(), Dimension::BtcPrice);
    if (cfg.initial_difficulty)
        emit_q(out, "initial_difficulty", cfg.initial_difficulty->value(), Dimension::Difficulty);
    out << YAML::Key << "allow_negative_energy_price" << YAML::Value
        << (cfg.allow_negative_energy_price ? "true" : "false");
    out << YAML::EndMap;

    const auto& p = cfg.protocol;
    out << YAML::Key << "protocol" << YAML::Value << YAML::BeginMap;
    emit_q(out, "target_block_time", p.target_block_time.value(), Dimension::Duration);
    emit_blocks(out, "retarget_interval", p.retarget_interval);
    emit_num(out, "retarget_clamp", p.retarget_clamp);
    emit_blocks(out, "halving_interval", p.halving_interval);
    emit_q(out, "initial_reward", p.initial_reward.value(), Dimension::Btc);
    emit_q(out, "supply_cap", p.supply_cap.value(), Dimension::Btc);
    out << YAML::EndMap;

    out << YAML::Key << "market" << YAML::Value;
    emit_market(out, cfg.market);

    out << YAML::Key << "hardware" << YAML::Value << YAML::BeginSeq;
    for (const auto& g : cfg.environment.gens)
        emit_gen(out, g);
    out << YAML::EndSeq;

    out << YAML::Key << "energy_tiers" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : cfg.environment.tiers) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << t.name;
        emit_q(out, "price", t.price.value(), Dimension::EnergyPrice);
        if (t.capacity)
            emit_q(out, "capacity", t.capacity->value(), Dimension::HashRate);
        else
            out << YAML::Key << "capacity" << YAML::Value << "unlimited";
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "population" << YAML::Value << YAML::BeginSeq;
    for (const auto& c : cfg.population.cohorts) {
        out << YAML::BeginMap;
        out << YAML::Key << "gen" << YAML::Value << YAML::DoubleQuoted << cfg.environment.gens[c.gen].id;
        out << YAML::Key << "tier" << YAML::Value << YAML::DoubleQuoted << cfg.environment.tiers[c.tier].name;
        emit_num(out, "machines", c.machine_count);
        out << YAML::Key << "sunk" << YAML::Value << (c.sunk ? "true" : "false");
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "fees" << YAML::Value;
    emit_fees(out, cfg.fees);

    out << YAML::Key << "events" << YAML::Value << YAML::BeginSeq;
    for (const auto& e : cfg.events) {
        out << YAML::BeginMap;
        emit_q(out, "at", e.at, Dimension::Duration);
        const std::string key = scenario::action_name(e.action);
        out << YAML::Key << key << YAML::Value;
        std::visit(scenario::overloaded{
                       [&](const scenario::actions::SetBtcPrice& a) {
                           out << format_quantity(a.price.value(), Dimension::BtcPrice);
                       },
                       [&](const scenario::actions::ScalePopulation& a) {
                           out << YAML::BeginMap;
                           emit_num(out, "factor", a.factor);
                           if (a.selector.gen)
                               out << YAML::Key << "gen" << YAML::Value << YAML::DoubleQuoted << *a.selector.gen;
                           if (a.selector.tier)
                               out << YAML::Key << "tier" << YAML::Value << YAML::DoubleQuoted << *a.selector.tier;
                           out << YAML::Key << "retire_capacity" << YAML::Value
                               << (a.retire_capacity ? "true" : "false");
                           out << YAML::EndMap;
                       },
                       [&](const scenario::actions::SetEnergyPrice& a) {
                           out << YAML::BeginMap;
                           out << YAML::Key << "tier" << YAML::Value << YAML::DoubleQuoted << a.tier;
                           emit_q(out, "price", a.price.value(), Dimension::EnergyPrice);
                           out << YAML::EndMap;
                       },
                       [&](const scenario::actions::IntroduceGeneration& a) { emit_gen(out, a.gen); },
                       [&](const scenario::actions::SetFeeModel& a) { emit_fees(out, a.model); },
                       [&](const scenario::actions::SetMarketParams& a) { emit_market(out, a.params); },
                   },
                   e.action);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "equilibrium" << YAML::Value << YAML::BeginMap;
    emit_blocks(out, "window", cfg.equilibrium.window);
    emit_num(out, "tolerance", cfg.equilibrium.tolerance);
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace powecon::config
