#include "powecon/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "powecon/analytics.hpp"
#include "powecon/config.hpp"

namespace powecon::report {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g(double v, int digits = 6)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double rel_err(double a, double b)
{
    const double scale = std::max(std::fabs(a), std::fabs(b));
    return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(s);
    while (std::getline(ss, cell, sep))
        out.push_back(cell);
    return out;
}

double to_double(const std::string& s)
{
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw DomainError("tolerance: bad number '" + s + "'");
    return v;
}

double round_sig1(double v)
{
    if (v == 0.0 || !std::isfinite(v))
        return v;
    const double e = std::floor(std::log10(std::fabs(v)));
    const double scale = std::pow(10.0, e);
    return std::round(v / scale) * scale;
}

// The comparison values, keyed like data/paper-table.csv.
std::optional<double> compute_key(const std::string& key, const market::HardwareGen& og, const market::HardwareGen& ng)
{
    using namespace analytics;
    const Temperature room{300.0};
    const Efficiency floor = landauer_limit(room);
    const MarketSnapshot reference{BtcPrice(48'000.0), BtcAmount(6.25), BtcAmount(0.25), HashRate(1.5e8), Duration(600.0),
                                   BtcAmount(18.9e6)};
    const HashPrice vh{3e-6};
    // p_b chosen so that V_h = 3e-6 $/TH at H = 1.5e8 TH/s and tau = 600 s.
    const MarketSnapshot table_state{BtcPrice(3e-6 * 1.5e8 * 600.0 / 6.5), BtcAmount(6.25), BtcAmount(0.25),
                                     HashRate(1.5e8), Duration(600.0), BtcAmount(18.9e6)};
    const auto cost = [&](const market::HardwareGen& gen, double pe) {
        return marginal_cost(EnergyPrice(pe), gen.efficiency, gen.hash_price());
    };
    const auto pct2 = [](double share) { return std::round(share * 1e4) / 1e4; };
    const auto attack = [&] { return attack_cost(ng, HashRate(1.5e8), EnergyPrice(0.10), table_state); };
    const double floor_years =
        std::log2(ng.efficiency.value() / floor.value()) * 1.5; // doubling period in years

    if (key == "alpha_OG")
        return og.efficiency.value();
    if (key == "alpha_NG")
        return ng.efficiency.value();
    if (key == "ph_OG")
        return og.hash_price().value();
    if (key == "ph_NG")
        return ng.hash_price().value();
    if (key == "vh_reference")
        return hash_value(reference).value();
    if (key == "cost_OG")
        return cost(og, 0.05).value();
    if (key == "cost_NG")
        return cost(ng, 0.05).value();
    if (key == "eps_OG")
        return feasibility(vh, cost(og, 0.05)).margin;
    if (key == "eps_NG")
        return feasibility(vh, cost(ng, 0.05)).margin;
    if (key == "eps_OG_010")
        return feasibility(vh, cost(og, 0.10)).margin;
    if (key == "vt_f0")
        return pct2(mining_share(BtcAmount(6.25), BtcAmount(0.0), BtcAmount(18.9e6), Duration(600.0)).value());
    if (key == "vt_f03")
        return pct2(mining_share(BtcAmount(6.25), BtcAmount(0.3), BtcAmount(18.9e6), Duration(600.0)).value());
    if (key == "landauer_300K" || key == "landauer_exact")
        return floor.value();
    if (key == "ceiling_coefficient")
        return hash_rate_ceiling(AnnualShare(0.018), BtcAmount(21e6), floor, BtcPrice(1.0), EnergyPrice(1.0)).value();
    if (key == "ceiling_upper")
        return hash_rate_ceiling(AnnualShare(0.018), BtcAmount(21e6), floor, BtcPrice(1e6), EnergyPrice(1.0)).value();
    if (key == "improvement_factor")
        return ng.efficiency.value() / floor.value();
    if (key == "floor_years" || key == "floor_years_paper")
        return floor_years;
    if (key == "attack_capex")
        return attack().capex.value();
    if (key == "attack_opex")
        return attack().opex_rate.value();
    if (key == "mining_value")
        return attack().total_mining_value_rate.value();
    if (key == "honest_post_entry")
        return attack().honest_revenue_rate.value();
    if (key == "honest_pre_entry")
        return attack().honest_revenue_rate_pre_entry.value();
    return std::nullopt;
}

const market::HardwareGen& catalog_gen(const std::vector<market::HardwareGen>& gens, const std::string& id)
{
    for (const auto& gen : gens)
        if (gen.id == id)
            return gen;
    throw DomainError("hardware catalog lacks generation " + id);
}

} // namespace

bool Report::passed() const
{
    for (const auto& c : checks)
        if (!c.pass)
            return false;
    for (const auto& c : comparisons)
        if (c.pass && !*c.pass)
            return false;
    return true;
}

std::optional<bool> within_tolerance(double computed, double reference, const std::string& tolerance)
{
    const auto parts = split(tolerance, ':');
    if (parts.empty())
        throw DomainError("empty tolerance");
    const std::string& kind = parts[0];
    if (kind == "info")
        return std::nullopt;
    if (!std::isfinite(computed))
        return false;
    if (kind == "sig1")
        return rel_err(round_sig1(computed), reference) < 1e-12;
    if (kind == "max")
        return computed <= reference;
    if (kind == "within" && parts.size() == 3)
        return computed >= to_double(parts[1]) && computed <= to_double(parts[2]);
    if (parts.size() != 2)
        throw DomainError("malformed tolerance '" + tolerance + "'");
    const double x = to_double(parts[1]);
    if (kind == "rel")
        return std::fabs(computed - reference) <= x * std::fabs(reference);
    if (kind == "abs")
        return std::fabs(computed - reference) <= x;
    if (kind == "factor")
        return computed >= reference / x && computed <= reference * x;
    throw DomainError("unknown tolerance kind '" + kind + "'");
}

std::vector<Comparison> paper_comparison(const fs::path& table_csv, const fs::path& catalog)
{
    const auto gens = config::load_catalog(catalog);
    const auto& og = catalog_gen(gens, "OG");
    const auto& ng = catalog_gen(gens, "NG");

    std::istringstream in(output::read_text(table_csv));
    std::string line;
    std::getline(in, line);
    if (line != "key,quantity,unit,reference,provenance,tolerance")
        throw output::IoError(table_csv.string() + ": unexpected header");
    std::vector<Comparison> rows;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 6)
            throw output::IoError(table_csv.string() + ":" + std::to_string(n) + ": expected 6 fields");
        Comparison c{f[0], f[1], f[2], 0.0, to_double(f[3]), f[4], f[5], false};
        if (c.provenance != "PAPER" && c.provenance != "DERIVED")
            throw output::IoError(table_csv.string() + ":" + std::to_string(n) + ": provenance must be PAPER or DERIVED");
        if (const auto v = compute_key(c.key, og, ng)) {
            c.computed = *v;
            c.pass = within_tolerance(c.computed, c.reference, c.tolerance);
        } else {
            c.computed = std::nan("");
            c.pass = false;
        }
        rows.push_back(std::move(c));
    }
    return rows;
}

std::string run_summary_json(const scenario::SimConfig& config, const scenario::Trajectory& traj,
                             const std::optional<scenario::LongRunProjection>& projection)
{
    json doc;
    doc["schema_version"] = output::kOutputSchemaVersion;
    doc["name"] = config.name;
    doc["seed"] = config.seed;
    doc["mode"] = config.mode == scenario::Mode::Deterministic ? "deterministic" : "stochastic";
    doc["status"] = traj.status == scenario::RunStatus::Completed ? "completed" : "halted";
    doc["message"] = traj.message;
    doc["records"] = traj.records.size();

    const auto eq = scenario::detect_equilibrium(traj, config.equilibrium.window, config.equilibrium.tolerance);
    doc["equilibrium"] = {{"reached", eq.reached}, {"at_s", eq.at}};

    if (!traj.records.empty()) {
        const auto& last = traj.records.back();
        doc["terminal"] = {{"H_THs", last.hash_rate},
                           {"Vh_usd_per_TH", last.hash_value},
                           {"tau_window_s", last.tau_window},
                           {"Vt_frac_per_yr", last.mining_share},
                           {"energy_kWh_per_s", last.energy_rate}};
    }
    try {
        const auto tc = scenario::terminal_supply_curve(traj.final_state, config.protocol);
        const auto se = analytics::static_equilibrium(tc.curve, tc.revenue);
        doc["static_equilibrium"] = {{"H_THs", se.hash_rate.value()},
                                     {"Vh_usd_per_TH", se.hash_value.value()},
                                     {"diagnostic", se.diagnostic}};
    } catch (const DomainError& e) {
        doc["static_equilibrium"] = {{"error", e.what()}};
    }
    if (traj.landauer_floor_time)
        doc["landauer_floor_time_s"] = *traj.landauer_floor_time;
    else
        doc["landauer_floor_time_s"] = nullptr;
    if (projection) {
        doc["long_run"] = {{"terminal_H_THs", projection->terminal_hash_rate.value()},
                           {"ceiling_THs", projection->terminal_ceiling.value()},
                           {"frontier_efficiency_kWh_per_TH", projection->terminal_frontier_efficiency.value()}};
    }
    return doc.dump(2) + "\n";
}

std::vector<Check> trajectory_checks(const output::Table& t, const scenario::SimConfig& config)
{
    std::vector<Check> out;
    const auto n = t.rows.size();
    out.push_back({"trajectory has records", n > 0, std::to_string(n) + " records"});
    if (n == 0)
        return out;

    const auto col = [&](std::string_view name) { return t.require(name); };
    const std::size_t c_time = col("time_s"), c_height = col("height"), c_m = col("M_btc"),
                      c_tau = col("tau_window_s"), c_d = col("difficulty_TH"), c_vh = col("Vh_usd_per_TH"),
                      c_r = col("R_btc"), c_f = col("F_btc"), c_pb = col("pb_usd_per_btc");

    bool time_ok = true, height_ok = true, m_ok = true;
    for (std::size_t i = 1; i < n; ++i) {
        time_ok = time_ok && t.rows[i][c_time] > t.rows[i - 1][c_time];
        height_ok = height_ok && t.rows[i][c_height] > t.rows[i - 1][c_height];
        m_ok = m_ok && t.rows[i][c_m] >= t.rows[i - 1][c_m];
    }
    const double m_max = t.rows.back()[c_m];
    const bool capped = m_max <= config.protocol.supply_cap.value() * (1.0 + 1e-9);
    out.push_back({"time strictly increasing", time_ok, ""});
    out.push_back({"height strictly increasing", height_ok, ""});
    out.push_back({"minted supply nondecreasing and capped", m_ok && capped, "final M = " + g(m_max, 9) + " BTC"});

    // V_h H tau = p_b (R + F) with tau the expected interval D / H.
    // A 9-digit field is off by at most 5e-9 relative; each side multiplies
    // two rounded factors, so 2e-8 bounds the round-trip error.
    constexpr double kCsvTolerance = 2.1e-8;
    double worst = 0.0;
    for (const auto& row : t.rows) {
        const double lhs = row[c_vh] * row[c_d];
        const double rhs = row[c_pb] * (row[c_r] + row[c_f]);
        worst = std::max(worst, rel_err(lhs, rhs));
    }
    out.push_back({"conservation V_h*H*tau = p_b*(R+F)", worst <= kCsvTolerance,
                   "max rel err " + g(worst, 3) + " (tol " + g(kCsvTolerance, 2) + ", 9-digit CSV)"});

    const double interval = static_cast<double>(config.protocol.retarget_interval);
    const double target = config.protocol.target_block_time.value();
    const bool deterministic = config.mode == scenario::Mode::Deterministic;
    for (std::size_t i = 0; i < config.events.size(); ++i) {
        const auto* shock = std::get_if<scenario::actions::ScalePopulation>(&config.events[i].action);
        if (!shock || !(shock->factor > 0.0) || !(shock->factor < 1.0))
            continue;
        const std::string name = "control loop after events[" + std::to_string(i) + "] scale_population";
        const double at = config.events[i].at;
        std::size_t first = 0;
        while (first < n && t.rows[first][c_time] < at)
            ++first;
        if (first == n) {
            out.push_back({name, false, "no record after the event"});
            continue;
        }
        const double h_event = t.rows[first][c_height];
        const double boundary = std::ceil(h_event / interval) * interval;
        const int periods = deterministic ? 2 : 4;
        const double tol = deterministic ? 0.01 : 0.05;
        const double peak_floor = 0.95 * target / shock->factor;

        double peak = 0.0;
        std::optional<double> recovered;
        for (std::size_t k = first; k < n; ++k) {
            const double h = t.rows[k][c_height];
            if (h > h_event && h <= boundary + interval)
                peak = std::max(peak, t.rows[k][c_tau]);
            if (!recovered && h >= boundary + periods * interval)
                recovered = t.rows[k][c_tau];
        }
        if (!recovered) {
            out.push_back({name, false, "trajectory ends before " + std::to_string(periods) + " retarget periods"});
            continue;
        }
        const bool pass = peak >= peak_floor && std::fabs(*recovered - target) <= tol * target;
        out.push_back({name, pass,
                       "peak windowed tau " + g(peak) + " s (need >= " + g(peak_floor) + "), " + g(*recovered) +
                           " s after " + std::to_string(periods) + " periods (need " + g(target) + " +/- " +
                           g(tol * 100.0) + "%)"});
    }
    return out;
}

Report build_run_report(const fs::path& run_dir, const fs::path& data_dir)
{
    Report rep;
    const auto loaded = config::load_config(run_dir / "config.yaml");
    const auto& cfg = loaded.config;
    const json summary = [&] {
        try {
            return json::parse(output::read_text(run_dir / "run.json"));
        } catch (const json::exception& e) {
            throw output::IoError((run_dir / "run.json").string() + ": " + e.what());
        }
    }();

    output::Table table;
    if (fs::exists(run_dir / "trajectory.csv"))
        table = output::read_csv(run_dir / "trajectory.csv");
    else
        table = output::read_json(run_dir / "trajectory.json");

    rep.summary.push_back("run: " + cfg.name + " (" + summary.value("mode", "") + ", seed " +
                          std::to_string(cfg.seed) + "), status " + summary.value("status", "") +
                          (summary.value("message", "").empty() ? "" : ": " + summary.value("message", "")));
    if (summary.contains("terminal")) {
        const auto& term = summary["terminal"];
        rep.summary.push_back("terminal: H = " + g(term.value("H_THs", 0.0)) + " TH/s, V_h = " +
                              g(term.value("Vh_usd_per_TH", 0.0)) + " $/TH, tau_window = " +
                              g(term.value("tau_window_s", 0.0)) + " s, V_t = " +
                              g(term.value("Vt_frac_per_yr", 0.0)) + " frac/yr, energy = " +
                              g(term.value("energy_kWh_per_s", 0.0)) + " kWh/s");
    }

    rep.checks = trajectory_checks(table, cfg);

    const auto& eq = summary.at("equilibrium");
    const auto& se = summary.at("static_equilibrium");
    if (eq.value("reached", false) && se.contains("H_THs") && summary.contains("terminal")) {
        const double h = summary["terminal"].value("H_THs", 0.0);
        const double vh = summary["terminal"].value("Vh_usd_per_TH", 0.0);
        const double hs = se.value("H_THs", 0.0);
        const double vs = se.value("Vh_usd_per_TH", 0.0);
        const double eh = rel_err(h, hs), ev = rel_err(vh, vs);
        rep.checks.push_back({"terminal state matches static equilibrium", eh <= 0.02 && ev <= 0.02,
                              "reached at " + g(eq.value("at_s", 0.0) / kSecondsPerYear, 4) + " yr; H* = " + g(hs) +
                                  " TH/s (rel " + g(eh, 2) + "), V_h* = " + g(vs) + " $/TH (rel " + g(ev, 2) +
                                  "), tol 0.02"});
    } else {
        rep.summary.push_back("equilibrium: not reached within the horizon");
    }

    if (cfg.market.evolution.enabled) {
        const bool floor_seen = summary.contains("landauer_floor_time_s") && !summary["landauer_floor_time_s"].is_null();
        const auto base = cfg.environment.find_gen(cfg.market.evolution.base_gen);
        const double a0 = cfg.environment.gens[*base].efficiency.value();
        const double floor = analytics::landauer_limit(cfg.market.landauer_temperature).value();
        const double closed = std::log2(a0 / floor) * cfg.market.moore_doubling_period.value();
        if (floor_seen) {
            const double at = summary["landauer_floor_time_s"].get<double>();
            const bool ok = std::fabs(at - closed) <= cfg.market.evolution.cadence.value();
            rep.checks.push_back({"Landauer floor attainment", ok,
                                  "at " + g(at / kSecondsPerYear, 4) + " yr; closed form " +
                                      g(closed / kSecondsPerYear, 4) + " yr (tol one cadence step)"});
        } else {
            rep.checks.push_back({"Landauer floor attainment", false,
                                  "not reached; closed form " + g(closed / kSecondsPerYear, 4) + " yr"});
        }
        if (summary.contains("long_run")) {
            const double h = summary["long_run"].value("terminal_H_THs", 0.0);
            const double c = summary["long_run"].value("ceiling_THs", 0.0);
            rep.checks.push_back({"terminal H within hash-rate ceiling", h <= c * (1.0 + 1e-9),
                                  "H = " + g(h) + " TH/s, ceiling = " + g(c) + " TH/s"});
        }
    }

    rep.comparisons = paper_comparison(data_dir / "paper-table.csv", data_dir / "hardware-catalog.yaml");
    return rep;
}

void print_report(const Report& report, std::ostream& out)
{
    for (const auto& s : report.summary)
        out << s << '\n';
    out << "\ninvariants:\n";
    for (const auto& c : report.checks) {
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name;
        if (!c.detail.empty())
            out << ": " << c.detail;
        out << '\n';
    }
    out << "\nreference comparison:\n";
    char buf[512];
    std::snprintf(buf, sizeof buf, "  %-20s %-14s %-14s %-8s %-10s %-22s %s\n", "key", "computed", "reference",
                  "unit", "source", "tolerance", "verdict");
    out << buf;
    for (const auto& c : report.comparisons) {
        const char* verdict = !c.pass ? "INFO" : (*c.pass ? "PASS" : "FAIL");
        std::snprintf(buf, sizeof buf, "  %-20s %-14s %-14s %-8s %-10s %-22s %s  %s\n", c.key.c_str(),
                      g(c.computed, 6).c_str(), g(c.reference, 6).c_str(), c.unit.c_str(),
                      ("[" + c.provenance + "]").c_str(), c.tolerance.c_str(), verdict, c.quantity.c_str());
        out << buf;
    }
    out << "  note: hardware hash prices exclude datacenter space, cooling and network access\n";
    out << "\nresult: " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

} // namespace powecon::report
