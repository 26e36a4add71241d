#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "powecon/config.hpp"
#include "powecon/output.hpp"

using namespace powecon;
using namespace powecon::output;

namespace {

scenario::SimConfig short_run(const std::string& preset, double horizon_days, scenario::Mode mode)
{
    auto cfg = fixture::preset(preset);
    cfg.horizon = horizon_days * 86400.0;
    cfg.mode = mode;
    cfg.events.erase(std::remove_if(cfg.events.begin(), cfg.events.end(),
                                    [&](const scenario::Event& e) { return e.at > cfg.horizon; }),
                     cfg.events.end());
    return cfg;
}

// Column tables of the format documentation: name in backticks -> units seen.
std::multimap<std::string, std::string> documented_columns()
{
    std::ifstream in(std::string(POWECON_DOCS_DIR) + "/output-format.md");
    REQUIRE(in);
    std::multimap<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("| `", 0) != 0)
            continue;
        const auto name_end = line.find('`', 3);
        const auto unit_begin = line.find('|', name_end) + 1;
        const auto unit_end = line.find('|', unit_begin);
        std::string unit = line.substr(unit_begin, unit_end - unit_begin);
        unit.erase(0, unit.find_first_not_of(' '));
        unit.erase(unit.find_last_not_of(' ') + 1);
        out.emplace(line.substr(3, name_end - 3), unit);
    }
    return out;
}

} // namespace

TEST_SUITE("output") {

TEST_CASE("format names")
{
    CHECK(parse_format("csv") == Format::Csv);
    CHECK(parse_format("json") == Format::Json);
    CHECK_FALSE(parse_format("xml"));
    CHECK(format_extension(Format::Json) == ".json");
}

TEST_CASE("value formatting")
{
    CHECK(format_value(600.0) == "600");
    CHECK(format_value(1.0 / 3.0) == "0.333333333");
    CHECK(format_value(1.39961862e-6) == "1.39961862e-06");
    CHECK(format_value(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_value(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(round_value(1.0 / 3.0) == 0.333333333);
}

TEST_CASE("empty trajectory gives a header-only CSV")
{
    scenario::Trajectory empty;
    empty.gen_ids = {"NG"};
    empty.tier_names = {"grid"};
    const Table t = to_table(empty);
    std::ostringstream os;
    write_csv(t, os);
    CHECK(os.str()
          == "time_s,height,H_THs,tau_window_s,difficulty_TH,Vh_usd_per_TH,Vt_frac_per_yr,epsilon,"
             "energy_kWh_per_s,R_btc,F_btc,M_btc,pb_usd_per_btc,H_gen_NG_THs,H_tier_grid_THs\n");
}

TEST_CASE("CSV and JSON carry identical values")
{
    const auto traj = scenario::run(short_run("supply-shock", 90, scenario::Mode::Stochastic));
    const auto dir = fixture::temp_dir("formats");
    emit_trajectory(traj, Format::Csv, dir / "t.csv", "x");
    emit_trajectory(traj, Format::Json, dir / "t.json", "x");
    const Table a = read_csv(dir / "t.csv");
    const Table b = read_json(dir / "t.json");
    const Table mem = to_table(traj);
    CHECK(a.columns == b.columns);
    CHECK(a.columns == mem.columns);
    REQUIRE(a.rows.size() == traj.records.size());
    REQUIRE(b.rows.size() == a.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i] == b.rows[i]);
        CHECK(a.rows[i] == mem.rows[i]);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("same seed twice gives byte-identical files")
{
    const auto cfg = short_run("price-shock", 120, scenario::Mode::Stochastic);
    const auto dir = fixture::temp_dir("bytes");
    for (const auto f : {Format::Csv, Format::Json}) {
        const std::string ext(format_extension(f));
        emit_trajectory(scenario::run(cfg), f, dir / ("a" + ext));
        emit_trajectory(scenario::run(cfg), f, dir / ("b" + ext));
        const std::string a = read_text(dir / ("a" + ext));
        CHECK(a.size() > 1000);
        CHECK(a == read_text(dir / ("b" + ext)));
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("fixed column order")
{
    const auto& cols = fixed_columns();
    const char* expected[] = {"time_s", "height", "H_THs", "tau_window_s", "difficulty_TH", "Vh_usd_per_TH",
                              "Vt_frac_per_yr", "epsilon", "energy_kWh_per_s", "R_btc", "F_btc", "M_btc",
                              "pb_usd_per_btc"};
    REQUIRE(cols.size() == std::size(expected));
    for (std::size_t i = 0; i < cols.size(); ++i)
        CHECK(cols[i].name == expected[i]);
}

TEST_CASE("every column is documented exactly once with its unit")
{
    const auto docs = documented_columns();
    for (const auto& c : fixed_columns()) {
        CAPTURE(c.name);
        const std::string name(c.name);
        CHECK(docs.count(name) == 1);
        if (docs.count(name) == 1)
            CHECK(docs.find(name)->second == c.unit);
    }
    CHECK(docs.count("H_gen_<id>_THs") == 1);
    CHECK(docs.count("H_tier_<name>_THs") == 1);
    CHECK(docs.size() == fixed_columns().size() + 2);
}

TEST_CASE("IO errors name the path")
{
    const std::filesystem::path bad = "/nonexistent-dir/sub/t.csv";
    scenario::Trajectory empty;
    CHECK_THROWS_WITH_AS(emit_trajectory(empty, Format::Csv, bad), doctest::Contains("/nonexistent-dir/sub/t.csv"), IoError);
    CHECK_THROWS_WITH_AS((void)read_text("/nonexistent-dir/x"), doctest::Contains("/nonexistent-dir/x"), IoError);
    CHECK_THROWS_WITH_AS((void)read_csv("/nonexistent-dir/x.csv"), doctest::Contains("/nonexistent-dir/x.csv"),
                         IoError);
}

TEST_CASE("table lookup")
{
    Table t;
    t.columns = {"a", "b"};
    CHECK(t.find("b") == std::optional<std::size_t>(1));
    CHECK_FALSE(t.find("c"));
    CHECK_THROWS_AS((void)t.require("c"), DomainError);
}

}
