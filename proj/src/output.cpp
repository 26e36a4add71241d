#include "powecon/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace powecon::output {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<Format> parse_format(std::string_view name)
{
    if (name == "csv")
        return Format::Csv;
    if (name == "json")
        return Format::Json;
    return std::nullopt;
}

std::string_view format_extension(Format format)
{
    return format == Format::Csv ? ".csv" : ".json";
}

const std::vector<ColumnSpec>& fixed_columns()
{
    static const std::vector<ColumnSpec> cols = {
        {"time_s", "s"},
        {"height", "blocks"},
        {"H_THs", "TH/s"},
        {"tau_window_s", "s"},
        {"difficulty_TH", "TH"},
        {"Vh_usd_per_TH", "$/TH"},
        {"Vt_frac_per_yr", "frac/yr"},
        {"epsilon", "frac"},
        {"energy_kWh_per_s", "kWh/s"},
        {"R_btc", "BTC"},
        {"F_btc", "BTC"},
        {"M_btc", "BTC"},
        {"pb_usd_per_btc", "$/BTC"},
    };
    return cols;
}

std::optional<std::size_t> Table::find(std::string_view column) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == column)
            return i;
    return std::nullopt;
}

std::size_t Table::require(std::string_view column) const
{
    if (auto i = find(column))
        return *i;
    throw DomainError("trajectory lacks column " + std::string(column));
}

std::string format_value(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double round_value(double v)
{
    if (!std::isfinite(v))
        return v;
    return std::strtod(format_value(v).c_str(), nullptr);
}

Table to_table(const scenario::Trajectory& traj)
{
    Table t;
    for (const auto& c : fixed_columns())
        t.columns.emplace_back(c.name);
    for (const auto& id : traj.gen_ids)
        t.columns.push_back("H_gen_" + id + "_THs");
    for (const auto& name : traj.tier_names)
        t.columns.push_back("H_tier_" + name + "_THs");

    t.rows.reserve(traj.records.size());
    for (const auto& r : traj.records) {
        std::vector<double> row = {r.time,        r.time,         r.hash_rate, r.tau_window, r.difficulty,
                                   r.hash_value,  r.mining_share, r.epsilon,   r.energy_rate, r.reward,
                                   r.fees,        r.minted,       r.btc_price};
        row[1] = static_cast<double>(r.height);
        // Generations introduced mid-run are zero before they exist.
        for (std::size_t g = 0; g < traj.gen_ids.size(); ++g)
            row.push_back(g < r.gen_hash_rate.size() ? r.gen_hash_rate[g] : 0.0);
        for (std::size_t k = 0; k < traj.tier_names.size(); ++k)
            row.push_back(k < r.tier_hash_rate.size() ? r.tier_hash_rate[k] : 0.0);
        for (double& v : row)
            v = round_value(v);
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(const Table& table, std::ostream& out)
{
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_value(row[i]);
        out << '\n';
    }
}

namespace {

std::string unit_of(const std::string& column)
{
    for (const auto& c : fixed_columns())
        if (c.name == column)
            return std::string(c.unit);
    return "TH/s";
}

const char* status_name(scenario::RunStatus s)
{
    return s == scenario::RunStatus::Completed ? "completed" : "halted";
}

} // namespace

void write_json(const Table& table, const scenario::Trajectory& traj, const std::string& name, std::ostream& out)
{
    json doc;
    doc["schema_version"] = kOutputSchemaVersion;
    doc["name"] = name;
    doc["status"] = status_name(traj.status);
    doc["message"] = traj.message;
    doc["columns"] = table.columns;
    json units = json::array();
    for (const auto& c : table.columns)
        units.push_back(unit_of(c));
    doc["units"] = units;
    json records = json::array();
    for (const auto& row : table.rows) {
        json rec = json::array();
        for (double v : row) {
            if (std::isfinite(v))
                rec.push_back(v);
            else
                rec.push_back(nullptr);
        }
        records.push_back(std::move(rec));
    }
    doc["records"] = std::move(records);
    out << doc.dump(1) << '\n';
}

void write_text(const fs::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError(path.string() + ": cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out)
        throw IoError(path.string() + ": write failed");
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(path.string() + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw IoError(path.string() + ": read failed");
    return ss.str();
}

void emit_trajectory(const scenario::Trajectory& traj, Format format, const fs::path& path, const std::string& name)
{
    const Table table = to_table(traj);
    std::ostringstream ss;
    if (format == Format::Csv)
        write_csv(table, ss);
    else
        write_json(table, traj, name, ss);
    write_text(path, ss.str());
}

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_cell(const std::string& s, const fs::path& path, std::size_t line)
{
    if (s == "nan")
        return std::nan("");
    if (s == "inf")
        return HUGE_VAL;
    if (s == "-inf")
        return -HUGE_VAL;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

} // namespace

Table read_csv(const fs::path& path)
{
    std::istringstream in(read_text(path));
    Table t;
    std::string line;
    if (!std::getline(in, line))
        throw IoError(path.string() + ": empty file");
    t.columns = split(line);
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty())
            continue;
        const auto cells = split(line);
        if (cells.size() != t.columns.size())
            throw IoError(path.string() + ":" + std::to_string(n) + ": expected " +
                          std::to_string(t.columns.size()) + " fields");
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells)
            row.push_back(parse_cell(c, path, n));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table read_json(const fs::path& path)
{
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    Table t;
    try {
        t.columns = doc.at("columns").get<std::vector<std::string>>();
        for (const auto& rec : doc.at("records")) {
            std::vector<double> row;
            for (const auto& v : rec)
                row.push_back(v.is_null() ? std::nan("") : v.get<double>());
            if (row.size() != t.columns.size())
                throw IoError(path.string() + ": record width does not match columns");
            t.rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
    return t;
}

} // namespace powecon::output
