#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "powecon/scenario.hpp"

namespace powecon::output {

inline constexpr int kOutputSchemaVersion = 1;

/// Filesystem failure; the message always names the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Format { Csv, Json };

[[nodiscard]] std::optional<Format> parse_format(std::string_view name);
[[nodiscard]] std::string_view format_extension(Format format);

struct ColumnSpec {
    std::string_view name;
    std::string_view unit;
};

/// Fixed leading columns, in emission order. Per-generation and per-tier
/// hash-rate columns (H_gen_<id>_THs, H_tier_<name>_THs) follow.
[[nodiscard]] const std::vector<ColumnSpec>& fixed_columns();

/// A trajectory flattened to named numeric columns, values already rounded
/// to the 9 significant digits that CSV carries.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    [[nodiscard]] std::optional<std::size_t> find(std::string_view column) const;
    /// Throws DomainError when the column is missing.
    [[nodiscard]] std::size_t require(std::string_view column) const;
};

[[nodiscard]] Table to_table(const scenario::Trajectory& traj);

/// "%.9g", with "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] std::string format_value(double v);
/// Value as it reads back from its CSV text.
[[nodiscard]] double round_value(double v);

void write_csv(const Table& table, std::ostream& out);
/// JSON object {schema_version, name, status, message, columns, units,
/// records}; each record is an array aligned with `columns`. Non-finite
/// values become null.
void write_json(const Table& table, const scenario::Trajectory& traj, const std::string& name, std::ostream& out);

/// Writes `traj` to `path` in the given format.
void emit_trajectory(const scenario::Trajectory& traj, Format format, const std::filesystem::path& path,
                     const std::string& name = {});

[[nodiscard]] Table read_csv(const std::filesystem::path& path);
[[nodiscard]] Table read_json(const std::filesystem::path& path);

/// Truncates and writes `path`; IoError on failure.
void write_text(const std::filesystem::path& path, std::string_view text);
[[nodiscard]] std::string read_text(const std::filesystem::path& path);

} // namespace powecon::output
