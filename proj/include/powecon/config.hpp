#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "powecon/scenario.hpp"
#include "powecon/units.hpp"

namespace powecon::config {

inline constexpr int kSchemaVersion = 1;

/// Parse or validation failure. The message starts with
/// "<source>:<line>:<column>:" when a location is known.
class ConfigError : public DomainError {
public:
    using DomainError::DomainError;
};

struct LoadResult {
    scenario::SimConfig config;
    std::vector<std::string> warnings;
};

/// Loads and validates a scenario file. Relative `hardware_catalog` paths
/// resolve against the file's directory.
[[nodiscard]] LoadResult load_config(const std::filesystem::path& path);

/// Same as load_config on in-memory text. `source` is used in messages.
[[nodiscard]] LoadResult parse_config(std::string_view text, const std::string& source,
                                      const std::filesystem::path& base_dir = {});

/// Loads a standalone hardware catalog file.
[[nodiscard]] std::vector<market::HardwareGen> load_catalog(const std::filesystem::path& path);

/// Normalized form: every default spelled out, canonical units, inline
/// hardware, shortest exact numbers. Parsing the dump yields an equal SimConfig.
[[nodiscard]] std::string dump_config(const scenario::SimConfig& config);

// Unit-suffixed scalars, exposed for the CLI flags and tests.
enum class Dimension {
    Duration,
    HashRate,
    Efficiency,
    HashPrice,
    EnergyPrice,
    BtcPrice,
    Btc,
    Usd,
    Temperature,
    Rate,
    ByteRate,
    Difficulty,
    Blocks,
};

/// Canonical unit string, e.g. "TH/s".
[[nodiscard]] std::string_view canonical_unit(Dimension dim);

/// "0.05 $/kWh" -> 0.05. Accepts the canonical unit and a few scaled
/// spellings (min, h, d, yr; PH/s, EH/s; J/TH; $/MWh). Throws ConfigError.
[[nodiscard]] double parse_quantity(std::string_view text, Dimension dim);

/// "<shortest round-trip number> <unit>": exact through parse_quantity.
[[nodiscard]] std::string format_quantity(double value, Dimension dim);

} // namespace powecon::config
