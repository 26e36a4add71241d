#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace powecon::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `powecon` tool, with output streams injectable for
/// tests. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// POWECON_PRESETS_DIR, else the presets/ directory of the source tree.
[[nodiscard]] std::filesystem::path presets_dir();
/// POWECON_DATA_DIR, else the data/ directory of the source tree.
[[nodiscard]] std::filesystem::path data_dir();

/// A path to an existing file, or the name of a shipped preset.
[[nodiscard]] std::filesystem::path resolve_config(const std::string& config_or_preset);

} // namespace powecon::cli
