#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "powecon/config.hpp"
#include "powecon/market.hpp"
#include "powecon/units.hpp"

namespace fixture {

inline const std::filesystem::path kPresets = POWECON_DEFAULT_PRESETS_DIR;
inline const std::filesystem::path kData = POWECON_DEFAULT_DATA_DIR;

inline powecon::scenario::SimConfig preset(const std::string& name)
{
    return powecon::config::load_config(kPresets / (name + ".yaml")).config;
}

// Reference-table machines.
inline powecon::market::HardwareGen og()
{
    using namespace powecon;
    return {"OG", Efficiency(3e-5), HashRate(10.0), Usd(757.3824), years(4.0), 0.0};
}

inline powecon::market::HardwareGen ng()
{
    using namespace powecon;
    return {"NG", Efficiency(0.8e-5), HashRate(100.0), Usd(12623.04), years(4.0), 0.0};
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag)
{
    static std::mt19937_64 rng(std::random_device{}());
    auto dir = std::filesystem::temp_directory_path() / ("powecon-" + tag + "-" + std::to_string(rng() % 1000000007));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace fixture
