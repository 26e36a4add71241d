#pragma once

#include <cstdint>

#include "powecon/random.hpp"
#include "powecon/units.hpp"

namespace powecon::protocol {

/// Smallest representable BTC step; rewards below it are paid as zero.
inline constexpr double kSmallestBtcUnit = 1e-8;

struct ProtocolParams {
    Duration target_block_time{600.0};
    std::uint64_t retarget_interval = 2016;
    double retarget_clamp = 4.0;
    std::uint64_t halving_interval = 210'000;
    BtcAmount initial_reward{50.0};
    BtcAmount supply_cap{21e6};

    /// Throws DomainError naming the first non-positive field.
    void validate() const;

    [[nodiscard]] Duration target_timespan() const;

    friend bool operator==(const ProtocolParams&, const ProtocolParams&) = default;
};

/// Chain bookkeeping advanced one block at a time by the scenario loop.
struct ChainState {
    std::uint64_t height = 0;
    Difficulty difficulty{1.0};
    BtcAmount minted{};
    double clock = 0.0;               // s
    double window_start_time = 0.0;   // s, clock at last retarget
    std::uint64_t window_start_height = 0;
};

[[nodiscard]] BtcAmount block_reward(std::uint64_t height, const ProtocolParams& params);

/// Total BTC issued by blocks [0, height).
[[nodiscard]] BtcAmount minted_supply(std::uint64_t height, const ProtocolParams& params);

/// difficulty / H. Throws DomainError("zero hash rate: chain halts") when H == 0.
[[nodiscard]] Duration expected_block_time(HashRate hash_rate, Difficulty difficulty);

[[nodiscard]] Duration sample_block_interval(RandomStream& rng, HashRate hash_rate, Difficulty difficulty);

/// Proportional difficulty update with the actual timespan clamped to
/// [target / clamp, target * clamp].
[[nodiscard]] Difficulty retarget(Difficulty difficulty, Duration actual_timespan, const ProtocolParams& params);

/// State at `height` with the closed-form minted supply and a fresh window.
[[nodiscard]] ChainState initial_chain_state(std::uint64_t height, Difficulty difficulty, const ProtocolParams& params);

/// Appends one block found after `interval`: bumps height and clock, mints the reward.
[[nodiscard]] ChainState append_block(const ChainState& state, Duration interval, const ProtocolParams& params);

[[nodiscard]] bool at_retarget_boundary(const ChainState& state, const ProtocolParams& params);

/// Retargets from the window that just closed and opens a new one. A window
/// that began mid-interval (simulation start) is compared against a target
/// scaled to its actual block count.
[[nodiscard]] ChainState close_window(const ChainState& state, const ProtocolParams& params);

} // namespace powecon::protocol
