#include "powecon/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace powecon::protocol {

void ProtocolParams::validate() const
{
    if (!(target_block_time.value() > 0.0))
        throw DomainError("protocol.target_block_time must be > 0");
    if (retarget_interval == 0)
        throw DomainError("protocol.retarget_interval must be > 0");
    if (!(retarget_clamp >= 1.0) || !std::isfinite(retarget_clamp))
        throw DomainError("protocol.retarget_clamp must be >= 1");
    if (halving_interval == 0)
        throw DomainError("protocol.halving_interval must be > 0");
    if (!(initial_reward.value() > 0.0))
        throw DomainError("protocol.initial_reward must be > 0");
    if (!(supply_cap.value() > 0.0))
        throw DomainError("protocol.supply_cap must be > 0");
}

Duration ProtocolParams::target_timespan() const
{
    return target_block_time * static_cast<double>(retarget_interval);
}

BtcAmount block_reward(std::uint64_t height, const ProtocolParams& params)
{
    const std::uint64_t epoch = height / params.halving_interval;
    if (epoch >= 1024)
        return BtcAmount{};
    const double reward = std::ldexp(params.initial_reward.value(), -static_cast<int>(epoch));
    if (reward < kSmallestBtcUnit)
        return BtcAmount{};
    return BtcAmount(reward);
}

BtcAmount minted_supply(std::uint64_t height, const ProtocolParams& params)
{
    double total = 0.0;
    std::uint64_t epoch_start = 0;
    while (epoch_start < height) {
        const double reward = block_reward(epoch_start, params).value();
        if (reward == 0.0)
            break;
        const std::uint64_t blocks = std::min(params.halving_interval, height - epoch_start);
        total += reward * static_cast<double>(blocks);
        epoch_start += params.halving_interval;
    }
    return BtcAmount(std::min(total, params.supply_cap.value()));
}

Duration expected_block_time(HashRate hash_rate, Difficulty difficulty)
{
    if (!(hash_rate.value() > 0.0))
        throw DomainError("zero hash rate: chain halts");
    return Duration(difficulty.value() / hash_rate.value());
}

Duration sample_block_interval(RandomStream& rng, HashRate hash_rate, Difficulty difficulty)
{
    const double mean = expected_block_time(hash_rate, difficulty).value();
    return Duration(rng.exponential(mean));
}

Difficulty retarget(Difficulty difficulty, Duration actual_timespan, const ProtocolParams& params)
{
    if (!(actual_timespan.value() > 0.0))
        throw DomainError("retarget: actual timespan must be > 0");
    const double target = params.target_timespan().value();
    const double clamped =
        std::clamp(actual_timespan.value(), target / params.retarget_clamp, target * params.retarget_clamp);
    return Difficulty(difficulty.value() * (target / clamped));
}

ChainState initial_chain_state(std::uint64_t height, Difficulty difficulty, const ProtocolParams& params)
{
    ChainState state;
    state.height = height;
    state.difficulty = difficulty;
    state.minted = minted_supply(height, params);
    state.window_start_height = height;
    return state;
}

ChainState append_block(const ChainState& state, Duration interval, const ProtocolParams& params)
{
    ChainState next = state;
    const double minted = state.minted.value() + block_reward(state.height, params).value();
    next.minted = BtcAmount(std::min(minted, params.supply_cap.value()));
    next.height = state.height + 1;
    next.clock = state.clock + interval.value();
    return next;
}

bool at_retarget_boundary(const ChainState& state, const ProtocolParams& params)
{
    return state.height > state.window_start_height && state.height % params.retarget_interval == 0;
}

ChainState close_window(const ChainState& state, const ProtocolParams& params)
{
    ChainState next = state;
    const auto blocks = static_cast<double>(state.height - state.window_start_height);
    const double span = state.clock - state.window_start_time;
    const double scaled = span * static_cast<double>(params.retarget_interval) / blocks;
    next.difficulty = retarget(state.difficulty, Duration(scaled), params);
    next.window_start_time = state.clock;
    next.window_start_height = state.height;
    return next;
}

} // namespace powecon::protocol
