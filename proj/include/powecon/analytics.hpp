#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "powecon/market.hpp"
#include "powecon/units.hpp"

namespace powecon::analytics {

/// Exact SI value, J/K.
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr std::size_t kBitsPerHash = 256;

/// Exogenous variables that set the market value of computation.
struct MarketSnapshot {
    BtcPrice btc_price;
    BtcAmount reward;
    BtcAmount fees;
    HashRate hash_rate;
    Duration block_time{600.0};
    BtcAmount supply;
};

/// Revenue side of a snapshot, without H.
struct RevenueSnapshot {
    BtcPrice btc_price;
    BtcAmount reward;
    BtcAmount fees;
    Duration block_time{600.0};

    /// p_b * (R + F) / tau, the dollars per second paid to all miners.
    [[nodiscard]] UsdPerSecond revenue_rate() const;
};

/// V_h = p_b (R + F) / (H tau), in $/TH.
[[nodiscard]] HashPrice hash_value(const MarketSnapshot& s);
[[nodiscard]] HashPrice hash_value(const RevenueSnapshot& s, HashRate hash_rate);

/// p_e * alpha + p_h.
[[nodiscard]] HashPrice marginal_cost(EnergyPrice energy_price, Efficiency efficiency, HashPrice hardware_price);

struct Feasibility {
    bool feasible = false;
    double margin = 0.0;
};

[[nodiscard]] Feasibility feasibility(HashPrice hash_value, HashPrice cost);
[[nodiscard]] Feasibility feasibility(const MarketSnapshot& s, EnergyPrice energy_price, Efficiency efficiency,
                                      HashPrice hardware_price);

/// V_t = (R + F) / (M tau), expressed per year. Takes no cost-side inputs.
[[nodiscard]] AnnualShare mining_share(BtcAmount reward, BtcAmount fees, BtcAmount supply, Duration block_time);

/// k T ln2 per output bit, times bits per hash, in kWh/TH.
[[nodiscard]] Efficiency landauer_limit(Temperature temperature, std::size_t bits_per_hash = kBitsPerHash);

/// Long-run hash rate bound (V_t M / alpha) (p_b / p_e) with p_h -> 0 and eps -> 0.
[[nodiscard]] HashRate hash_rate_ceiling(AnnualShare share, BtcAmount supply, Efficiency efficiency,
                                         BtcPrice btc_price, EnergyPrice energy_price);

struct AttackEstimate {
    Usd capex;
    UsdPerYear opex_rate;
    /// Attacker mining honestly alongside the network, V_h recomputed at H + target.
    UsdPerYear honest_revenue_rate;
    /// Same hash rate valued at the pre-entry V_h.
    UsdPerYear honest_revenue_rate_pre_entry;
    UsdPerYear total_mining_value_rate;
};

/// Capital and flow figures of acquiring `target` hash rate of `frontier` hardware.
[[nodiscard]] AttackEstimate attack_cost(const market::HardwareGen& frontier, HashRate target,
                                         EnergyPrice energy_price, const MarketSnapshot& s,
                                         double price_squeeze = 1.0);

/// One step of a miner supply curve.
struct SupplyEntry {
    EnergyPrice energy_price;
    Efficiency efficiency;
    HashPrice hardware_price;
    std::optional<HashRate> capacity; // nullopt: unlimited

    [[nodiscard]] HashPrice cost() const;
};

struct Equilibrium {
    HashRate hash_rate;
    HashPrice hash_value;
    /// Index into the input curve of the last (possibly partial) entry.
    std::optional<std::size_t> marginal_index;
    std::string diagnostic;
};

/// Largest H at which the cheapest-first supply curve is still covered by
/// V_h(H). The marginal entry may be partially used. Equal-cost entries keep
/// input order. Throws DomainError if a non-positive-cost entry is unbounded.
[[nodiscard]] Equilibrium static_equilibrium(const std::vector<SupplyEntry>& curve, const RevenueSnapshot& s);

} // namespace powecon::analytics
