#include "powecon/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace powecon::analytics {

UsdPerSecond RevenueSnapshot::revenue_rate() const
{
    if (!(block_time.value() > 0.0))
        throw DomainError("block time must be > 0");
    return UsdPerSecond(btc_price.value() * (reward.value() + fees.value()) / block_time.value());
}

HashPrice hash_value(const MarketSnapshot& s)
{
    return hash_value(RevenueSnapshot{s.btc_price, s.reward, s.fees, s.block_time}, s.hash_rate);
}

HashPrice hash_value(const RevenueSnapshot& s, HashRate hash_rate)
{
    const double work = hash_rate.value() * s.block_time.value();
    if (!(work > 0.0))
        throw DomainError("hash value undefined: H * tau = 0");
    return HashPrice(s.btc_price.value() * (s.reward.value() + s.fees.value()) / work);
}

HashPrice marginal_cost(EnergyPrice energy_price, Efficiency efficiency, HashPrice hardware_price)
{
    return HashPrice(energy_price.value() * efficiency.value() + hardware_price.value());
}

Feasibility feasibility(HashPrice hash_value, HashPrice cost)
{
    return Feasibility{hash_value >= cost, market::margin(hash_value, cost)};
}

Feasibility feasibility(const MarketSnapshot& s, EnergyPrice energy_price, Efficiency efficiency,
                        HashPrice hardware_price)
{
    return feasibility(hash_value(s), marginal_cost(energy_price, efficiency, hardware_price));
}

AnnualShare mining_share(BtcAmount reward, BtcAmount fees, BtcAmount supply, Duration block_time)
{
    const double denom = supply.value() * block_time.value();
    if (!(denom > 0.0))
        throw DomainError("mining share undefined: M * tau = 0");
    return AnnualShare(per_second_to_per_year((reward.value() + fees.value()) / denom));
}

Efficiency landauer_limit(Temperature temperature, std::size_t bits_per_hash)
{
    const double joules_per_hash = kBoltzmann * temperature.value() * std::numbers::ln2 *
                                   static_cast<double>(bits_per_hash);
    return Efficiency(joules_to_kwh(joules_per_hash * kHashesPerTerahash));
}

HashRate hash_rate_ceiling(AnnualShare share, BtcAmount supply, Efficiency efficiency, BtcPrice btc_price,
                           EnergyPrice energy_price)
{
    if (!(efficiency.value() > 0.0) || energy_price.value() == 0.0)
        throw DomainError("unbounded: hash rate ceiling needs alpha > 0 and p_e != 0");
    if (energy_price.value() < 0.0)
        throw DomainError("unbounded: hash rate ceiling needs p_e > 0");
    const double btc_per_second = per_year_to_per_second(share.value()) * supply.value();
    return HashRate(btc_per_second / efficiency.value() * (btc_price.value() / energy_price.value()));
}

AttackEstimate attack_cost(const market::HardwareGen& frontier, HashRate target, EnergyPrice energy_price,
                           const MarketSnapshot& s, double price_squeeze)
{
    if (!(target.value() > 0.0))
        throw DomainError("attack cost: target hash rate must be > 0");
    if (!(price_squeeze >= 0.0))
        throw DomainError("attack cost: price squeeze must be >= 0");

    const double price_per_ths = frontier.unit_price.value() / frontier.unit_hash_rate.value();
    const HashPrice vh = hash_value(s);
    MarketSnapshot joined = s;
    joined.hash_rate = s.hash_rate + target;
    const HashPrice vh_joined = hash_value(joined);

    AttackEstimate est;
    est.capex = Usd(target.value() * price_per_ths * price_squeeze);
    est.opex_rate = per_year(energy_cost_rate(target, frontier.efficiency, energy_price));
    est.honest_revenue_rate = per_year(UsdPerSecond(vh_joined.value() * target.value()));
    est.honest_revenue_rate_pre_entry = per_year(UsdPerSecond(vh.value() * target.value()));
    est.total_mining_value_rate = per_year(UsdPerSecond(vh.value() * s.hash_rate.value()));
    return est;
}

HashPrice SupplyEntry::cost() const
{
    return marginal_cost(energy_price, efficiency, hardware_price);
}

Equilibrium static_equilibrium(const std::vector<SupplyEntry>& curve, const RevenueSnapshot& s)
{
    if (curve.empty())
        throw DomainError("static equilibrium: empty supply curve");
    for (const auto& e : curve)
        if (e.capacity && !(e.capacity->value() > 0.0))
            throw DomainError("static equilibrium: capacities must be > 0");

    const double revenue = s.revenue_rate().value(); // V_h(H) = revenue / H
    std::vector<std::size_t> order(curve.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return curve[a].cost() < curve[b].cost(); });

    Equilibrium eq;
    if (!(revenue > 0.0)) {
        eq.diagnostic = "no revenue: every entry infeasible as H -> 0+";
        return eq;
    }

    double cumulative = 0.0;
    for (std::size_t idx : order) {
        const SupplyEntry& e = curve[idx];
        const double cost = e.cost().value();
        if (cost <= 0.0) {
            if (!e.capacity)
                throw DomainError("static equilibrium unbounded: unlimited entry with non-positive cost");
            cumulative += e.capacity->value();
            eq.marginal_index = idx;
            continue;
        }
        const double balance = revenue / cost; // H at which V_h equals this cost
        if (balance <= cumulative)
            break;
        if (!e.capacity || cumulative + e.capacity->value() >= balance) {
            cumulative = balance;
            eq.marginal_index = idx;
            break;
        }
        cumulative += e.capacity->value();
        eq.marginal_index = idx;
    }

    eq.hash_rate = HashRate(cumulative);
    eq.hash_value = cumulative > 0.0 ? HashPrice(revenue / cumulative) : HashPrice{};
    return eq;
}

} // namespace powecon::analytics
