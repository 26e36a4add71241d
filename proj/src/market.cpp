#include "powecon/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "powecon/analytics.hpp"

namespace powecon::market {

DepreciationRate HardwareGen::depreciation() const
{
    return DepreciationRate(unit_price.value() / lifetime.value());
}

HashPrice HardwareGen::hash_price() const
{
    return HashPrice(unit_price.value() / lifetime.value() / unit_hash_rate.value());
}

void HardwareGen::validate(Temperature temperature) const
{
    if (id.empty())
        throw DomainError("hardware generation: empty id");
    if (!(unit_hash_rate.value() > 0.0))
        throw DomainError("hardware '" + id + "': unit_hash_rate must be > 0");
    if (!(lifetime.value() > 0.0))
        throw DomainError("hardware '" + id + "': lifetime must be > 0");
    if (unit_price.value() < 0.0)
        throw DomainError("hardware '" + id + "': unit_price must be >= 0");
    if (available_from < 0.0 || !std::isfinite(available_from))
        throw DomainError("hardware '" + id + "': available_from must be >= 0");
    const Efficiency floor = analytics::landauer_limit(temperature);
    if (efficiency < floor)
        throw DomainError("hardware '" + id + "': efficiency below the Landauer limit " +
                          std::to_string(floor.value()) + " kWh/TH");
}

std::optional<std::size_t> MarketEnvironment::find_gen(const std::string& id) const
{
    for (std::size_t i = 0; i < gens.size(); ++i)
        if (gens[i].id == id)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> MarketEnvironment::find_tier(const std::string& name) const
{
    for (std::size_t i = 0; i < tiers.size(); ++i)
        if (tiers[i].name == name)
            return i;
    return std::nullopt;
}

void MarketParams::validate() const
{
    if (!(entry_elasticity >= 0.0) || !std::isfinite(entry_elasticity))
        throw DomainError("market.entry_elasticity must be >= 0");
    if (!(exit_elasticity >= 0.0) || !std::isfinite(exit_elasticity))
        throw DomainError("market.exit_elasticity must be >= 0");
    if (!(moore_doubling_period.value() > 0.0))
        throw DomainError("market.moore_doubling_period must be > 0");
    if (!(landauer_temperature.value() > 0.0))
        throw DomainError("market.landauer_temperature must be > 0");
    if (!(epsilon_tolerance >= 0.0) || !std::isfinite(epsilon_tolerance))
        throw DomainError("market.epsilon_tolerance must be >= 0");
    if (!(hardware_price_multiplier >= 0.0) || !std::isfinite(hardware_price_multiplier))
        throw DomainError("market.hardware_price_multiplier must be >= 0");
    if (evolution.enabled && !(evolution.cadence.value() > 0.0))
        throw DomainError("market.hardware_evolution.cadence must be > 0");
}

double margin(HashPrice hash_value, HashPrice cost)
{
    if (hash_value.value() == 0.0) {
        if (cost.value() > 0.0)
            return -std::numeric_limits<double>::infinity();
        return 0.0;
    }
    return (hash_value.value() - cost.value()) / hash_value.value();
}

HashPrice cohort_cost(const MinerCohort& cohort, const MarketEnvironment& env)
{
    const HardwareGen& gen = env.gens[cohort.gen];
    const double energy = env.tiers[cohort.tier].price.value() * gen.efficiency.value();
    const double hardware = cohort.sunk ? 0.0 : gen.hash_price().value();
    return HashPrice(energy + hardware);
}

double cohort_margin(const MinerCohort& cohort, const MarketEnvironment& env, HashPrice hash_value)
{
    return margin(hash_value, cohort_cost(cohort, env));
}

HashRate cohort_hash_rate(const MinerCohort& cohort, const MarketEnvironment& env)
{
    return HashRate(cohort.machine_count * env.gens[cohort.gen].unit_hash_rate.value());
}

HashPrice entrant_cost(const MarketEnvironment& env, std::size_t gen, std::size_t tier, const MarketParams& params)
{
    const HardwareGen& g = env.gens[gen];
    return HashPrice(env.tiers[tier].price.value() * g.efficiency.value() +
                     g.hash_price().value() * params.hardware_price_multiplier);
}

std::optional<std::size_t> frontier_gen(const MarketEnvironment& env, double t)
{
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < env.gens.size(); ++i) {
        if (env.gens[i].available_from > t)
            continue;
        if (!best || env.gens[i].efficiency <= env.gens[*best].efficiency)
            best = i;
    }
    return best;
}

HashRate tier_load(const Population& pop, const MarketEnvironment& env, std::size_t tier)
{
    double load = 0.0;
    for (const auto& c : pop.cohorts)
        if (c.tier == tier)
            load += cohort_hash_rate(c, env).value();
    return HashRate(load);
}

namespace {

double headroom(const Population& pop, const MarketEnvironment& env, std::size_t tier)
{
    const auto& cap = env.tiers[tier].capacity;
    if (!cap)
        return std::numeric_limits<double>::infinity();
    return cap->value() - tier_load(pop, env, tier).value();
}

} // namespace

std::optional<EntryCandidate> best_entry(const Population& pop, HashPrice hash_value, const MarketEnvironment& env,
                                         double t, const MarketParams& params)
{
    const auto gen = frontier_gen(env, t);
    if (!gen)
        return std::nullopt;
    std::optional<EntryCandidate> best;
    double best_cost = 0.0;
    for (std::size_t tier = 0; tier < env.tiers.size(); ++tier) {
        if (!(headroom(pop, env, tier) > 0.0))
            continue;
        const double cost = entrant_cost(env, *gen, tier, params).value();
        if (!best || cost < best_cost) {
            best = EntryCandidate{*gen, tier, 0.0};
            best_cost = cost;
        }
    }
    if (best)
        best->margin = margin(hash_value, HashPrice(best_cost));
    return best;
}

Population step_entry_exit(const Population& pop, HashPrice hash_value, const MarketEnvironment& env, double t,
                           const MarketParams& params, Duration dt)
{
    if (!(dt.value() > 0.0))
        throw DomainError("step_entry_exit: dt must be > 0");

    Population next = pop;
    const double total = aggregate_hash_rate(pop, env).value();

    for (std::size_t i = 0; i < pop.cohorts.size(); ++i) {
        const double eps = cohort_margin(pop.cohorts[i], env, hash_value);
        if (eps < -params.epsilon_tolerance) {
            const double shrink = params.exit_elasticity * -eps * dt.value();
            next.cohorts[i].machine_count = std::isfinite(shrink) && shrink < 1.0
                                                ? pop.cohorts[i].machine_count * (1.0 - shrink)
                                                : 0.0;
        }
    }

    const auto entry = best_entry(pop, hash_value, env, t, params);
    if (entry && entry->margin > 0.0 && total > 0.0 && params.entry_elasticity > 0.0) {
        double added = params.entry_elasticity * entry->margin * total * dt.value();
        added = std::min(added, headroom(pop, env, entry->tier));
        const double machines = added / env.gens[entry->gen].unit_hash_rate.value();
        auto it = std::find_if(next.cohorts.begin(), next.cohorts.end(), [&](const MinerCohort& c) {
            return c.gen == entry->gen && c.tier == entry->tier && !c.sunk;
        });
        if (it != next.cohorts.end())
            it->machine_count += machines;
        else
            next.cohorts.push_back(MinerCohort{entry->gen, entry->tier, machines, false});
    }

    sort_by_operating_cost(next, env);
    return next;
}

void sort_by_operating_cost(Population& pop, const MarketEnvironment& env)
{
    std::stable_sort(pop.cohorts.begin(), pop.cohorts.end(), [&](const MinerCohort& a, const MinerCohort& b) {
        const double ka = env.tiers[a.tier].price.value() * env.gens[a.gen].efficiency.value();
        const double kb = env.tiers[b.tier].price.value() * env.gens[b.gen].efficiency.value();
        return ka < kb;
    });
}

Efficiency moore_efficiency(Efficiency base, double elapsed, const MarketParams& params)
{
    const double factor = std::exp2(-elapsed / params.moore_doubling_period.value());
    const Efficiency floor = analytics::landauer_limit(params.landauer_temperature);
    return std::max(Efficiency(base.value() * factor), floor);
}

namespace {

std::string evolved_id(const std::string& base, std::uint64_t k)
{
    return base + "-m" + std::to_string(k);
}

// Highest cadence index already generated from `base`, 0 if none.
std::uint64_t last_evolved_index(const std::vector<HardwareGen>& gens, const std::string& base)
{
    const std::string prefix = base + "-m";
    std::uint64_t last = 0;
    for (const auto& g : gens) {
        if (g.id.size() <= prefix.size() || g.id.compare(0, prefix.size(), prefix) != 0)
            continue;
        const std::string tail = g.id.substr(prefix.size());
        if (tail.find_first_not_of("0123456789") != std::string::npos)
            continue;
        last = std::max<std::uint64_t>(last, std::stoull(tail));
    }
    return last;
}

} // namespace

std::vector<HardwareGen> evolve_hardware(const std::vector<HardwareGen>& gens, double t, const MarketParams& params)
{
    if (!params.evolution.enabled)
        return gens;
    auto base_it = std::find_if(gens.begin(), gens.end(),
                                [&](const HardwareGen& g) { return g.id == params.evolution.base_gen; });
    if (base_it == gens.end())
        throw DomainError("hardware evolution: unknown base generation '" + params.evolution.base_gen + "'");
    const HardwareGen base = *base_it;

    const double cadence = params.evolution.cadence.value();
    const double elapsed = t - base.available_from;
    if (elapsed < cadence)
        return gens;
    // Guard against k * cadence rounding just past t.
    auto k_max = static_cast<std::uint64_t>(std::floor(elapsed / cadence));
    while (k_max > 0 && base.available_from + static_cast<double>(k_max) * cadence > t)
        --k_max;

    std::vector<HardwareGen> out = gens;
    for (std::uint64_t k = last_evolved_index(gens, base.id) + 1; k <= k_max; ++k) {
        const double since = static_cast<double>(k) * cadence;
        const double factor = std::exp2(-since / params.moore_doubling_period.value());
        HardwareGen g = base;
        g.id = evolved_id(base.id, k);
        g.efficiency = moore_efficiency(base.efficiency, since, params);
        g.unit_price = Usd(base.unit_price.value() * factor);
        g.available_from = base.available_from + since;
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<HardwareGen> reprice_secondary(const std::vector<HardwareGen>& old_gens, const HardwareGen& frontier,
                                           EnergyPrice reference)
{
    std::vector<HardwareGen> out = old_gens;
    const double frontier_ph = frontier.hash_price().value();
    for (auto& g : out) {
        if (g.efficiency < frontier.efficiency)
            continue;
        const double parity = std::max(
            0.0, frontier_ph + reference.value() * (frontier.efficiency.value() - g.efficiency.value()));
        if (parity >= g.hash_price().value())
            continue;
        g.unit_price = Usd(parity * g.lifetime.value() * g.unit_hash_rate.value());
    }
    return out;
}

HashRate aggregate_hash_rate(const Population& pop, const MarketEnvironment& env)
{
    double total = 0.0;
    for (const auto& c : pop.cohorts)
        total += cohort_hash_rate(c, env).value();
    return HashRate(total);
}

Efficiency fleet_efficiency(const Population& pop, const MarketEnvironment& env)
{
    const double total = aggregate_hash_rate(pop, env).value();
    if (!(total > 0.0))
        throw DomainError("undefined efficiency: empty population");
    return Efficiency(energy_rate(pop, env) / total);
}

double energy_rate(const Population& pop, const MarketEnvironment& env)
{
    double kwh_per_s = 0.0;
    for (const auto& c : pop.cohorts)
        kwh_per_s += cohort_hash_rate(c, env).value() * env.gens[c.gen].efficiency.value();
    return kwh_per_s;
}

double fleet_margin(const Population& pop, const MarketEnvironment& env, HashPrice hash_value)
{
    const double total = aggregate_hash_rate(pop, env).value();
    if (!(total > 0.0))
        return 0.0;
    double weighted = 0.0;
    for (const auto& c : pop.cohorts) {
        const double h = cohort_hash_rate(c, env).value();
        if (h > 0.0)
            weighted += h * cohort_margin(c, env, hash_value);
    }
    return weighted / total;
}

double market_pressure(const Population& pop, const MarketEnvironment& env, HashPrice hash_value, double t,
                       const MarketParams& params)
{
    const auto entry = best_entry(pop, hash_value, env, t, params);
    if (entry && entry->margin > 0.0)
        return entry->margin;
    const double total = aggregate_hash_rate(pop, env).value();
    if (!(total > 0.0))
        return 0.0;
    double pressure = 0.0;
    for (const auto& c : pop.cohorts) {
        if (c.sunk)
            continue;
        const double h = cohort_hash_rate(c, env).value();
        const double eps = cohort_margin(c, env, hash_value);
        if (h > 0.0 && eps < 0.0)
            pressure = std::max(pressure, -eps * h / total);
    }
    return pressure;
}

} // namespace powecon::market
