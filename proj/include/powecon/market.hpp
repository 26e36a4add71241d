#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "powecon/units.hpp"

namespace powecon::market {

/// One purchasable machine model. p_h and C are derived, never stored.
struct HardwareGen {
    std::string id;
    Efficiency efficiency;
    HashRate unit_hash_rate;   // per machine
    Usd unit_price;            // per machine
    Duration lifetime{4.0 * kSecondsPerYear};
    double available_from = 0.0; // sim time, s

    /// C = unit_price / lifetime.
    [[nodiscard]] DepreciationRate depreciation() const;
    /// p_h = C / unit_hash_rate.
    [[nodiscard]] HashPrice hash_price() const;

    /// Rejects non-positive hash rate or lifetime, negative price, and
    /// efficiency below the Landauer floor at `temperature`.
    void validate(Temperature temperature) const;

    friend bool operator==(const HardwareGen&, const HardwareGen&) = default;
};

/// A pool of electricity at one price. `capacity` caps the hash rate the
/// tier can host; nullopt means unlimited.
struct EnergyTier {
    std::string name;
    EnergyPrice price;
    std::optional<HashRate> capacity;

    friend bool operator==(const EnergyTier&, const EnergyTier&) = default;
};

struct MinerCohort {
    std::size_t gen = 0;   // index into MarketEnvironment::gens
    std::size_t tier = 0;  // index into MarketEnvironment::tiers
    double machine_count = 0.0;
    bool sunk = false;     // hardware already paid for

    friend bool operator==(const MinerCohort&, const MinerCohort&) = default;
};

/// Hardware catalog and energy tiers. Generations are only ever appended,
/// so cohort indices stay valid for the life of a run.
struct MarketEnvironment {
    std::vector<HardwareGen> gens;
    std::vector<EnergyTier> tiers;

    [[nodiscard]] std::optional<std::size_t> find_gen(const std::string& id) const;
    [[nodiscard]] std::optional<std::size_t> find_tier(const std::string& name) const;

    friend bool operator==(const MarketEnvironment&, const MarketEnvironment&) = default;
};

struct HardwareEvolution {
    bool enabled = false;
    std::string base_gen;
    Duration cadence{0.5 * kSecondsPerYear};

    friend bool operator==(const HardwareEvolution&, const HardwareEvolution&) = default;
};

struct MarketParams {
    double entry_elasticity = 5e-7; // 1/s per unit of margin
    double exit_elasticity = 5e-7;  // 1/s per unit of margin
    Duration moore_doubling_period{1.5 * kSecondsPerYear};
    Temperature landauer_temperature{300.0};
    /// p_e at which secondary-market prices are brought to cost parity.
    EnergyPrice reference_energy_price{0.05};
    double epsilon_tolerance = 1e-3;
    /// Applied to the hardware cost of new entrants (supply squeeze).
    double hardware_price_multiplier = 1.0;
    HardwareEvolution evolution;

    void validate() const;

    friend bool operator==(const MarketParams&, const MarketParams&) = default;
};

/// Cohorts ordered by marginal operating cost p_e * alpha, ascending.
struct Population {
    std::vector<MinerCohort> cohorts;

    friend bool operator==(const Population&, const Population&) = default;
};

/// (V_h - cost) / V_h; -infinity when V_h == 0 and cost > 0.
[[nodiscard]] double margin(HashPrice hash_value, HashPrice cost);

/// p_e * alpha, plus p_h unless the cohort is sunk.
[[nodiscard]] HashPrice cohort_cost(const MinerCohort& cohort, const MarketEnvironment& env);
[[nodiscard]] double cohort_margin(const MinerCohort& cohort, const MarketEnvironment& env, HashPrice hash_value);
[[nodiscard]] HashRate cohort_hash_rate(const MinerCohort& cohort, const MarketEnvironment& env);

/// Full-cost basis of a new machine of `gen` on `tier`.
[[nodiscard]] HashPrice entrant_cost(const MarketEnvironment& env, std::size_t gen, std::size_t tier,
                                     const MarketParams& params);

/// Lowest-alpha generation available at time t; later entries win ties.
[[nodiscard]] std::optional<std::size_t> frontier_gen(const MarketEnvironment& env, double t);

[[nodiscard]] HashRate tier_load(const Population& pop, const MarketEnvironment& env, std::size_t tier);

struct EntryCandidate {
    std::size_t gen = 0;
    std::size_t tier = 0;
    double margin = 0.0;
};

/// Best full-cost margin over (frontier generation, tier with headroom).
[[nodiscard]] std::optional<EntryCandidate> best_entry(const Population& pop, HashPrice hash_value,
                                                       const MarketEnvironment& env, double t,
                                                       const MarketParams& params);

/// One proportional-rate entry/exit step of length dt at hash value V_h.
///
/// Entry adds entry_elasticity * eps * H * dt of hash rate to the best
/// candidate when its margin is positive, clipped to the tier's headroom.
/// Cohorts whose own-basis margin is below -epsilon_tolerance shrink by
/// exit_elasticity * |eps| * dt of their size. Counts never go negative.
[[nodiscard]] Population step_entry_exit(const Population& pop, HashPrice hash_value, const MarketEnvironment& env,
                                         double t, const MarketParams& params, Duration dt);

void sort_by_operating_cost(Population& pop, const MarketEnvironment& env);

/// alpha of a generation introduced `elapsed` seconds after the base one,
/// halving every doubling period and floored at the Landauer limit.
[[nodiscard]] Efficiency moore_efficiency(Efficiency base, double elapsed, const MarketParams& params);

/// Appends Moore-law generations for every cadence point <= t that is not
/// yet in the list. Unit price decays by the same factor as alpha, without
/// a floor. Returns `gens` unchanged when evolution is disabled.
[[nodiscard]] std::vector<HardwareGen> evolve_hardware(const std::vector<HardwareGen>& gens, double t,
                                                       const MarketParams& params);

/// Lowers each older generation's price to cost parity with `frontier` at
/// `reference` energy price: p_h(old) <= p_h(frontier) + p_e * (alpha_f - alpha_old),
/// floored at zero. Prices never rise; generations more efficient than the
/// frontier are left alone.
[[nodiscard]] std::vector<HardwareGen> reprice_secondary(const std::vector<HardwareGen>& old_gens,
                                                         const HardwareGen& frontier, EnergyPrice reference);

[[nodiscard]] HashRate aggregate_hash_rate(const Population& pop, const MarketEnvironment& env);

/// Hash-rate-weighted mean alpha. Throws DomainError on an empty fleet.
[[nodiscard]] Efficiency fleet_efficiency(const Population& pop, const MarketEnvironment& env);

/// kWh/s drawn by the fleet.
[[nodiscard]] double energy_rate(const Population& pop, const MarketEnvironment& env);

/// Hash-weighted mean own-basis margin; 0 for an empty fleet.
[[nodiscard]] double fleet_margin(const Population& pop, const MarketEnvironment& env, HashPrice hash_value);

/// Strength of the force still moving the population: the entry margin when
/// positive, else the largest hash-share-weighted exit margin among
/// non-sunk cohorts. Zero at the entry/exit fixed point.
[[nodiscard]] double market_pressure(const Population& pop, const MarketEnvironment& env, HashPrice hash_value,
                                     double t, const MarketParams& params);

} // namespace powecon::market
