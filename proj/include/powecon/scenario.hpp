#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "powecon/analytics.hpp"
#include "powecon/market.hpp"
#include "powecon/protocol.hpp"
#include "powecon/units.hpp"

namespace powecon::scenario {

/// Visitor helper for the variant types below.
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

enum class Mode { Stochastic, Deterministic };

// ---- fee model ------------------------------------------------------------

/// F = reference_fee * max(0, u - threshold)^2.
struct QuadraticFeeCurve {
    BtcAmount reference_fee{1.0};
    double threshold = 0.9;

    friend bool operator==(const QuadraticFeeCurve&, const QuadraticFeeCurve&) = default;
};

/// Piecewise-linear (utilization, fee) table, flat outside its range.
struct TableFeeCurve {
    std::vector<std::pair<double, BtcAmount>> points;

    friend bool operator==(const TableFeeCurve&, const TableFeeCurve&) = default;
};

using FeeCurve = std::variant<QuadraticFeeCurve, TableFeeCurve>;

struct DemandPoint {
    double at = 0.0;   // s
    double rate = 0.0; // bytes/s

    friend bool operator==(const DemandPoint&, const DemandPoint&) = default;
};

struct ConstantFee {
    BtcAmount amount;

    friend bool operator==(const ConstantFee&, const ConstantFee&) = default;
};

/// Fees set by block-space utilization u = demand(t) / capacity. Demand is
/// interpolated linearly between points and held flat outside them.
struct CongestionFee {
    std::vector<DemandPoint> demand;
    double capacity = 1667.0; // bytes/s, 1 MB per 10 minutes
    FeeCurve curve = QuadraticFeeCurve{};

    friend bool operator==(const CongestionFee&, const CongestionFee&) = default;
};

using FeeModel = std::variant<ConstantFee, CongestionFee>;

[[nodiscard]] double utilization(const CongestionFee& model, double t);
[[nodiscard]] BtcAmount evaluate_fee_curve(const FeeCurve& curve, double utilization);
[[nodiscard]] BtcAmount fee_per_block(const FeeModel& model, double t);
void validate_fee_model(const FeeModel& model);

// ---- events ---------------------------------------------------------------

/// Matches cohorts by generation and/or tier; both empty matches everything.
struct Selector {
    std::optional<std::string> gen;
    std::optional<std::string> tier;

    friend bool operator==(const Selector&, const Selector&) = default;
};

namespace actions {

struct SetBtcPrice {
    BtcPrice price;
    friend bool operator==(const SetBtcPrice&, const SetBtcPrice&) = default;
};

/// Supply shock. With retire_capacity the removed hash rate is also taken
/// out of the matched tiers' capacity, so it cannot be rebuilt there.
struct ScalePopulation {
    double factor = 1.0;
    Selector selector;
    bool retire_capacity = false;
    friend bool operator==(const ScalePopulation&, const ScalePopulation&) = default;
};

struct SetEnergyPrice {
    std::string tier;
    EnergyPrice price;
    friend bool operator==(const SetEnergyPrice&, const SetEnergyPrice&) = default;
};

struct IntroduceGeneration {
    market::HardwareGen gen;
    friend bool operator==(const IntroduceGeneration&, const IntroduceGeneration&) = default;
};

struct SetFeeModel {
    FeeModel model;
    friend bool operator==(const SetFeeModel&, const SetFeeModel&) = default;
};

struct SetMarketParams {
    market::MarketParams params;
    friend bool operator==(const SetMarketParams&, const SetMarketParams&) = default;
};

} // namespace actions

using Action = std::variant<actions::SetBtcPrice, actions::ScalePopulation, actions::SetEnergyPrice,
                            actions::IntroduceGeneration, actions::SetFeeModel, actions::SetMarketParams>;

struct Event {
    double at = 0.0; // s
    Action action;

    friend bool operator==(const Event&, const Event&) = default;
};

[[nodiscard]] std::string action_name(const Action& action);

// ---- configuration --------------------------------------------------------

struct EquilibriumCriteria {
    std::uint64_t window = 8064; // blocks
    double tolerance = 0.01;

    friend bool operator==(const EquilibriumCriteria&, const EquilibriumCriteria&) = default;
};

struct SimConfig {
    std::string name;
    std::string description;
    double horizon = 365.25 * 86400.0; // s
    std::uint64_t seed = 1;
    Mode mode = Mode::Deterministic;
    std::uint64_t record_interval = 144; // blocks
    std::uint64_t start_height = 631'008;
    BtcPrice initial_btc_price{20'000.0};
    /// Defaults to H0 * target_block_time.
    std::optional<Difficulty> initial_difficulty;
    bool allow_negative_energy_price = false;

    protocol::ProtocolParams protocol;
    market::MarketParams market;
    market::MarketEnvironment environment;
    market::Population population;
    FeeModel fees = ConstantFee{};
    std::vector<Event> events;
    EquilibriumCriteria equilibrium;

    /// Throws DomainError naming the offending field. Selectors, tiers and
    /// generations referenced by events are resolved here, never at runtime.
    void validate() const;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// ---- state and trajectory -------------------------------------------------

struct SimState {
    protocol::ChainState chain;
    market::MarketEnvironment env;
    market::Population population;
    market::MarketParams market;
    FeeModel fees = ConstantFee{};
    BtcPrice btc_price;
};

[[nodiscard]] SimState initial_state(const SimConfig& config);

/// The event's target field is mutated; nothing else is touched, except that
/// a new generation reprices the older ones on the secondary market.
[[nodiscard]] SimState apply_event(const SimState& state, const Event& event);

/// V_h at the state's difficulty: p_b (R + F) / difficulty, the value of the
/// work expected for the next block.
[[nodiscard]] HashPrice current_hash_value(const SimState& state, const protocol::ProtocolParams& params);

struct Record {
    double time = 0.0;          // s
    std::uint64_t height = 0;
    double hash_rate = 0.0;     // TH/s
    double tau_window = 0.0;    // s, mean interval over trailing retarget window
    double difficulty = 0.0;    // TH
    double hash_value = 0.0;    // $/TH
    double mining_share = 0.0;  // frac/yr
    double epsilon = 0.0;       // hash-weighted fleet margin
    double energy_rate = 0.0;   // kWh/s
    double reward = 0.0;        // BTC
    double fees = 0.0;          // BTC
    double minted = 0.0;        // BTC
    double btc_price = 0.0;     // $/BTC
    double pressure = 0.0;      // market_pressure, not emitted
    std::vector<double> gen_hash_rate;  // aligned with Trajectory::gen_ids
    std::vector<double> tier_hash_rate; // aligned with Trajectory::tier_names
};

enum class RunStatus { Completed, Halted };

struct Trajectory {
    std::vector<Record> records;
    std::vector<std::string> gen_ids;
    std::vector<std::string> tier_names;
    RunStatus status = RunStatus::Completed;
    std::string message;
    /// Sim time at which the first generation at the Landauer floor appeared.
    std::optional<double> landauer_floor_time;
    SimState final_state;
};

/// Block-by-block simulation. Per block: draw the interval, apply due
/// events, value the block, step entry/exit with dt = interval, retarget on
/// schedule, evolve hardware, record. Deterministic given (config, seed).
[[nodiscard]] Trajectory run(const SimConfig& config);

/// Runs independent configs concurrently; result i belongs to config i.
[[nodiscard]] std::vector<Trajectory> run_batch(const std::vector<SimConfig>& configs, unsigned threads = 0);

struct EquilibriumDetection {
    bool reached = false;
    double at = 0.0; // start of the final run of equilibrium windows
};

/// A window qualifies when every record in it has market pressure below
/// `tol` and relative H spread below `tol`. Reached iff the window ending at
/// the last record qualifies.
[[nodiscard]] EquilibriumDetection detect_equilibrium(const Trajectory& traj, std::uint64_t window, double tol);

struct TerminalCurve {
    std::vector<analytics::SupplyEntry> curve;
    analytics::RevenueSnapshot revenue;
};

/// Existing cohorts at their own cost basis plus frontier entrants on every
/// tier with headroom, priced at the protocol's target block time.
[[nodiscard]] TerminalCurve terminal_supply_curve(const SimState& state, const protocol::ProtocolParams& params);

struct LongRunProjection {
    Trajectory trajectory;
    std::optional<double> floor_time;
    HashRate terminal_hash_rate;
    HashRate terminal_ceiling;
    Efficiency terminal_frontier_efficiency;
};

/// Standard run, reporting Landauer-floor attainment and the terminal hash
/// rate against the closed-form ceiling at terminal parameters.
[[nodiscard]] LongRunProjection long_run_projection(const SimConfig& config);

} // namespace powecon::scenario
