#include "powecon/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <thread>

namespace powecon::scenario {

// ---- fees -------------------------------------------------------------------

double utilization(const CongestionFee& model, double t)
{
    const auto& d = model.demand;
    if (d.empty())
        return 0.0;
    double rate = d.front().rate;
    if (t >= d.back().at) {
        rate = d.back().rate;
    } else if (t > d.front().at) {
        auto hi = std::upper_bound(d.begin(), d.end(), t, [](double x, const DemandPoint& p) { return x < p.at; });
        auto lo = hi - 1;
        const double w = (t - lo->at) / (hi->at - lo->at);
        rate = lo->rate + w * (hi->rate - lo->rate);
    }
    return rate / model.capacity;
}

BtcAmount evaluate_fee_curve(const FeeCurve& curve, double u)
{
    return std::visit(overloaded{
                          [u](const QuadraticFeeCurve& q) {
                              const double excess = std::max(0.0, u - q.threshold);
                              return BtcAmount(q.reference_fee.value() * excess * excess);
                          },
                          [u](const TableFeeCurve& tbl) {
                              const auto& p = tbl.points;
                              if (p.empty())
                                  return BtcAmount{};
                              if (u <= p.front().first)
                                  return p.front().second;
                              if (u >= p.back().first)
                                  return p.back().second;
                              auto hi = std::upper_bound(p.begin(), p.end(), u,
                                                         [](double x, const auto& pt) { return x < pt.first; });
                              auto lo = hi - 1;
                              const double w = (u - lo->first) / (hi->first - lo->first);
                              const double f = lo->second.value() + w * (hi->second.value() - lo->second.value());
                              return BtcAmount(std::max(0.0, f));
                          },
                      },
                      curve);
}

BtcAmount fee_per_block(const FeeModel& model, double t)
{
    return std::visit(overloaded{
                          [](const ConstantFee& c) { return c.amount; },
                          [t](const CongestionFee& c) { return evaluate_fee_curve(c.curve, utilization(c, t)); },
                      },
                      model);
}

void validate_fee_model(const FeeModel& model)
{
    if (const auto* c = std::get_if<CongestionFee>(&model)) {
        if (!(c->capacity > 0.0) || !std::isfinite(c->capacity))
            throw DomainError("fees.capacity must be > 0");
        for (std::size_t i = 0; i < c->demand.size(); ++i) {
            if (!(c->demand[i].rate >= 0.0) || !std::isfinite(c->demand[i].rate))
                throw DomainError("fees.demand: rate must be >= 0");
            if (i > 0 && !(c->demand[i].at > c->demand[i - 1].at))
                throw DomainError("fees.demand: times must be strictly increasing");
        }
        if (const auto* tbl = std::get_if<TableFeeCurve>(&c->curve)) {
            for (std::size_t i = 1; i < tbl->points.size(); ++i)
                if (!(tbl->points[i].first > tbl->points[i - 1].first))
                    throw DomainError("fees.curve.points: utilization must be strictly increasing");
        }
    }
}

// ---- events -----------------------------------------------------------------

std::string action_name(const Action& action)
{
    return std::visit(overloaded{
                          [](const actions::SetBtcPrice&) { return std::string("set_btc_price"); },
                          [](const actions::ScalePopulation&) { return std::string("scale_population"); },
                          [](const actions::SetEnergyPrice&) { return std::string("set_energy_price"); },
                          [](const actions::IntroduceGeneration&) { return std::string("introduce_generation"); },
                          [](const actions::SetFeeModel&) { return std::string("set_fee_model"); },
                          [](const actions::SetMarketParams&) { return std::string("set_market_params"); },
                      },
                      action);
}

namespace {

bool matches(const Selector& sel, const market::MinerCohort& c, const market::MarketEnvironment& env)
{
    if (sel.gen && env.gens[c.gen].id != *sel.gen)
        return false;
    if (sel.tier && env.tiers[c.tier].name != *sel.tier)
        return false;
    return true;
}

void check_energy_price(EnergyPrice p, bool allow_negative, const std::string& where)
{
    if (p.value() < 0.0 && !allow_negative)
        throw DomainError(where + ": negative energy price requires allow_negative_energy_price");
}

} // namespace

void SimConfig::validate() const
{
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw DomainError("simulation.horizon must be > 0");
    if (record_interval == 0)
        throw DomainError("simulation.record_interval must be > 0");
    if (!(initial_btc_price.value() > 0.0))
        throw DomainError("simulation.initial_btc_price must be > 0");
    protocol.validate();
    market.validate();
    if (equilibrium.window == 0 || !(equilibrium.tolerance > 0.0))
        throw DomainError("equilibrium: window and tolerance must be > 0");

    for (std::size_t i = 0; i < environment.gens.size(); ++i) {
        environment.gens[i].validate(market.landauer_temperature);
        for (std::size_t j = 0; j < i; ++j)
            if (environment.gens[j].id == environment.gens[i].id)
                throw DomainError("hardware: duplicate id '" + environment.gens[i].id + "'");
    }
    if (environment.tiers.empty())
        throw DomainError("energy_tiers: at least one tier is required");
    for (std::size_t i = 0; i < environment.tiers.size(); ++i) {
        const auto& t = environment.tiers[i];
        check_energy_price(t.price, allow_negative_energy_price, "energy_tiers." + t.name + ".price");
        for (std::size_t j = 0; j < i; ++j)
            if (environment.tiers[j].name == t.name)
                throw DomainError("energy_tiers: duplicate name '" + t.name + "'");
    }
    for (const auto& c : population.cohorts) {
        if (c.gen >= environment.gens.size() || c.tier >= environment.tiers.size())
            throw DomainError("population: cohort references unknown generation or tier");
        if (!(c.machine_count >= 0.0) || !std::isfinite(c.machine_count))
            throw DomainError("population: machines must be >= 0");
    }
    if (market.evolution.enabled && !environment.find_gen(market.evolution.base_gen))
        throw DomainError("market.hardware_evolution.base: unknown generation '" + market.evolution.base_gen + "'");
    validate_fee_model(fees);

    std::vector<std::string> gen_ids;
    for (const auto& g : environment.gens)
        gen_ids.push_back(g.id);
    double last_at = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        const std::string where = "events[" + std::to_string(i) + "]";
        if (!(e.at >= 0.0) || !std::isfinite(e.at))
            throw DomainError(where + ".at must be >= 0");
        if (e.at < last_at)
            throw DomainError(where + ": events must be sorted by time");
        last_at = e.at;
        std::visit(overloaded{
                       [&](const actions::SetBtcPrice& a) {
                           if (!(a.price.value() > 0.0))
                               throw DomainError(where + ".price must be > 0");
                       },
                       [&](const actions::ScalePopulation& a) {
                           if (!(a.factor >= 0.0) || !std::isfinite(a.factor))
                               throw DomainError(where + ".factor must be >= 0");
                           if (a.selector.tier && !environment.find_tier(*a.selector.tier))
                               throw DomainError(where + ": unknown selector tier '" + *a.selector.tier + "'");
                           if (a.selector.gen &&
                               std::find(gen_ids.begin(), gen_ids.end(), *a.selector.gen) == gen_ids.end())
                               throw DomainError(where + ": unknown selector generation '" + *a.selector.gen + "'");
                       },
                       [&](const actions::SetEnergyPrice& a) {
                           if (!environment.find_tier(a.tier))
                               throw DomainError(where + ": unknown tier '" + a.tier + "'");
                           check_energy_price(a.price, allow_negative_energy_price, where + ".price");
                       },
                       [&](const actions::IntroduceGeneration& a) {
                           a.gen.validate(market.landauer_temperature);
                           if (std::find(gen_ids.begin(), gen_ids.end(), a.gen.id) != gen_ids.end())
                               throw DomainError(where + ": duplicate generation id '" + a.gen.id + "'");
                           gen_ids.push_back(a.gen.id);
                       },
                       [&](const actions::SetFeeModel& a) { validate_fee_model(a.model); },
                       [&](const actions::SetMarketParams& a) { a.params.validate(); },
                   },
                   e.action);
    }
}

SimState initial_state(const SimConfig& config)
{
    SimState s;
    s.env = config.environment;
    s.population = config.population;
    s.market = config.market;
    s.fees = config.fees;
    s.btc_price = config.initial_btc_price;
    market::sort_by_operating_cost(s.population, s.env);

    Difficulty difficulty{1.0};
    if (config.initial_difficulty) {
        difficulty = *config.initial_difficulty;
    } else {
        const double h0 = market::aggregate_hash_rate(s.population, s.env).value();
        if (!(h0 > 0.0))
            throw DomainError("initial population has zero hash rate; set simulation.initial_difficulty");
        difficulty = Difficulty(h0 * config.protocol.target_block_time.value());
    }
    s.chain = protocol::initial_chain_state(config.start_height, difficulty, config.protocol);
    return s;
}

SimState apply_event(const SimState& state, const Event& event)
{
    SimState s = state;
    std::visit(overloaded{
                   [&](const actions::SetBtcPrice& a) { s.btc_price = a.price; },
                   [&](const actions::ScalePopulation& a) {
                       std::vector<double> removed(s.env.tiers.size(), 0.0);
                       for (auto& c : s.population.cohorts) {
                           if (!matches(a.selector, c, s.env))
                               continue;
                           removed[c.tier] += market::cohort_hash_rate(c, s.env).value() * (1.0 - a.factor);
                           c.machine_count *= a.factor;
                       }
                       if (a.retire_capacity) {
                           for (std::size_t t = 0; t < s.env.tiers.size(); ++t) {
                               auto& cap = s.env.tiers[t].capacity;
                               if (cap && removed[t] > 0.0)
                                   cap = HashRate(std::max(0.0, cap->value() - removed[t]));
                           }
                       }
                   },
                   [&](const actions::SetEnergyPrice& a) {
                       const auto idx = s.env.find_tier(a.tier);
                       if (!idx)
                           throw DomainError("set_energy_price: unknown tier '" + a.tier + "'");
                       s.env.tiers[*idx].price = a.price;
                       market::sort_by_operating_cost(s.population, s.env);
                   },
                   [&](const actions::IntroduceGeneration& a) {
                       if (s.env.find_gen(a.gen.id))
                           throw DomainError("introduce_generation: duplicate id '" + a.gen.id + "'");
                       s.env.gens = market::reprice_secondary(s.env.gens, a.gen, s.market.reference_energy_price);
                       s.env.gens.push_back(a.gen);
                   },
                   [&](const actions::SetFeeModel& a) { s.fees = a.model; },
                   [&](const actions::SetMarketParams& a) { s.market = a.params; },
               },
               event.action);
    return s;
}

HashPrice current_hash_value(const SimState& state, const protocol::ProtocolParams& params)
{
    const double reward = protocol::block_reward(state.chain.height, params).value();
    const double fees = fee_per_block(state.fees, state.chain.clock).value();
    return HashPrice(state.btc_price.value() * (reward + fees) / state.chain.difficulty.value());
}

// ---- run ----------------------------------------------------------------------

namespace {

/// Timestamps of the trailing retarget window.
class BlockTimes {
public:
    explicit BlockTimes(std::size_t window) : times_(window + 1, 0.0) {}

    void push(double t)
    {
        times_[head_] = t;
        head_ = (head_ + 1) % times_.size();
        count_ = std::min(count_ + 1, times_.size());
    }

    /// Mean interval over the last min(window, blocks seen) blocks.
    [[nodiscard]] std::optional<double> mean_interval() const
    {
        if (count_ < 2)
            return std::nullopt;
        const std::size_t n = times_.size();
        const double newest = times_[(head_ + n - 1) % n];
        const double oldest = times_[(head_ + n - count_) % n];
        return (newest - oldest) / static_cast<double>(count_ - 1);
    }

private:
    std::vector<double> times_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
};

class Recorder {
public:
    Recorder(Trajectory& traj, const protocol::ProtocolParams& params) : traj_(traj), params_(params) {}

    void record(const SimState& s, const BlockTimes& times)
    {
        const double h = market::aggregate_hash_rate(s.population, s.env).value();
        const HashPrice vh = current_hash_value(s, params_);

        Record r;
        r.time = s.chain.clock;
        r.height = s.chain.height;
        r.hash_rate = h;
        r.difficulty = s.chain.difficulty.value();
        r.tau_window = times.mean_interval().value_or(h > 0.0 ? r.difficulty / h : params_.target_block_time.value());
        r.hash_value = vh.value();
        r.reward = protocol::block_reward(s.chain.height, params_).value();
        r.fees = fee_per_block(s.fees, s.chain.clock).value();
        r.minted = s.chain.minted.value();
        r.btc_price = s.btc_price.value();
        r.mining_share = r.minted > 0.0 ? analytics::mining_share(BtcAmount(r.reward), BtcAmount(r.fees),
                                                                  s.chain.minted, Duration(r.tau_window))
                                              .value()
                                        : 0.0;
        r.epsilon = market::fleet_margin(s.population, s.env, vh);
        r.energy_rate = market::energy_rate(s.population, s.env);
        r.pressure = market::market_pressure(s.population, s.env, vh, s.chain.clock, s.market);

        for (const auto& g : s.env.gens)
            if (std::find(traj_.gen_ids.begin(), traj_.gen_ids.end(), g.id) == traj_.gen_ids.end())
                traj_.gen_ids.push_back(g.id);
        for (const auto& t : s.env.tiers)
            if (std::find(traj_.tier_names.begin(), traj_.tier_names.end(), t.name) == traj_.tier_names.end())
                traj_.tier_names.push_back(t.name);
        r.gen_hash_rate.assign(traj_.gen_ids.size(), 0.0);
        r.tier_hash_rate.assign(traj_.tier_names.size(), 0.0);
        for (const auto& c : s.population.cohorts) {
            const double ch = market::cohort_hash_rate(c, s.env).value();
            const auto gi = std::find(traj_.gen_ids.begin(), traj_.gen_ids.end(), s.env.gens[c.gen].id);
            const auto ti = std::find(traj_.tier_names.begin(), traj_.tier_names.end(), s.env.tiers[c.tier].name);
            r.gen_hash_rate[static_cast<std::size_t>(gi - traj_.gen_ids.begin())] += ch;
            r.tier_hash_rate[static_cast<std::size_t>(ti - traj_.tier_names.begin())] += ch;
        }
        traj_.records.push_back(std::move(r));
    }

    void pad()
    {
        for (auto& r : traj_.records) {
            r.gen_hash_rate.resize(traj_.gen_ids.size(), 0.0);
            r.tier_hash_rate.resize(traj_.tier_names.size(), 0.0);
        }
    }

private:
    Trajectory& traj_;
    const protocol::ProtocolParams& params_;
};

double next_evolution_time(const SimState& s, double after)
{
    const auto& evo = s.market.evolution;
    if (!evo.enabled)
        return std::numeric_limits<double>::infinity();
    const auto base = s.env.find_gen(evo.base_gen);
    if (!base)
        return std::numeric_limits<double>::infinity();
    const double t0 = s.env.gens[*base].available_from;
    const double cadence = evo.cadence.value();
    const double k = std::floor((after - t0) / cadence) + 1.0;
    return t0 + std::max(1.0, k) * cadence;
}

} // namespace

Trajectory run(const SimConfig& config)
{
    config.validate();
    const auto& params = config.protocol;

    Trajectory traj;
    Recorder recorder(traj, params);
    RandomStream rng(config.seed, 0);
    BlockTimes times(params.retarget_interval);

    SimState s = initial_state(config);
    std::size_t next_event = 0;
    auto apply_due = [&] {
        while (next_event < config.events.size() && config.events[next_event].at <= s.chain.clock)
            s = apply_event(s, config.events[next_event++]);
    };
    const Efficiency floor = analytics::landauer_limit(s.market.landauer_temperature);
    auto note_floor = [&](const market::HardwareGen& g) {
        if (!traj.landauer_floor_time && g.efficiency <= floor)
            traj.landauer_floor_time = g.available_from;
    };
    for (const auto& g : s.env.gens)
        note_floor(g);

    apply_due();
    times.push(s.chain.clock);
    recorder.record(s, times);
    double evolve_at = next_evolution_time(s, s.chain.clock);
    bool recorded_last = true;

    while (s.chain.clock < config.horizon) {
        const HashRate h = market::aggregate_hash_rate(s.population, s.env);
        if (!(h.value() > 0.0)) {
            traj.status = RunStatus::Halted;
            traj.message = "chain halted: zero hash rate with no pending entry";
            break;
        }
        const Duration interval = config.mode == Mode::Deterministic
                                      ? protocol::expected_block_time(h, s.chain.difficulty)
                                      : protocol::sample_block_interval(rng, h, s.chain.difficulty);
        s.chain = protocol::append_block(s.chain, interval, params);
        times.push(s.chain.clock);
        apply_due();

        const HashPrice vh = current_hash_value(s, params);
        if (interval.value() > 0.0)
            s.population = market::step_entry_exit(s.population, vh, s.env, s.chain.clock, s.market, interval);

        if (protocol::at_retarget_boundary(s.chain, params))
            s.chain = protocol::close_window(s.chain, params);

        if (s.chain.clock >= evolve_at) {
            const std::size_t before = s.env.gens.size();
            auto gens = market::evolve_hardware(s.env.gens, s.chain.clock, s.market);
            for (std::size_t i = before; i < gens.size(); ++i) {
                auto older = std::vector<market::HardwareGen>(gens.begin(), gens.begin() + static_cast<long>(i));
                older = market::reprice_secondary(older, gens[i], s.market.reference_energy_price);
                std::copy(older.begin(), older.end(), gens.begin());
                note_floor(gens[i]);
            }
            s.env.gens = std::move(gens);
            evolve_at = next_evolution_time(s, s.chain.clock);
        }

        recorded_last = (s.chain.height - config.start_height) % config.record_interval == 0;
        if (recorded_last)
            recorder.record(s, times);
    }
    if (!recorded_last)
        recorder.record(s, times);

    recorder.pad();
    traj.final_state = std::move(s);
    return traj;
}

std::vector<Trajectory> run_batch(const std::vector<SimConfig>& configs, unsigned threads)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<Trajectory> out(configs.size());
    std::size_t next = 0;
    while (next < configs.size()) {
        std::vector<std::future<Trajectory>> wave;
        const std::size_t end = std::min(configs.size(), next + threads);
        for (std::size_t i = next; i < end; ++i)
            wave.push_back(std::async(std::launch::async, [&configs, i] { return run(configs[i]); }));
        for (std::size_t i = next; i < end; ++i)
            out[i] = wave[i - next].get();
        next = end;
    }
    return out;
}

EquilibriumDetection detect_equilibrium(const Trajectory& traj, std::uint64_t window, double tol)
{
    const auto& rs = traj.records;
    EquilibriumDetection result;
    if (rs.size() < 2)
        return result;

    auto qualifies = [&](std::size_t end) {
        if (rs[end].height < rs.front().height + window)
            return false;
        const std::uint64_t from = rs[end].height - window;
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        std::size_t points = 0;
        for (std::size_t k = end + 1; k-- > 0 && rs[k].height >= from;) {
            if (!(rs[k].pressure < tol))
                return false;
            lo = std::min(lo, rs[k].hash_rate);
            hi = std::max(hi, rs[k].hash_rate);
            ++points;
        }
        return points >= 2 && hi > 0.0 && (hi - lo) / hi < tol;
    };

    std::size_t i = rs.size();
    while (i > 0 && qualifies(i - 1))
        --i;
    if (i == rs.size())
        return result;
    result.reached = true;
    result.at = rs[i].time;
    return result;
}

TerminalCurve terminal_supply_curve(const SimState& s, const protocol::ProtocolParams& params)
{
    TerminalCurve out;
    for (const auto& c : s.population.cohorts) {
        const double h = market::cohort_hash_rate(c, s.env).value();
        if (!(h > 0.0))
            continue;
        const auto& g = s.env.gens[c.gen];
        out.curve.push_back(analytics::SupplyEntry{s.env.tiers[c.tier].price, g.efficiency,
                                                   c.sunk ? HashPrice{} : g.hash_price(), HashRate(h)});
    }
    if (const auto gen = market::frontier_gen(s.env, s.chain.clock)) {
        const auto& g = s.env.gens[*gen];
        for (std::size_t t = 0; t < s.env.tiers.size(); ++t) {
            std::optional<HashRate> cap;
            if (const auto& limit = s.env.tiers[t].capacity) {
                const double room = limit->value() - market::tier_load(s.population, s.env, t).value();
                if (!(room > 0.0))
                    continue;
                cap = HashRate(room);
            }
            out.curve.push_back(analytics::SupplyEntry{
                s.env.tiers[t].price, g.efficiency,
                HashPrice(g.hash_price().value() * s.market.hardware_price_multiplier), cap});
        }
    }
    out.revenue = analytics::RevenueSnapshot{s.btc_price, protocol::block_reward(s.chain.height, params),
                                             fee_per_block(s.fees, s.chain.clock), params.target_block_time};
    return out;
}

LongRunProjection long_run_projection(const SimConfig& config)
{
    LongRunProjection out;
    out.trajectory = run(config);
    out.floor_time = out.trajectory.landauer_floor_time;
    const SimState& s = out.trajectory.final_state;
    const Record& last = out.trajectory.records.back();
    out.terminal_hash_rate = HashRate(last.hash_rate);

    const auto frontier = market::frontier_gen(s.env, s.chain.clock);
    if (!frontier)
        throw DomainError("long-run projection: no hardware available");
    out.terminal_frontier_efficiency = s.env.gens[*frontier].efficiency;
    EnergyPrice cheapest = s.env.tiers.front().price;
    for (const auto& t : s.env.tiers)
        cheapest = std::min(cheapest, t.price);
    out.terminal_ceiling = analytics::hash_rate_ceiling(AnnualShare(last.mining_share), BtcAmount(last.minted),
                                                        out.terminal_frontier_efficiency, s.btc_price, cheapest);
    return out;
}

} // namespace powecon::scenario
