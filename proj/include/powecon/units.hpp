#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace powecon {

/// Raised when a value or operation leaves the model's domain (non-finite
/// quantity, zero hash rate, unbounded limit, ...). The CLI maps it to exit 1.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Sign { Any, NonNegative, Positive };

/// A 64-bit floating point scalar tagged with one physical dimension.
///
/// Construction validates finiteness and the sign policy of the dimension.
/// Only same-dimension addition is provided; products across dimensions go
/// through the named functions of each module so every formula states its
/// units explicitly.
template <class Tag, Sign Policy>
class Quantity {
public:
    static constexpr std::string_view unit = Tag::unit;

    constexpr Quantity() noexcept
        requires(Policy != Sign::Positive)
    = default;

    explicit Quantity(double value) : value_(check(value)) {}

    [[nodiscard]] constexpr double value() const noexcept { return value_; }

    friend constexpr auto operator<=>(const Quantity&, const Quantity&) = default;

    friend Quantity operator+(Quantity a, Quantity b) { return Quantity(a.value_ + b.value_); }
    friend Quantity operator-(Quantity a, Quantity b) { return Quantity(a.value_ - b.value_); }
    friend Quantity operator*(Quantity a, double k) { return Quantity(a.value_ * k); }
    friend Quantity operator*(double k, Quantity a) { return Quantity(a.value_ * k); }
    friend Quantity operator/(Quantity a, double k) { return Quantity(a.value_ / k); }
    friend double operator/(Quantity a, Quantity b) { return a.value_ / b.value_; }

private:
    static double check(double v)
    {
        if (!std::isfinite(v))
            throw DomainError(std::string(Tag::name) + ": non-finite value");
        if constexpr (Policy == Sign::NonNegative) {
            if (v < 0.0)
                throw DomainError(std::string(Tag::name) + ": must be >= 0, got " + std::to_string(v));
        } else if constexpr (Policy == Sign::Positive) {
            if (!(v > 0.0))
                throw DomainError(std::string(Tag::name) + ": must be > 0, got " + std::to_string(v));
        }
        return v;
    }

    double value_ = 0.0;
};

namespace tags {
struct HashRate { static constexpr std::string_view name = "hash rate", unit = "TH/s"; };
struct Efficiency { static constexpr std::string_view name = "efficiency", unit = "kWh/TH"; };
struct HashPrice { static constexpr std::string_view name = "hash price", unit = "$/TH"; };
struct EnergyPrice { static constexpr std::string_view name = "energy price", unit = "$/kWh"; };
struct BtcPrice { static constexpr std::string_view name = "BTC price", unit = "$/BTC"; };
struct BtcAmount { static constexpr std::string_view name = "BTC amount", unit = "BTC"; };
struct Duration { static constexpr std::string_view name = "duration", unit = "s"; };
struct DepreciationRate { static constexpr std::string_view name = "depreciation rate", unit = "$/s"; };
struct AnnualShare { static constexpr std::string_view name = "annual share", unit = "frac/yr"; };
struct Difficulty { static constexpr std::string_view name = "difficulty", unit = "TH"; };
struct Temperature { static constexpr std::string_view name = "temperature", unit = "K"; };
struct Usd { static constexpr std::string_view name = "money", unit = "$"; };
struct UsdPerSecond { static constexpr std::string_view name = "money rate", unit = "$/s"; };
struct UsdPerYear { static constexpr std::string_view name = "money rate", unit = "$/yr"; };
} // namespace tags

using HashRate = Quantity<tags::HashRate, Sign::NonNegative>;
using Efficiency = Quantity<tags::Efficiency, Sign::NonNegative>;
// Sign is checked where a hash price is produced (catalog prices, V_h); a
// marginal cost may go negative when negative energy prices are enabled.
using HashPrice = Quantity<tags::HashPrice, Sign::Any>;
// Negative prices are a config-level opt-in (allow_negative_energy_price).
using EnergyPrice = Quantity<tags::EnergyPrice, Sign::Any>;
using BtcPrice = Quantity<tags::BtcPrice, Sign::NonNegative>;
using BtcAmount = Quantity<tags::BtcAmount, Sign::NonNegative>;
using Duration = Quantity<tags::Duration, Sign::NonNegative>;
using DepreciationRate = Quantity<tags::DepreciationRate, Sign::NonNegative>;
using AnnualShare = Quantity<tags::AnnualShare, Sign::NonNegative>;
/// Expected terahashes per block.
using Difficulty = Quantity<tags::Difficulty, Sign::Positive>;
using Temperature = Quantity<tags::Temperature, Sign::NonNegative>;
using Usd = Quantity<tags::Usd, Sign::Any>;
using UsdPerSecond = Quantity<tags::UsdPerSecond, Sign::Any>;
using UsdPerYear = Quantity<tags::UsdPerYear, Sign::Any>;

/// Julian year.
inline constexpr double kSecondsPerYear = 31'557'600.0;
inline constexpr double kJoulesPerKwh = 3.6e6;
inline constexpr double kHashesPerTerahash = 1e12;

[[nodiscard]] double per_year_to_per_second(double per_year);
[[nodiscard]] double per_second_to_per_year(double per_second);
[[nodiscard]] double kwh_to_joules(double kwh);
[[nodiscard]] double joules_to_kwh(double joules);

[[nodiscard]] Duration years(double n);
[[nodiscard]] UsdPerYear per_year(UsdPerSecond rate);

/// Electricity spend of hash rate H running at efficiency alpha: p_e * alpha * H.
[[nodiscard]] UsdPerSecond energy_cost_rate(HashRate hash_rate, Efficiency efficiency, EnergyPrice energy_price);

} // namespace powecon
