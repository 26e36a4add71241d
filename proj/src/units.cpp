#include "powecon/units.hpp"

namespace powecon {

double per_year_to_per_second(double per_year) { return per_year / kSecondsPerYear; }

double per_second_to_per_year(double per_second) { return per_second * kSecondsPerYear; }

double kwh_to_joules(double kwh) { return kwh * kJoulesPerKwh; }

double joules_to_kwh(double joules) { return joules / kJoulesPerKwh; }

Duration years(double n) { return Duration(n * kSecondsPerYear); }

UsdPerYear per_year(UsdPerSecond rate) { return UsdPerYear(per_second_to_per_year(rate.value())); }

UsdPerSecond energy_cost_rate(HashRate hash_rate, Efficiency efficiency, EnergyPrice energy_price)
{
    return UsdPerSecond(energy_price.value() * efficiency.value() * hash_rate.value());
}

} // namespace powecon
