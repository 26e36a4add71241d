#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "powecon/output.hpp"
#include "powecon/scenario.hpp"

namespace powecon::report {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// One row of the reference-value comparison.
struct Comparison {
    std::string key;
    std::string quantity;
    std::string unit;
    double computed = 0.0;
    double reference = 0.0;
    std::string provenance; // PAPER or DERIVED
    std::string tolerance;  // as written in the table, e.g. "rel:0.25"
    /// Informational rows carry no pass/fail verdict.
    std::optional<bool> pass;
};

struct Report {
    std::vector<std::string> summary;
    std::vector<Check> checks;
    std::vector<Comparison> comparisons;

    [[nodiscard]] bool passed() const;
};

/// Evaluates a tolerance spec: sig1, rel:x, abs:x, factor:x, within:lo:hi,
/// max (computed <= reference), info (always nullopt).
[[nodiscard]] std::optional<bool> within_tolerance(double computed, double reference, const std::string& tolerance);

/// Reference table rows recomputed with the analytics engine. `catalog`
/// supplies the OG/NG hardware; unknown keys fail.
[[nodiscard]] std::vector<Comparison> paper_comparison(const std::filesystem::path& table_csv,
                                                       const std::filesystem::path& catalog);

/// Machine-readable run summary written next to the trajectory.
[[nodiscard]] std::string run_summary_json(const scenario::SimConfig& config, const scenario::Trajectory& traj,
                                           const std::optional<scenario::LongRunProjection>& projection);

/// Invariant checks over a trajectory table.
[[nodiscard]] std::vector<Check> trajectory_checks(const output::Table& table, const scenario::SimConfig& config);

/// Reads <dir>/config.yaml, <dir>/run.json and <dir>/trajectory.{csv,json}.
[[nodiscard]] Report build_run_report(const std::filesystem::path& run_dir, const std::filesystem::path& data_dir);

void print_report(const Report& report, std::ostream& out);

} // namespace powecon::report
