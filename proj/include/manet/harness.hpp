#pragma once

// Replication batches, parameter sweeps and their CSV outputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "manet/flood_control.hpp"
#include "manet/metrics.hpp"
#include "manet/scenario.hpp"

namespace manet {

class RunFailure : public std::runtime_error {
public:
    RunFailure(std::uint64_t seed, const std::string& what);
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

// Runs config.replications simulations with seeds base_seed + i on up to
// `jobs` threads. Reports come back in seed order whatever the completion
// order. The first failing seed aborts the batch with RunFailure.
std::vector<MetricsReport> run_replications(const ScenarioConfig& config, unsigned jobs = 1);

struct SweepSpec {
    std::string name;                 // "fig2", ... or "custom"
    std::string field;                // config key varied by the sweep
    std::vector<std::string> values;  // text form, applied with set_field
    std::vector<Policy> policies;
    ScenarioConfig base;
};

const std::vector<std::string_view>& named_sweeps();

// Built-in sweeps over `base`; nullopt for unknown names.
std::optional<SweepSpec> named_sweep(std::string_view name, const ScenarioConfig& base);

// "key=v1,v2,..." against `base` for the given policies. Throws ConfigError
// for unknown keys or values the key does not accept.
SweepSpec parse_sweep_spec(std::string_view spec, const ScenarioConfig& base,
                           std::vector<Policy> policies);

struct SweepPoint {
    std::string value;
    Policy policy = Policy::None;
    ScenarioConfig config;
    std::vector<MetricsReport> reports;
};

// Points in (value, policy) order, each with base.replications reports.
std::vector<SweepPoint> run_sweep(const SweepSpec& spec, unsigned jobs = 1);

// Stable CSV interface. runs.csv: one row per run; aggregate.csv: one row per
// (value, policy) with <metric>_mean and <metric>_ci95 columns.
struct RowKey {
    std::string scenario;
    std::string sweep;  // sweep name, "single" for plain runs
    std::string field;  // empty for plain runs
    std::string value;
    std::string policy;
};

std::string runs_csv_header();
std::string runs_csv_row(const RowKey& key, const MetricsReport& report);
std::string aggregate_csv_header();
// Throws AggregationError for fewer than 2 reports.
std::string aggregate_csv_row(const RowKey& key, const std::vector<MetricsReport>& reports);

struct WriteResult {
    std::size_t run_rows = 0;
    std::size_t aggregate_rows = 0;
    std::optional<std::string> aggregation_skipped;  // reason, when n < 2
};

// runs.csv, aggregate.csv (when there are >= 2 reports) and meta.txt.
WriteResult write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                              const std::vector<MetricsReport>& reports);

// runs.csv (long format, every run), aggregate.csv (every point), meta.txt,
// and points/<policy>__<value>/aggregate.csv per point.
WriteResult write_sweep_outputs(const std::filesystem::path& dir, const SweepSpec& spec,
                                const std::vector<SweepPoint>& points);

}  // namespace manet
