#pragma once

// Experiment driver: seeds × thresholds × protocols → CSV rows.
//
// One cell = one (threshold, seed-pair) simulation: build the topology, run
// level building, run a batch of dissemination floods (for the broadcast
// metrics), then query every chosen target once.  Every cell is a fresh
// simulator with freshly derived random streams, so any single CSV row can
// be reproduced from the seeds in that row alone.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lbf/metrics.hpp"
#include "lbf/topology.hpp"

namespace lbf {

struct SeedPair {
    std::uint64_t topo_seed = 1;
    std::uint64_t proto_seed = 1;

    bool operator==(const SeedPair&) const = default;
};

struct ExperimentSpec {
    std::string scenario = "s3";   // "s1".."s5", or "custom" + custom_config
    ScenarioConfig custom_config;  // used only when scenario == "custom"
    std::string protocol = "lbf";  // "lbf" | "flood"
    std::vector<double> p_values;  // empty → the scenario's default threshold
    std::vector<SeedPair> seeds = {{1, 1}};
    std::vector<NodeId> targets;  // empty → every sensor node, in id order
    double hop_delay = 1.0;
    double jitter_max = 0.1;
    double rad_t_max = 0.5;
    std::uint32_t payload_bytes = 8;
    std::uint32_t broadcast_batch = 10;  // dissemination floods per cell
    bool include_failed_in_cost = true;  // false: cost averages over successes only
    bool allow_large = false;            // gate for the s4/s5-scale runs
};

// The threshold the study used for each preset scenario.
double default_threshold_p(int scenario);

// Preset lookup ("s1".."s5") or the inline custom config.
ScenarioConfig resolve_scenario(const ExperimentSpec& spec);

// One CSV row.
struct CellResult {
    std::string scenario;
    std::string protocol;
    double p = 0.0;
    SeedPair seeds;
    metrics::MetricsReport report;
    int max_level = 0;       // deepest level reached (protocol state; oracle for flood)
    double avg_level = 0.0;  // mean level over reachable sensors
    std::uint64_t reply_failures = 0;
    std::uint64_t unknown_level_fallbacks = 0;
};

// Runs one cell.  `trace`, when non-null, receives one line per engine event.
CellResult run_cell(const ExperimentSpec& spec, double p, SeedPair seeds,
                    std::ostream* trace = nullptr);

// Runs the full grid (thresholds outer, seeds inner).  Throws
// std::invalid_argument on a bad spec, including large scenarios without
// allow_large.
std::vector<CellResult> run_experiment(const ExperimentSpec& spec, std::ostream* trace = nullptr);

// CSV with the fixed, versioned column set; identical spec → identical bytes.
std::string csv_header();
std::string to_csv_row(const CellResult& cell);
std::string to_csv(const std::vector<CellResult>& cells);

// Paired per-seed ratios A/B of the headline metrics.
struct CompareRow {
    SeedPair seeds;
    double cost_ratio = 0.0;
    double energy_ratio = 0.0;
    double latency_ratio = 0.0;
    double suc_ratio_ratio = 0.0;
};
struct CompareSummary {
    std::vector<CompareRow> rows;
    double mean_cost_ratio = 0.0;
    double mean_energy_ratio = 0.0;
    double mean_latency_ratio = 0.0;
    double mean_suc_ratio_ratio = 0.0;
};

// Requires identical scenario and seed lists and a single threshold per
// spec; throws std::invalid_argument otherwise.
CompareSummary compare(const ExperimentSpec& spec_a, const ExperimentSpec& spec_b);
std::string to_csv(const CompareSummary& summary);

}  // namespace lbf
