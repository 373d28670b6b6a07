#pragma once

// Aggregation of per-query and per-flood measurements.
//
// Energy is packet-count accounting: one unit per send and one per receive.
// Cost figures average over all queries (failed ones included — they burned
// packets too); latency averages over successful queries only, since a hop
// count to a target that was never found is meaningless.

#include <cstdint>
#include <optional>
#include <vector>

#include "lbf/engine.hpp"
#include "lbf/packets.hpp"

namespace lbf::metrics {

// Outcome of one target query, measured as counter deltas across its run.
struct QueryRecord {
    NodeId target = 0;
    std::uint64_t cost = 0;    // packets transmitted network-wide
    std::uint64_t energy = 0;  // transmitted + received
    bool success = false;
    int hops = 0;  // query hop count on first arrival at the target
};

// Outcome of one dissemination flood (a query nobody answers).
struct DisseminationRecord {
    std::size_t received_nodes = 0;   // r: nodes that heard at least one copy
    std::size_t broadcast_nodes = 0;  // t: nodes that performed a broadcast
    std::uint64_t energy = 0;         // total sends + receives
    std::size_t holding_nodes = 0;    // n: nodes holding the message (source included)
    std::size_t total_nodes = 0;      // m
};

// Timing and energy of the level-building phase.
struct LevelBuildRecord {
    double t_start = 0.0;
    double t_end = 0.0;          // time of the last level adoption
    std::uint64_t energy = 0;    // sends + receives during the phase
};

// Everything a CSV row is built from.
struct MetricsReport {
    double average_cost = 0.0;
    double average_energy_cost = 0.0;
    double average_latency = 0.0;  // NaN when no query succeeded
    double suc_ratio = 0.0;        // percent
    std::vector<double> average_load;  // per node, over the query phase
    double convergence_rate = 0.0;
    std::uint64_t ec_level_building = 0;
    std::optional<double> sr;  // empty when no dissemination reached anyone
    double ec = 0.0;
    double re = 0.0;
};

// Mean packets transmitted per query.  Throws std::invalid_argument on an
// empty record set (the mean of nothing is not zero).
double average_cost(const std::vector<QueryRecord>& records);

// Mean sends+receives per query; same domain rules as average_cost.
double average_energy_cost(const std::vector<QueryRecord>& records);

// Mean hop count over successful queries; NaN when none succeeded.
double average_latency(const std::vector<QueryRecord>& records);

// Successful queries / all queries, as a percentage in [0, 100].
double suc_ratio(const std::vector<QueryRecord>& records);

// Per-node (sent+received) across the whole query phase divided by the
// number of queries; computed from counter snapshots taken around the phase.
std::vector<double> per_node_average_load(const std::vector<NodeCounters>& before,
                                          const std::vector<NodeCounters>& after,
                                          std::size_t query_count);

double convergence_rate(const LevelBuildRecord& record);
std::uint64_t ec_level_building(const LevelBuildRecord& record);

struct BroadcastMetrics {
    std::optional<double> sr;  // (r - t) / r; empty when r = 0
    double ec = 0.0;           // total energy
    double re = 0.0;           // n / m
};

BroadcastMetrics broadcast_metrics(const DisseminationRecord& record);

// Helpers for building records out of counter snapshots.
std::uint64_t total_energy_delta(const std::vector<NodeCounters>& before,
                                 const std::vector<NodeCounters>& after);
DisseminationRecord make_dissemination_record(const std::vector<NodeCounters>& before,
                                              const std::vector<NodeCounters>& after);

}  // namespace lbf::metrics
