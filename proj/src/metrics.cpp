#include "lbf/metrics.hpp"

#include <limits>
#include <stdexcept>

namespace lbf::metrics {
namespace {

void require_nonempty(const std::vector<QueryRecord>& records, const char* what) {
    if (records.empty()) throw std::invalid_argument(std::string(what) + " of zero queries");
}

}  // namespace

double average_cost(const std::vector<QueryRecord>& records) {
    require_nonempty(records, "average_cost");
    std::uint64_t total = 0;
    for (const auto& r : records) total += r.cost;
    return static_cast<double>(total) / static_cast<double>(records.size());
}

double average_energy_cost(const std::vector<QueryRecord>& records) {
    require_nonempty(records, "average_energy_cost");
    std::uint64_t total = 0;
    for (const auto& r : records) total += r.energy;
    return static_cast<double>(total) / static_cast<double>(records.size());
}

double average_latency(const std::vector<QueryRecord>& records) {
    std::uint64_t hops = 0;
    std::size_t successes = 0;
    for (const auto& r : records) {
        if (!r.success) continue;
        hops += static_cast<std::uint64_t>(r.hops);
        ++successes;
    }
    if (successes == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(hops) / static_cast<double>(successes);
}

double suc_ratio(const std::vector<QueryRecord>& records) {
    require_nonempty(records, "suc_ratio");
    std::size_t successes = 0;
    for (const auto& r : records)
        if (r.success) ++successes;
    return 100.0 * static_cast<double>(successes) / static_cast<double>(records.size());
}

std::vector<double> per_node_average_load(const std::vector<NodeCounters>& before,
                                          const std::vector<NodeCounters>& after,
                                          std::size_t query_count) {
    if (before.size() != after.size())
        throw std::invalid_argument("counter snapshots cover different node sets");
    if (query_count == 0) throw std::invalid_argument("per_node_average_load of zero queries");
    std::vector<double> load(before.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        const std::uint64_t delta =
            (after[i].sent - before[i].sent) + (after[i].received - before[i].received);
        load[i] = static_cast<double>(delta) / static_cast<double>(query_count);
    }
    return load;
}

double convergence_rate(const LevelBuildRecord& record) { return record.t_end - record.t_start; }

std::uint64_t ec_level_building(const LevelBuildRecord& record) { return record.energy; }

BroadcastMetrics broadcast_metrics(const DisseminationRecord& record) {
    BroadcastMetrics out;
    if (record.received_nodes > 0) {
        // Signed difference: a flood where even the edge nodes rebroadcast has
        // more transmitters than receivers (the source transmits unheard), and
        // the saved-rebroadcast ratio legitimately goes negative.
        const double saved = static_cast<double>(record.received_nodes) -
                             static_cast<double>(record.broadcast_nodes);
        out.sr = saved / static_cast<double>(record.received_nodes);
    }
    out.ec = static_cast<double>(record.energy);
    out.re = record.total_nodes == 0
                 ? 0.0
                 : static_cast<double>(record.holding_nodes) / static_cast<double>(record.total_nodes);
    return out;
}

std::uint64_t total_energy_delta(const std::vector<NodeCounters>& before,
                                 const std::vector<NodeCounters>& after) {
    if (before.size() != after.size())
        throw std::invalid_argument("counter snapshots cover different node sets");
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < before.size(); ++i)
        total += (after[i].sent - before[i].sent) + (after[i].received - before[i].received);
    return total;
}

DisseminationRecord make_dissemination_record(const std::vector<NodeCounters>& before,
                                              const std::vector<NodeCounters>& after) {
    if (before.size() != after.size())
        throw std::invalid_argument("counter snapshots cover different node sets");
    DisseminationRecord rec;
    rec.total_nodes = before.size();
    for (std::size_t i = 0; i < before.size(); ++i) {
        const std::uint64_t sent = after[i].sent - before[i].sent;
        const std::uint64_t bcast = after[i].sent_broadcast - before[i].sent_broadcast;
        const std::uint64_t received = after[i].received - before[i].received;
        if (received > 0) rec.received_nodes += 1;
        if (bcast > 0) rec.broadcast_nodes += 1;
        if (received > 0 || sent > 0) rec.holding_nodes += 1;  // touched = holds the message
        rec.energy += sent + received;
    }
    return rec;
}

}  // namespace lbf::metrics
