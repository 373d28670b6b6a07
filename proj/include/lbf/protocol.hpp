#pragma once

// The level-based flooding protocol: node and sink state machines.
//
// Operation has two phases.  Level building: the sink floods a level
// announcement; every node adopts (shortest hops to sink) as its level,
// partitions its neighbors into lower/equal/higher sets, and reports its
// level back to the sink along a random descending path.  Querying: the sink
// floods a query with ttl = the target's level, so the flood dies exactly at
// the target's ring; duplicate suppression uses a random assessment delay
// (RAD) during which a node counts how many neighbors it has already heard
// the query from, then rebroadcasts outward, unicasts to one quiet neighbor,
// or stays silent.  The found target unicasts its data back down the level
// gradient, again via uniformly chosen lower neighbors.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "lbf/engine.hpp"
#include "lbf/packets.hpp"

namespace lbf {

// "Larger than any maximum level" placeholder for a node that has not
// learned its level yet; also the ceiling of the 8-bit wire level field.
inline constexpr std::uint8_t kSentinelLevel = 255;

// Duplicate-counting state while a query sits in its assessment window.
struct RadState {
    std::uint32_t c = 0;     // neighbors heard forwarding this query
    std::uint32_t q = 0;     // total neighbor count
    double deadline = 0.0;   // when the window closes
    QueryPacket cached;      // first-arrival copy, hop_count already +1
};

struct NodeState {
    NodeId my_id = 0;
    std::uint8_t level = kSentinelLevel;
    // Neighbor partition by most recently advertised level, relative to this
    // node's own level.  Sorted vectors; rebuilt on any level change.
    std::vector<NodeId> low_neighbors;
    std::vector<NodeId> equal_neighbors;
    std::vector<NodeId> high_neighbors;
    std::map<NodeId, std::uint8_t> neighbor_levels;  // last advertised level per neighbor
    std::set<QueryKey> processed_queries;
    std::map<QueryKey, RadState> pending_rad;
    std::map<QueryKey, std::set<NodeId>> heard_from;
    std::uint16_t next_seq = 0;  // for this node's own emissions
};

struct SinkState {
    std::map<NodeId, std::uint8_t> level_table;  // node -> best reported level
    int max_known_level = 0;

    struct Outstanding {
        NodeId target = 0;
        double issue_time = 0.0;
        bool used_fallback = false;  // ttl came from max_known_level, not the table
    };
    std::map<std::uint16_t, Outstanding> outstanding;  // open queries by seq
    std::uint16_t next_seq = 0;

    struct QueryResult {
        NodeId target = 0;
        std::uint16_t seq = 0;
        int hops = 0;  // query hop count on first arrival at the target
        double issue_time = 0.0;
        double done_time = 0.0;
        bool used_fallback = false;
    };
    std::vector<QueryResult> completed;
};

class LbfProtocol : public PacketHandler {
public:
    struct Config {
        double threshold_p = 0.4;         // P: gates unicast vs. rebroadcast
        std::uint32_t payload_bytes = 8;  // data-back payload size (wire max 255)
    };

    // Registers itself as the simulator's handler.
    LbfProtocol(Simulator& sim, const Config& config);

    // Schedules the initial sink announcement at the current virtual time.
    // Call once on a fresh network, then run the simulator to quiescence.
    void start_level_building();

    // Issues one query; returns its sequence number.  ttl comes from the
    // sink's level table, or from the deepest known level when the target
    // never reported (kNoTarget always uses the deepest level: such a query
    // is a pure dissemination and nobody answers it).  Run the simulator to
    // quiescence afterwards.  Throws std::invalid_argument for target = sink.
    std::uint16_t start_query(NodeId target);

    // Forgets per-query duplicate-suppression state (processed sets, RAD
    // leftovers).  Call between experiment phases so wrapped sequence
    // numbers cannot alias earlier floods.  Levels and the sink table stay.
    void reset_query_state();

    // PacketHandler
    void on_deliver(NodeId to, NodeId from, const AnyPacket& packet) override;
    void on_rad_expiry(NodeId at, const QueryKey& key) override;

    // Introspection for experiments and tests.
    const NodeState& node(NodeId id) const { return nodes_[id]; }
    const SinkState& sink() const { return sink_; }
    int level_of(NodeId id) const { return nodes_[id].level; }
    int max_level() const;                      // deepest level any node holds
    double level_building_start() const { return lbp_start_; }
    double level_building_end() const { return lbp_last_update_; }  // last adoption time
    std::uint64_t reply_failures() const { return reply_failures_; }
    std::uint64_t unknown_level_fallbacks() const { return unknown_level_fallbacks_; }
    // How many nodes ran the forwarding decision for this query (target hit
    // or RAD expired); the dissemination-coverage measurement.
    std::size_t processed_count(const QueryKey& key) const;

    // Exposed for fixture-level tests: the forwarding decision applied by
    // on_rad_expiry given counts alone.  Returns "drop", "unicast" or
    // "broadcast".
    enum class RadDecision { Drop, Unicast, Broadcast };
    static RadDecision decide(double p, double threshold_p);

private:
    NodeState& mutable_node(NodeId id) { return nodes_[id]; }
    void rebuild_partition(NodeState& n);
    void note_neighbor_level(NodeState& n, NodeId neighbor, std::uint8_t level);
    void handle_level_building(NodeState& n, const LevelBuildingPacket& pkt, NodeId from);
    void handle_level_back(NodeId at, const LevelBackPacket& pkt);
    void handle_query(NodeState& n, const QueryPacket& pkt, NodeId from);
    void handle_data_back(NodeId at, const DataBackPacket& pkt);
    void send_data_back(NodeState& n, const QueryPacket& query);
    void route_descending(NodeId at, const AnyPacket& pkt);  // unicast to a random lower neighbor
    NodeId pick_uniform(const std::vector<NodeId>& from);

    Simulator* sim_;
    Config config_;
    std::vector<NodeState> nodes_;
    SinkState sink_;
    NodeId sink_id_ = 0;
    std::mt19937_64 rad_rng_;
    std::mt19937_64 choice_rng_;
    double lbp_start_ = 0.0;
    double lbp_last_update_ = 0.0;
    std::uint64_t reply_failures_ = 0;
    std::uint64_t unknown_level_fallbacks_ = 0;
    std::map<std::uint16_t, int> target_hit_hops_;  // seq -> query hops at target
};

}  // namespace lbf
