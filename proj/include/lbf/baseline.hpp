#pragma once

// Basic-flooding comparator: every first-time receiver rebroadcasts the query
// once to all neighbors, recording the relay path in the packet; a found
// target unicasts its reply hop-by-hop along that path reversed.  No levels,
// no assessment delay — this is the cost baseline the main protocol is
// measured against.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "lbf/engine.hpp"
#include "lbf/packets.hpp"
#include "lbf/protocol.hpp"

namespace lbf {

class FloodProtocol : public PacketHandler {
public:
    struct Config {
        std::uint32_t payload_bytes = 8;
    };

    // Registers itself as the simulator's handler.
    FloodProtocol(Simulator& sim, const Config& config);

    // Issues one flood with the given hop budget; returns its sequence
    // number.  ttl >= node_count makes the flood network-wide: with
    // duplicate suppression no relay path can revisit a node, so every
    // reachable node rebroadcasts exactly once.  Headline comparisons use
    // that network-wide budget — a budget of exactly the deepest hop level
    // can starve deepest-ring targets when jitter inflates a recorded hop
    // count.  ttl = 0 is legal but dead: nobody forwards it past the sink's
    // own transmission.  Run the simulator to quiescence afterwards.
    std::uint16_t flood_query(NodeId target, int ttl);

    // PacketHandler
    void on_deliver(NodeId to, NodeId from, const AnyPacket& packet) override;
    void on_rad_expiry(NodeId at, const QueryKey& key) override;

    // Forgets per-query duplicate-suppression state between phases.
    void reset_query_state();

    const std::map<std::uint16_t, SinkState::Outstanding>& outstanding() const {
        return outstanding_;
    }
    const std::vector<SinkState::QueryResult>& completed() const { return completed_; }
    std::size_t processed_count(const QueryKey& key) const;

private:
    void handle_flood_query(NodeId at, const FloodQueryPacket& pkt);
    void handle_flood_reply(NodeId at, const FloodReplyPacket& pkt);

    Simulator* sim_;
    Config config_;
    NodeId sink_id_ = 0;
    std::vector<std::set<QueryKey>> processed_;  // per node
    std::map<std::uint16_t, SinkState::Outstanding> outstanding_;
    std::vector<SinkState::QueryResult> completed_;
    std::map<std::uint16_t, int> hit_hops_;  // seq -> hop count on arrival at target
    std::uint16_t next_seq_ = 0;
};

}  // namespace lbf
