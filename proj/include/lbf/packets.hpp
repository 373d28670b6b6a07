#pragma once

// In-memory packet types exchanged by the protocols.
//
// The first four have a stable on-the-wire form (see wire.hpp).  The flood
// packets are simulator-internal: the baseline carries a full relay path,
// which has no compact fixed layout, so it is never serialized.

#include <cstdint>
#include <variant>
#include <vector>

namespace lbf {

using NodeId = std::uint16_t;

// Target id used by dissemination-only queries: every node relays, nobody
// answers.  Valid node ids are then restricted to [0, 0xFFFF).
inline constexpr NodeId kNoTarget = 0xFFFF;

// Level announcement flooded outward from the sink while the level field is
// being built.  `level` is the sender's own level.
struct LevelBuildingPacket {
    std::uint8_t level = 0;
    NodeId source = 0;      // node that sent this copy
    std::uint16_t seq = 0;  // sender-local sequence number

    bool operator==(const LevelBuildingPacket&) const = default;
};

// Level report routed back to the sink after a node settles on a level.
struct LevelBackPacket {
    std::uint8_t ttl = 0;    // hops remaining; starts at the reporter's level
    std::uint8_t level = 0;  // level being reported
    std::uint16_t seq = 0;
    NodeId target = 0;  // the sink
    NodeId source = 0;  // node whose level is being reported

    bool operator==(const LevelBackPacket&) const = default;
};

// Search query flooded level-by-level away from the sink.
struct QueryPacket {
    std::uint8_t hop_count = 0;  // hops travelled so far
    std::uint8_t ttl = 0;        // level of the target; caps propagation depth
    std::uint16_t seq = 0;       // query id, unique per source
    NodeId target = 0;           // node being searched for, or kNoTarget
    NodeId source = 0;           // originating sink; constant across hops

    bool operator==(const QueryPacket&) const = default;
};

// Identifies one query flood: the originator plus its sequence number.
struct QueryKey {
    NodeId source = 0;
    std::uint16_t seq = 0;

    bool operator==(const QueryKey&) const = default;
    auto operator<=>(const QueryKey&) const = default;
};

// Answer unicast back down the level gradient from the target to the sink.
struct DataBackPacket {
    std::uint8_t ttl = 0;  // hops remaining; starts at the target's level
    std::uint16_t seq = 0;
    NodeId target = 0;  // node that produced the data
    NodeId source = 0;  // the sink
    std::vector<std::uint8_t> data;

    bool operator==(const DataBackPacket&) const = default;
};

// Baseline blind-flooding query.  Records the relay path so the target can
// source-route its reply.  Simulator-internal (no wire form), so the hop
// fields are plain ints: recorded paths can outgrow an 8-bit counter.
struct FloodQueryPacket {
    int hop_count = 0;
    int ttl = 0;
    std::uint16_t seq = 0;
    NodeId target = 0;
    NodeId source = 0;         // originating sink
    std::vector<NodeId> path;  // relays visited so far, oldest first

    bool operator==(const FloodQueryPacket&) const = default;
};

// Baseline reply, unicast hop-by-hop along the reversed relay path.
struct FloodReplyPacket {
    std::uint16_t seq = 0;
    NodeId target = 0;              // node that was found
    std::vector<NodeId> ret_path;   // remaining hops to visit, sink last
    std::vector<std::uint8_t> data;

    bool operator==(const FloodReplyPacket&) const = default;
};

// Everything the event engine can deliver.
using AnyPacket = std::variant<LevelBuildingPacket, LevelBackPacket, QueryPacket,
                               DataBackPacket, FloodQueryPacket, FloodReplyPacket>;

}  // namespace lbf
