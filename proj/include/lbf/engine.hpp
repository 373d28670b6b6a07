#pragma once

// Deterministic discrete-event core.
//
// The simulator owns a virtual clock and an event queue ordered by
// (fire_time, sequence_no); the sequence number makes simultaneous events
// fire in scheduling order, so a run is a pure function of topology, timing
// config and seed.  Protocols sit behind the PacketHandler interface and use
// broadcast / unicast / timers to schedule future work; the run ends when the
// queue drains (quiescence).

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "lbf/packets.hpp"
#include "lbf/rng.hpp"
#include "lbf/topology.hpp"

namespace lbf {

struct TimingConfig {
    double hop_delay = 1.0;    // link traversal time, virtual seconds
    double jitter_max = 0.1;   // per-delivery uniform extra in [0, jitter_max)
    double rad_t_max = 0.5;    // upper bound of the random assessment delay
    std::uint64_t protocol_seed = 0;
};

struct NodeCounters {
    std::uint64_t sent = 0;            // transmissions; a broadcast counts once
    std::uint64_t sent_broadcast = 0;  // the subset of sent that were broadcasts
    std::uint64_t received = 0;        // packets delivered to this node
};

// One line of the optional event log.
struct TraceEvent {
    enum class Type { Send, Deliver, RadExpiry, Action };
    Type type;
    double time = 0.0;
    NodeId node = 0;              // sender / receiver / timer owner
    NodeId peer = 0;              // deliver: sender; unicast send: destination
    bool broadcast = false;       // send only
    std::size_t recipients = 0;   // send only
    const AnyPacket* packet = nullptr;  // valid only during the callback
};

// Result of one run_to_quiescence call: cumulative per-node counters plus the
// clock value the run drained at.
struct RunRecord {
    std::vector<NodeCounters> counters;
    double final_clock = 0.0;
    std::uint64_t events_processed = 0;
};

// Implemented by protocols; invoked by the simulator as events fire.
class PacketHandler {
public:
    virtual ~PacketHandler() = default;
    virtual void on_deliver(NodeId to, NodeId from, const AnyPacket& packet) = 0;
    virtual void on_rad_expiry(NodeId at, const QueryKey& key) = 0;
};

class Simulator {
public:
    // Throws std::invalid_argument when the timing invariants fail
    // (negative values or rad_t_max >= hop_delay).
    Simulator(const Topology& topo, const TimingConfig& timing);

    void set_handler(PacketHandler* handler) { handler_ = handler; }

    double now() const { return clock_; }
    const Topology& topology() const { return *topo_; }
    const TimingConfig& timing() const { return timing_; }

    // One transmission reaching every listed neighbor; independent jitter per
    // recipient, drawn in list order.  Recipients must be neighbors of
    // `from` (throws std::logic_error otherwise).  An empty list still counts
    // as one transmission — the radio fires even if nobody useful listens.
    void broadcast(NodeId from, const AnyPacket& packet, const std::vector<NodeId>& recipients);

    // One transmission to a single neighbor.  Non-neighbor or self
    // destination throws std::logic_error.
    void unicast(NodeId from, NodeId to, const AnyPacket& packet);

    // Fire handler->on_rad_expiry(at, key) after `delay`.
    void schedule_rad_expiry(NodeId at, const QueryKey& key, double delay);

    // Fire an arbitrary protocol action after `delay`; used to seed phases
    // (start level building, issue queries) at chosen virtual times.
    void schedule_action(double delay, std::function<void()> action);

    // Drain the queue.  Throws std::runtime_error when the cumulative event
    // count crosses the budget — that means a protocol loop, not load.
    RunRecord run_to_quiescence();

    const NodeCounters& counters(NodeId id) const { return counters_[id]; }
    const std::vector<NodeCounters>& all_counters() const { return counters_; }
    std::uint64_t events_processed() const { return events_processed_; }

    void set_event_budget(std::uint64_t budget) { event_budget_ = budget; }
    void set_trace(std::function<void(const TraceEvent&)> sink) { trace_ = std::move(sink); }

private:
    struct Event {
        double fire_time = 0.0;
        std::uint64_t sequence_no = 0;
        // exactly one of the three is active, switched on `type`
        enum class Type { Deliver, RadExpiry, Action } type = Type::Deliver;
        NodeId to = 0;
        NodeId from = 0;
        AnyPacket packet;
        QueryKey key;
        std::function<void()> action;
    };
    struct EventLater {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
            return a.sequence_no > b.sequence_no;
        }
    };

    void require_neighbor(NodeId from, NodeId to) const;
    void push(Event ev);
    double jitter();

    const Topology* topo_;
    TimingConfig timing_;
    PacketHandler* handler_ = nullptr;
    std::priority_queue<Event, std::vector<Event>, EventLater> queue_;
    std::vector<NodeCounters> counters_;
    std::mt19937_64 jitter_rng_;
    double clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t events_processed_ = 0;
    std::uint64_t event_budget_ = 500'000'000;
    std::function<void(const TraceEvent&)> trace_;
};

}  // namespace lbf
