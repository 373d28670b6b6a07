#include "lbf/engine.hpp"

#include <algorithm>
#include <string>

namespace lbf {

Simulator::Simulator(const Topology& topo, const TimingConfig& timing)
    : topo_(&topo), timing_(timing), jitter_rng_(rng::substream(timing.protocol_seed, "jitter")) {
    if (timing.hop_delay < 0.0 || timing.jitter_max < 0.0 || timing.rad_t_max < 0.0)
        throw std::invalid_argument("timing values must be nonnegative");
    if (!(timing.rad_t_max < timing.hop_delay))
        throw std::invalid_argument("rad_t_max must be smaller than hop_delay");
    counters_.assign(topo.node_count(), {});
}

void Simulator::require_neighbor(NodeId from, NodeId to) const {
    const auto& adj = topo_->neighbors[from];
    if (!std::binary_search(adj.begin(), adj.end(), to))
        throw std::logic_error("delivery to non-neighbor: " + std::to_string(from) + " -> " +
                               std::to_string(to));
}

void Simulator::push(Event ev) {
    ev.sequence_no = next_seq_++;
    queue_.push(std::move(ev));
}

double Simulator::jitter() {
    if (timing_.jitter_max == 0.0) return 0.0;
    return rng::uniform_real(jitter_rng_, 0.0, timing_.jitter_max);
}

void Simulator::broadcast(NodeId from, const AnyPacket& packet, const std::vector<NodeId>& recipients) {
    for (NodeId to : recipients) require_neighbor(from, to);
    counters_[from].sent += 1;
    counters_[from].sent_broadcast += 1;
    if (trace_)
        trace_({TraceEvent::Type::Send, clock_, from, from, true, recipients.size(), &packet});
    for (NodeId to : recipients) {
        Event ev;
        ev.fire_time = clock_ + timing_.hop_delay + jitter();
        ev.type = Event::Type::Deliver;
        ev.to = to;
        ev.from = from;
        ev.packet = packet;
        push(std::move(ev));
    }
}

void Simulator::unicast(NodeId from, NodeId to, const AnyPacket& packet) {
    require_neighbor(from, to);
    counters_[from].sent += 1;
    if (trace_) trace_({TraceEvent::Type::Send, clock_, from, to, false, 1, &packet});
    Event ev;
    ev.fire_time = clock_ + timing_.hop_delay + jitter();
    ev.type = Event::Type::Deliver;
    ev.to = to;
    ev.from = from;
    ev.packet = packet;
    push(std::move(ev));
}

void Simulator::schedule_rad_expiry(NodeId at, const QueryKey& key, double delay) {
    if (delay < 0.0) throw std::logic_error("negative timer delay");
    Event ev;
    ev.fire_time = clock_ + delay;
    ev.type = Event::Type::RadExpiry;
    ev.to = at;
    ev.key = key;
    push(std::move(ev));
}

void Simulator::schedule_action(double delay, std::function<void()> action) {
    if (delay < 0.0) throw std::logic_error("negative action delay");
    Event ev;
    ev.fire_time = clock_ + delay;
    ev.type = Event::Type::Action;
    ev.action = std::move(action);
    push(std::move(ev));
}

RunRecord Simulator::run_to_quiescence() {
    while (!queue_.empty()) {
        if (events_processed_ >= event_budget_)
            throw std::runtime_error("event budget exceeded after " +
                                     std::to_string(events_processed_) +
                                     " events; protocol appears to loop");
        // priority_queue::top is const; the event is copied out so handlers
        // may schedule freely while we dispatch it.
        Event ev = queue_.top();
        queue_.pop();
        clock_ = ev.fire_time;
        ++events_processed_;
        switch (ev.type) {
            case Event::Type::Deliver:
                counters_[ev.to].received += 1;
                if (trace_)
                    trace_({TraceEvent::Type::Deliver, clock_, ev.to, ev.from, false, 0, &ev.packet});
                if (handler_) handler_->on_deliver(ev.to, ev.from, ev.packet);
                break;
            case Event::Type::RadExpiry:
                if (trace_)
                    trace_({TraceEvent::Type::RadExpiry, clock_, ev.to, ev.to, false, 0, nullptr});
                if (handler_) handler_->on_rad_expiry(ev.to, ev.key);
                break;
            case Event::Type::Action:
                if (trace_)
                    trace_({TraceEvent::Type::Action, clock_, 0, 0, false, 0, nullptr});
                if (ev.action) ev.action();
                break;
        }
    }
    return {counters_, clock_, events_processed_};
}

}  // namespace lbf
