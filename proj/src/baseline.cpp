#include "lbf/baseline.hpp"

#include <stdexcept>

namespace lbf {

FloodProtocol::FloodProtocol(Simulator& sim, const Config& config)
    : sim_(&sim), config_(config), sink_id_(sim.topology().sink) {
    processed_.resize(sim.topology().node_count());
    sim.set_handler(this);
}

std::uint16_t FloodProtocol::flood_query(NodeId target, int ttl) {
    // ttl = 0 is a dead flood: the sink's own broadcast still happens, but
    // no receiver forwards it.
    if (ttl < 0) throw std::invalid_argument("flood ttl must be >= 0");
    if (target == sink_id_) throw std::invalid_argument("cannot query for the sink itself");
    const std::uint16_t seq = next_seq_++;
    FloodQueryPacket pkt;
    pkt.hop_count = 0;
    pkt.ttl = ttl;
    pkt.seq = seq;
    pkt.target = target;
    pkt.source = sink_id_;
    // Echo copies from rebroadcasting neighbors must not re-trigger the sink.
    processed_[sink_id_].insert(QueryKey{sink_id_, seq});
    if (target != kNoTarget) outstanding_[seq] = {target, sim_->now(), false};
    sim_->broadcast(sink_id_, AnyPacket(pkt), sim_->topology().neighbors[sink_id_]);
    return seq;
}

void FloodProtocol::reset_query_state() {
    for (auto& set : processed_) set.clear();
}

std::size_t FloodProtocol::processed_count(const QueryKey& key) const {
    std::size_t count = 0;
    for (const auto& set : processed_)
        if (set.contains(key)) ++count;
    return count;
}

void FloodProtocol::on_deliver(NodeId to, NodeId /*from*/, const AnyPacket& packet) {
    if (const auto* query = std::get_if<FloodQueryPacket>(&packet)) {
        handle_flood_query(to, *query);
    } else if (const auto* reply = std::get_if<FloodReplyPacket>(&packet)) {
        handle_flood_reply(to, *reply);
    } else {
        throw std::logic_error("level-based packet delivered to flood protocol");
    }
}

void FloodProtocol::on_rad_expiry(NodeId /*at*/, const QueryKey& /*key*/) {
    throw std::logic_error("flood protocol has no assessment timers");
}

void FloodProtocol::handle_flood_query(NodeId at, const FloodQueryPacket& pkt) {
    const QueryKey key{pkt.source, pkt.seq};
    if (!processed_[at].insert(key).second) return;  // rebroadcast at most once

    FloodQueryPacket mine = pkt;
    mine.hop_count += 1;
    mine.path.push_back(at);  // keeps path length = hop_count

    if (at == pkt.target) {
        hit_hops_[pkt.seq] = mine.hop_count;
        // Source-route the answer back: visit the recorded relays in reverse
        // (skipping this node itself), then the sink.
        FloodReplyPacket reply;
        reply.seq = pkt.seq;
        reply.target = at;
        reply.ret_path.assign(mine.path.rbegin() + 1, mine.path.rend());
        reply.ret_path.push_back(pkt.source);
        reply.data.resize(config_.payload_bytes);
        for (std::size_t i = 0; i < reply.data.size(); ++i)
            reply.data[i] = static_cast<std::uint8_t>(i);
        FloodReplyPacket onward = reply;
        const NodeId next = onward.ret_path.front();
        onward.ret_path.erase(onward.ret_path.begin());
        sim_->unicast(at, next, AnyPacket(onward));
        return;
    }
    if (pkt.hop_count < pkt.ttl)
        sim_->broadcast(at, AnyPacket(mine), sim_->topology().neighbors[at]);
}

void FloodProtocol::handle_flood_reply(NodeId at, const FloodReplyPacket& pkt) {
    if (pkt.ret_path.empty()) {
        if (at != sink_id_) throw std::logic_error("flood reply exhausted its path off-sink");
        auto it = outstanding_.find(pkt.seq);
        if (it == outstanding_.end()) return;  // duplicate close: idempotent
        SinkState::QueryResult result;
        result.target = it->second.target;
        result.seq = pkt.seq;
        result.hops = hit_hops_.at(pkt.seq);
        result.issue_time = it->second.issue_time;
        result.done_time = sim_->now();
        result.used_fallback = false;
        completed_.push_back(result);
        outstanding_.erase(it);
        return;
    }
    FloodReplyPacket onward = pkt;
    const NodeId next = onward.ret_path.front();
    onward.ret_path.erase(onward.ret_path.begin());
    sim_->unicast(at, next, AnyPacket(onward));
}

}  // namespace lbf
