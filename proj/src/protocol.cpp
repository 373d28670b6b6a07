#include "lbf/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace lbf {
namespace {

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

// Members of `from` (sorted) that are not in `minus`.
std::vector<NodeId> set_difference(const std::vector<NodeId>& from, const std::set<NodeId>& minus) {
    std::vector<NodeId> out;
    out.reserve(from.size());
    for (NodeId id : from)
        if (!minus.contains(id)) out.push_back(id);
    return out;
}

}  // namespace

LbfProtocol::LbfProtocol(Simulator& sim, const Config& config)
    : sim_(&sim),
      config_(config),
      sink_id_(sim.topology().sink),
      rad_rng_(rng::substream(sim.timing().protocol_seed, "rad")),
      choice_rng_(rng::substream(sim.timing().protocol_seed, "choice")) {
    if (config.payload_bytes > 255)
        throw std::invalid_argument("payload_bytes exceeds the 8-bit wire length field");
    if (config.threshold_p < 0.0 || config.threshold_p > 1.0)
        throw std::invalid_argument("threshold_p must be within [0, 1]");
    nodes_.resize(sim.topology().node_count());
    for (std::size_t i = 0; i < nodes_.size(); ++i) nodes_[i].my_id = static_cast<NodeId>(i);
    nodes_[sink_id_].level = 0;
    sim.set_handler(this);
}

void LbfProtocol::start_level_building() {
    lbp_start_ = lbp_last_update_ = sim_->now();
    LevelBuildingPacket pkt;
    pkt.level = 0;
    pkt.source = sink_id_;
    pkt.seq = nodes_[sink_id_].next_seq++;
    sim_->broadcast(sink_id_, AnyPacket(pkt), sim_->topology().neighbors[sink_id_]);
}

std::uint16_t LbfProtocol::start_query(NodeId target) {
    if (target == sink_id_) throw std::invalid_argument("cannot query for the sink itself");
    const std::uint16_t seq = sink_.next_seq++;
    QueryPacket pkt;
    pkt.hop_count = 0;
    pkt.seq = seq;
    pkt.target = target;
    pkt.source = sink_id_;
    bool fallback = false;
    if (target == kNoTarget) {
        // Dissemination: reach everything the sink knows about.
        pkt.ttl = static_cast<std::uint8_t>(sink_.max_known_level);
    } else if (auto it = sink_.level_table.find(target); it != sink_.level_table.end()) {
        pkt.ttl = it->second;
    } else {
        // Never reported: flood to the deepest known ring rather than fail.
        pkt.ttl = static_cast<std::uint8_t>(sink_.max_known_level);
        fallback = true;
        ++unknown_level_fallbacks_;
    }
    if (target != kNoTarget) sink_.outstanding[seq] = {target, sim_->now(), fallback};
    // The sink never forwards its own flood, so pre-mark it processed.
    nodes_[sink_id_].processed_queries.insert(QueryKey{sink_id_, seq});
    sim_->broadcast(sink_id_, AnyPacket(pkt), sim_->topology().neighbors[sink_id_]);
    return seq;
}

void LbfProtocol::reset_query_state() {
    for (auto& n : nodes_) {
        n.processed_queries.clear();
        n.pending_rad.clear();
        n.heard_from.clear();
    }
    target_hit_hops_.clear();
}

int LbfProtocol::max_level() const {
    int deepest = 0;
    for (const auto& n : nodes_)
        if (n.level != kSentinelLevel) deepest = std::max(deepest, static_cast<int>(n.level));
    return deepest;
}

std::size_t LbfProtocol::processed_count(const QueryKey& key) const {
    std::size_t count = 0;
    for (const auto& n : nodes_)
        if (n.processed_queries.contains(key)) ++count;
    return count;
}

LbfProtocol::RadDecision LbfProtocol::decide(double p, double threshold_p) {
    if (p >= 1.0) return RadDecision::Drop;        // every neighbor already has it
    if (p >= threshold_p) return RadDecision::Unicast;  // mostly covered: one nudge outward
    return RadDecision::Broadcast;                 // mostly quiet: flood onward
}

void LbfProtocol::on_deliver(NodeId to, NodeId from, const AnyPacket& packet) {
    std::visit(overloaded{
                   [&](const LevelBuildingPacket& p) { handle_level_building(nodes_[to], p, from); },
                   [&](const LevelBackPacket& p) { handle_level_back(to, p); },
                   [&](const QueryPacket& p) { handle_query(nodes_[to], p, from); },
                   [&](const DataBackPacket& p) { handle_data_back(to, p); },
                   [&](const FloodQueryPacket&) -> void {
                       throw std::logic_error("flood query delivered to lbf protocol");
                   },
                   [&](const FloodReplyPacket&) -> void {
                       throw std::logic_error("flood reply delivered to lbf protocol");
                   },
               },
               packet);
}

void LbfProtocol::rebuild_partition(NodeState& n) {
    n.low_neighbors.clear();
    n.equal_neighbors.clear();
    n.high_neighbors.clear();
    for (const auto& [neighbor, level] : n.neighbor_levels) {
        if (level < n.level) n.low_neighbors.push_back(neighbor);
        else if (level == n.level) n.equal_neighbors.push_back(neighbor);
        else n.high_neighbors.push_back(neighbor);
    }
    // neighbor_levels is an ordered map, so the three vectors stay sorted.
}

void LbfProtocol::note_neighbor_level(NodeState& n, NodeId neighbor, std::uint8_t level) {
    auto [it, inserted] = n.neighbor_levels.try_emplace(neighbor, level);
    if (!inserted) {
        if (it->second == level) return;
        it->second = level;  // re-classify: the neighbor found a better level
    }
    rebuild_partition(n);
}

void LbfProtocol::handle_level_building(NodeState& n, const LevelBuildingPacket& pkt, NodeId from) {
    if (n.my_id == sink_id_) return;  // the sink's level is fixed at 0
    note_neighbor_level(n, from, pkt.level);
    const int candidate = std::min<int>(pkt.level + 1, kSentinelLevel);
    if (candidate >= n.level) return;  // no improvement

    n.level = static_cast<std::uint8_t>(candidate);
    lbp_last_update_ = sim_->now();
    rebuild_partition(n);

    // Report the new level toward the sink; ttl = level bounds the walk.
    LevelBackPacket report;
    report.ttl = n.level;
    report.level = n.level;
    report.seq = n.next_seq++;
    report.target = sink_id_;
    report.source = n.my_id;
    route_descending(n.my_id, AnyPacket(report));

    // Propagate the wave outward with this node's level.
    LevelBuildingPacket onward;
    onward.level = n.level;
    onward.source = n.my_id;
    onward.seq = n.next_seq++;
    sim_->broadcast(n.my_id, AnyPacket(onward), sim_->topology().neighbors[n.my_id]);
}

void LbfProtocol::handle_level_back(NodeId at, const LevelBackPacket& pkt) {
    if (at == sink_id_) {  // consume before any ttl logic
        auto [it, inserted] = sink_.level_table.try_emplace(pkt.source, pkt.level);
        if (!inserted && pkt.level < it->second) it->second = pkt.level;  // keep the minimum
        sink_.max_known_level = 0;
        for (const auto& [node, level] : sink_.level_table)
            sink_.max_known_level = std::max(sink_.max_known_level, static_cast<int>(level));
        return;
    }
    if (pkt.ttl == 0) {  // malformed: a relay should never see a spent report
        ++reply_failures_;
        return;
    }
    LevelBackPacket onward = pkt;
    onward.ttl -= 1;
    if (onward.ttl == 0) {
        ++reply_failures_;
        return;
    }
    route_descending(at, AnyPacket(onward));
}

void LbfProtocol::handle_query(NodeState& n, const QueryPacket& pkt, NodeId from) {
    if (n.my_id == sink_id_) return;  // echoes of the sink's own flood
    const QueryKey key{pkt.source, pkt.seq};
    const int hop = pkt.hop_count + 1;

    // The target answers before any drop rule can kill the packet: with
    // ttl = target level, the first arrival lands exactly when ttl expires.
    if (n.my_id == pkt.target) {
        if (n.processed_queries.insert(key).second) {
            target_hit_hops_[pkt.seq] = hop;
            QueryPacket hit = pkt;
            hit.hop_count = static_cast<std::uint8_t>(hop);
            send_data_back(n, hit);
        }
        return;
    }

    if (n.processed_queries.contains(key)) return;
    if (hop > n.level) return;   // flowing backward (or sideways past this ring)
    if (hop >= pkt.ttl) return;  // cannot travel further, and this is not the target

    if (auto it = n.pending_rad.find(key); it != n.pending_rad.end()) {
        // Duplicate during the assessment window: one more neighbor is known
        // to have processed the query.
        if (n.heard_from[key].insert(from).second) it->second.c += 1;
        return;
    }

    RadState rad;
    rad.q = static_cast<std::uint32_t>(sim_->topology().degree(n.my_id));
    rad.c = 1;  // the node it just heard from has processed the query
    n.heard_from[key].insert(from);
    rad.cached = pkt;
    rad.cached.hop_count = static_cast<std::uint8_t>(hop);
    const double delay = rng::uniform_real(rad_rng_, 0.0, sim_->timing().rad_t_max);
    rad.deadline = sim_->now() + delay;
    n.pending_rad.emplace(key, std::move(rad));
    sim_->schedule_rad_expiry(n.my_id, key, delay);
}

void LbfProtocol::on_rad_expiry(NodeId at, const QueryKey& key) {
    NodeState& n = nodes_[at];
    auto it = n.pending_rad.find(key);
    if (it == n.pending_rad.end()) throw std::logic_error("assessment expiry without pending state");
    const RadState rad = std::move(it->second);
    n.pending_rad.erase(it);
    n.processed_queries.insert(key);

    const auto& heard = n.heard_from[key];
    const double p = static_cast<double>(rad.c) / static_cast<double>(rad.q);
    switch (decide(p, config_.threshold_p)) {
        case RadDecision::Drop:
            break;
        case RadDecision::Unicast: {
            // One copy to a neighbor not yet known to have the query,
            // preferring outward progress.
            std::vector<NodeId> candidates = set_difference(n.high_neighbors, heard);
            if (candidates.empty()) candidates = set_difference(n.equal_neighbors, heard);
            if (!candidates.empty()) sim_->unicast(at, pick_uniform(candidates), AnyPacket(rad.cached));
            break;  // nobody left to tell: equivalent to p = 1
        }
        case RadDecision::Broadcast:
            // Outward only; lower rings have the query by construction.
            if (!n.high_neighbors.empty())
                sim_->broadcast(at, AnyPacket(rad.cached), n.high_neighbors);
            break;
    }
    n.heard_from.erase(key);
}

void LbfProtocol::send_data_back(NodeState& n, const QueryPacket& query) {
    DataBackPacket reply;
    reply.ttl = n.level;
    reply.seq = query.seq;
    reply.target = n.my_id;
    reply.source = query.source;
    reply.data.resize(config_.payload_bytes);
    for (std::size_t i = 0; i < reply.data.size(); ++i)
        reply.data[i] = static_cast<std::uint8_t>(i);
    route_descending(n.my_id, AnyPacket(reply));
}

void LbfProtocol::handle_data_back(NodeId at, const DataBackPacket& pkt) {
    if (at == sink_id_) {  // consume before any ttl logic
        auto it = sink_.outstanding.find(pkt.seq);
        if (it == sink_.outstanding.end()) return;  // already closed: idempotent
        SinkState::QueryResult result;
        result.target = it->second.target;
        result.seq = pkt.seq;
        result.hops = target_hit_hops_[pkt.seq];
        result.issue_time = it->second.issue_time;
        result.done_time = sim_->now();
        result.used_fallback = it->second.used_fallback;
        sink_.completed.push_back(result);
        sink_.outstanding.erase(it);
        return;
    }
    if (pkt.ttl == 0) {
        ++reply_failures_;
        return;
    }
    DataBackPacket onward = pkt;
    onward.ttl -= 1;
    if (onward.ttl == 0) {
        ++reply_failures_;
        return;
    }
    route_descending(at, AnyPacket(onward));
}

void LbfProtocol::route_descending(NodeId at, const AnyPacket& pkt) {
    const NodeState& n = nodes_[at];
    if (n.low_neighbors.empty()) {
        // Routing state not formed yet (or target isolated from the
        // gradient); the packet dies here and the failure is visible.
        ++reply_failures_;
        return;
    }
    sim_->unicast(at, pick_uniform(n.low_neighbors), pkt);
}

NodeId LbfProtocol::pick_uniform(const std::vector<NodeId>& from) {
    return from[rng::uniform_index(choice_rng_, from.size())];
}

}  // namespace lbf
