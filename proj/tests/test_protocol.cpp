#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lbf/engine.hpp"
#include "lbf/protocol.hpp"
#include "lbf/topology.hpp"

using namespace lbf;

namespace {

// 0 - 1 - 2 - 3, one hop apart.
Topology chain(int n) {
    std::vector<Point> pos;
    for (int i = 0; i < n; ++i) pos.push_back({100.0 * i, 0.0});
    return topology_from_positions(pos, 110.0);
}

TimingConfig no_jitter(std::uint64_t seed = 0) {
    TimingConfig t;
    t.jitter_max = 0.0;
    t.protocol_seed = seed;
    return t;
}

std::uint64_t total_sent(const Simulator& sim) {
    std::uint64_t s = 0;
    for (const auto& c : sim.all_counters()) s += c.sent;
    return s;
}

std::uint64_t total_received(const Simulator& sim) {
    std::uint64_t s = 0;
    for (const auto& c : sim.all_counters()) s += c.received;
    return s;
}

}  // namespace

TEST_CASE("level building on a chain: hop-count levels, full table, exact cost") {
    const auto topo = chain(4);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {});
    proto.start_level_building();
    sim.run_to_quiescence();

    CHECK(proto.level_of(0) == 0);
    CHECK(proto.level_of(1) == 1);
    CHECK(proto.level_of(2) == 2);
    CHECK(proto.level_of(3) == 3);
    CHECK(proto.max_level() == 3);

    // Node 1 sits between the sink and node 2.
    CHECK(proto.node(1).low_neighbors == std::vector<NodeId>{0});
    CHECK(proto.node(1).equal_neighbors.empty());
    CHECK(proto.node(1).high_neighbors == std::vector<NodeId>{2});

    // Every node reported its final level.
    const auto& table = proto.sink().level_table;
    REQUIRE(table.size() == 3);
    CHECK(table.at(1) == 1);
    CHECK(table.at(2) == 2);
    CHECK(table.at(3) == 3);
    CHECK(proto.sink().max_known_level == 3);

    // Without jitter the wave takes exactly one hop delay per ring.
    CHECK(proto.level_building_end() - proto.level_building_start() ==
          doctest::Approx(3.0));

    // Hand count: 4 announcements (1+2+2+1 deliveries) and three reports
    // walking 1, 2 and 3 hops (6 unicasts).
    CHECK(total_sent(sim) == 10);
    CHECK(total_received(sim) == 12);
    CHECK(proto.reply_failures() == 0);
}

TEST_CASE("levels match breadth-first hop distances on random fields") {
    for (const auto& [scenario, seeds] :
         {std::pair<int, int>{1, 10}, std::pair<int, int>{2, 3}}) {
        for (int seed = 1; seed <= seeds; ++seed) {
            const auto topo = generate_topology(scenario_preset(scenario), seed);
            TimingConfig timing;  // default jitter
            timing.protocol_seed = seed;
            Simulator sim(topo, timing);
            LbfProtocol proto(sim, {});
            proto.start_level_building();
            sim.run_to_quiescence();

            const auto oracle = hop_distance_oracle(topo);
            int deepest = 0;
            for (NodeId u = 0; u < topo.node_count(); ++u) {
                if (oracle[u] >= 0) {
                    REQUIRE(proto.level_of(u) == oracle[u]);
                    deepest = std::max(deepest, oracle[u]);
                } else {
                    REQUIRE(proto.level_of(u) == kSentinelLevel);
                }
            }
            CHECK(proto.max_level() == deepest);
            CHECK(proto.reply_failures() == 0);
        }
    }
}

TEST_CASE("heavy jitter does not change the converged levels") {
    for (int seed = 1; seed <= 5; ++seed) {
        const auto topo = generate_topology(scenario_preset(1), seed);
        TimingConfig timing;
        timing.jitter_max = 0.9;
        timing.protocol_seed = seed;
        Simulator sim(topo, timing);
        LbfProtocol proto(sim, {});
        proto.start_level_building();
        sim.run_to_quiescence();
        const auto oracle = hop_distance_oracle(topo);
        for (NodeId u = 0; u < topo.node_count(); ++u)
            if (oracle[u] >= 0) REQUIRE(proto.level_of(u) == oracle[u]);
    }
}

TEST_CASE("neighbor partitions agree with the oracle after level building") {
    const auto topo = generate_topology(scenario_preset(1), 3);
    TimingConfig timing;
    timing.protocol_seed = 3;
    Simulator sim(topo, timing);
    LbfProtocol proto(sim, {});
    proto.start_level_building();
    sim.run_to_quiescence();

    const auto oracle = hop_distance_oracle(topo);
    // The sink keeps no partition (it never forwards queries); every sensor
    // must have one that matches the oracle exactly.
    for (NodeId u = 1; u < topo.node_count(); ++u) {
        if (oracle[u] < 0) continue;
        const auto& n = proto.node(u);
        REQUIRE(n.neighbor_levels.size() == topo.degree(u));
        std::size_t low = 0, equal = 0, high = 0;
        for (NodeId v : topo.neighbors[u]) {
            if (oracle[v] < oracle[u]) {
                ++low;
                CHECK(std::binary_search(n.low_neighbors.begin(), n.low_neighbors.end(), v));
            } else if (oracle[v] == oracle[u]) {
                ++equal;
            } else {
                ++high;
            }
        }
        CHECK(n.low_neighbors.size() == low);
        CHECK(n.equal_neighbors.size() == equal);
        CHECK(n.high_neighbors.size() == high);
    }
}

TEST_CASE("a later, lower announcement supersedes the earlier level") {
    const auto topo = chain(4);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {});

    // Node 3 first hears level 2 from its neighbor, then the neighbor
    // improves to level 1 and re-announces.
    proto.on_deliver(3, 2, LevelBuildingPacket{.level = 2, .source = 2, .seq = 0});
    CHECK(proto.level_of(3) == 3);
    CHECK(proto.node(3).neighbor_levels.at(2) == 2);

    proto.on_deliver(3, 2, LevelBuildingPacket{.level = 1, .source = 2, .seq = 1});
    CHECK(proto.level_of(3) == 2);
    CHECK(proto.node(3).neighbor_levels.at(2) == 1);  // reclassified
    CHECK(proto.node(3).low_neighbors == std::vector<NodeId>{2});

    // An equal or higher announcement changes nothing.
    proto.on_deliver(3, 2, LevelBuildingPacket{.level = 5, .source = 2, .seq = 2});
    CHECK(proto.level_of(3) == 2);
}

TEST_CASE("the sink keeps the minimum reported level per node") {
    const auto topo = chain(4);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {});

    proto.on_deliver(0, 1, LevelBackPacket{.ttl = 3, .level = 3, .seq = 0, .target = 0,
                                           .source = 3});
    CHECK(proto.sink().level_table.at(3) == 3);
    CHECK(proto.sink().max_known_level == 3);

    proto.on_deliver(0, 1, LevelBackPacket{.ttl = 2, .level = 2, .seq = 1, .target = 0,
                                           .source = 3});
    CHECK(proto.sink().level_table.at(3) == 2);  // lower report wins
    CHECK(proto.sink().max_known_level == 2);

    proto.on_deliver(0, 1, LevelBackPacket{.ttl = 3, .level = 3, .seq = 2, .target = 0,
                                           .source = 3});
    CHECK(proto.sink().level_table.at(3) == 2);  // later higher report ignored

    proto.on_deliver(0, 1, LevelBackPacket{.ttl = 4, .level = 4, .seq = 0, .target = 0,
                                           .source = 5});
    CHECK(proto.sink().max_known_level == 4);
}

TEST_CASE("query flood dies at the target ring and the reply walks back down") {
    const auto topo = chain(4);

    SUBCASE("target at the deepest ring") {
        Simulator sim(topo, no_jitter());
        LbfProtocol proto(sim, {.threshold_p = 0.4, .payload_bytes = 8});
        proto.start_level_building();
        sim.run_to_quiescence();
        proto.reset_query_state();
        const auto before_sent = total_sent(sim);
        const auto before_recv = total_received(sim);

        const auto seq = proto.start_query(3);
        sim.run_to_quiescence();

        REQUIRE(proto.sink().completed.size() == 1);
        const auto& result = proto.sink().completed.back();
        CHECK(result.seq == seq);
        CHECK(result.target == 3);
        CHECK(result.hops == 3);  // equals the target's level
        CHECK_FALSE(result.used_fallback);
        CHECK(result.done_time > result.issue_time);
        CHECK(proto.sink().outstanding.empty());

        // Deterministic cost on the chain: query 0->1->2->3 (3 sends) and
        // reply 3->2->1->0 (3 sends), each delivered once.
        CHECK(total_sent(sim) - before_sent == 6);
        CHECK(total_received(sim) - before_recv == 6);
        CHECK(proto.reply_failures() == 0);
    }

    SUBCASE("target mid-chain: deeper nodes never hear the flood") {
        Simulator sim(topo, no_jitter());
        LbfProtocol proto(sim, {.threshold_p = 0.4, .payload_bytes = 8});
        proto.start_level_building();
        sim.run_to_quiescence();
        proto.reset_query_state();
        const auto before_sent = total_sent(sim);
        const auto node3_recv = sim.counters(3).received;

        proto.start_query(2);
        sim.run_to_quiescence();

        REQUIRE(proto.sink().completed.size() == 1);
        CHECK(proto.sink().completed.back().hops == 2);
        CHECK(total_sent(sim) - before_sent == 4);          // 0->1->2, 2->1->0
        CHECK(sim.counters(3).received == node3_recv);      // ring 3 stays silent
    }
}

TEST_CASE("forwarding decision from the duplicate ratio") {
    using D = LbfProtocol::RadDecision;
    CHECK(LbfProtocol::decide(1.0, 0.5) == D::Drop);
    CHECK(LbfProtocol::decide(1.5, 0.5) == D::Drop);
    CHECK(LbfProtocol::decide(2.0 / 3.0, 0.5) == D::Unicast);
    CHECK(LbfProtocol::decide(3.0 / 7.0, 0.5) == D::Broadcast);  // 0.43 under 0.5
    CHECK(LbfProtocol::decide(3.0 / 7.0, 0.4) == D::Unicast);    // 0.43 over 0.4
    CHECK(LbfProtocol::decide(0.4, 0.4) == D::Unicast);          // boundary is unicast
    CHECK(LbfProtocol::decide(0.0, 0.4) == D::Broadcast);
    // Threshold 1 never unicasts: everything below p=1 floods on.
    CHECK(LbfProtocol::decide(0.999, 1.0) == D::Broadcast);
    CHECK(LbfProtocol::decide(1.0, 1.0) == D::Drop);
}

TEST_CASE("each neighbor counts once during the assessment window") {
    const auto topo = chain(3);  // node 1 has neighbors {0, 2}
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {.threshold_p = 0.4, .payload_bytes = 8});
    const QueryKey key{.source = 0, .seq = 5};
    const QueryPacket q{.hop_count = 0, .ttl = 3, .seq = 5, .target = kNoTarget,
                        .source = 0};

    proto.on_deliver(1, 0, q);
    REQUIRE(proto.node(1).pending_rad.contains(key));
    CHECK(proto.node(1).pending_rad.at(key).c == 1);  // first sender counts
    CHECK(proto.node(1).pending_rad.at(key).q == 2);

    proto.on_deliver(1, 0, q);  // same neighbor again
    CHECK(proto.node(1).pending_rad.at(key).c == 1);

    proto.on_deliver(1, 2, q);  // a different neighbor
    CHECK(proto.node(1).pending_rad.at(key).c == 2);

    sim.run_to_quiescence();  // fires the assessment timer: p = 2/2 -> drop
    CHECK(proto.node(1).pending_rad.empty());
    CHECK(proto.node(1).processed_queries.contains(key));
    CHECK(proto.node(1).heard_from.empty());
    CHECK(sim.counters(1).sent == 0);
}

TEST_CASE("quiet neighborhoods rebroadcast outward only") {
    // Sink - node 1 - three level-2 satellites; nothing else in range.
    const auto topo = topology_from_positions(
        {{0, 0}, {100, 0}, {200, 0}, {100, 100}, {100, -100}}, 110.0);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {.threshold_p = 0.4, .payload_bytes = 8});
    proto.start_level_building();
    sim.run_to_quiescence();
    REQUIRE(proto.level_of(1) == 1);
    REQUIRE(proto.level_of(2) == 2);
    proto.reset_query_state();
    const auto sink_recv = sim.counters(0).received;
    const auto bcast_before = sim.counters(1).sent_broadcast;
    std::vector<std::uint64_t> sat_recv;
    for (NodeId sat : {NodeId(2), NodeId(3), NodeId(4)})
        sat_recv.push_back(sim.counters(sat).received);

    proto.start_query(kNoTarget);  // ttl = 2: reaches the satellites' ring
    sim.run_to_quiescence();

    // p = 1/4 under 0.4: node 1 rebroadcasts to its three higher neighbors
    // only; the sink hears nothing back.
    CHECK(sim.counters(1).sent_broadcast - bcast_before == 1);
    CHECK(sim.counters(0).received == sink_recv);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(sim.counters(static_cast<NodeId>(2 + i)).received - sat_recv[i] == 1);
    }
}

TEST_CASE("covered neighborhoods unicast to a neighbor that has not spoken") {
    // Sink(0) adjacent to 1, 2, 3; node 1 also adjacent to 2 and 3.
    // 2 and 3 are out of range of each other.
    const auto topo = topology_from_positions(
        {{0, 0}, {100, 0}, {50, 80}, {50, -80}}, 110.0);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {.threshold_p = 0.5, .payload_bytes = 8});
    proto.start_level_building();
    sim.run_to_quiescence();
    REQUIRE(proto.level_of(1) == 1);
    REQUIRE(proto.level_of(2) == 1);
    REQUIRE(proto.level_of(3) == 1);
    proto.reset_query_state();
    const auto recv2 = sim.counters(2).received;
    const auto recv3 = sim.counters(3).received;
    const auto sent1 = sim.counters(1).sent;
    const auto bcast1 = sim.counters(1).sent_broadcast;

    // Node 1 hears the query from the sink and from node 2 during its
    // assessment window: p = 2/3 over 0.5.  No higher neighbor exists, so the
    // unicast falls back to the one equal neighbor it has not heard from.
    const QueryPacket q{.hop_count = 0, .ttl = 3, .seq = 9, .target = kNoTarget,
                        .source = 0};
    proto.on_deliver(1, 0, q);
    proto.on_deliver(1, 2, q);
    sim.run_to_quiescence();

    CHECK(sim.counters(1).sent - sent1 == 1);
    CHECK(sim.counters(1).sent_broadcast == bcast1);
    CHECK(sim.counters(2).received == recv2);      // already heard from
    CHECK(sim.counters(3).received == recv3 + 1);  // the quiet one gets the copy
}

TEST_CASE("duplicate replies close the query only once") {
    const auto topo = chain(3);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {});
    proto.start_level_building();
    sim.run_to_quiescence();
    const auto seq = proto.start_query(2);
    sim.run_to_quiescence();
    REQUIRE(proto.sink().completed.size() == 1);

    // A stray duplicate of the same reply reaches the sink again.
    proto.on_deliver(0, 1, DataBackPacket{.ttl = 1, .seq = seq, .target = 2, .source = 0,
                                          .data = {}});
    CHECK(proto.sink().completed.size() == 1);
    CHECK(proto.sink().outstanding.empty());
}

TEST_CASE("reply routing without a gradient records a failure, not a crash") {
    const auto topo = chain(3);

    SUBCASE("target hit before level building") {
        Simulator sim(topo, no_jitter());
        LbfProtocol proto(sim, {});
        proto.on_deliver(2, 1, QueryPacket{.hop_count = 0, .ttl = 5, .seq = 0, .target = 2,
                                           .source = 0});
        CHECK(proto.reply_failures() == 1);
        CHECK(sim.counters(2).sent == 0);
    }

    SUBCASE("report relayed through an unleveled node") {
        Simulator sim(topo, no_jitter());
        LbfProtocol proto(sim, {});
        proto.on_deliver(1, 0, LevelBackPacket{.ttl = 3, .level = 3, .seq = 0, .target = 0,
                                               .source = 2});
        CHECK(proto.reply_failures() == 1);
    }

    SUBCASE("spent ttl counts as a failed reply") {
        Simulator sim(topo, no_jitter());
        LbfProtocol proto(sim, {});
        proto.on_deliver(1, 0, DataBackPacket{.ttl = 1, .seq = 0, .target = 2, .source = 0,
                                              .data = {}});
        CHECK(proto.reply_failures() == 1);
        proto.on_deliver(1, 0, DataBackPacket{.ttl = 0, .seq = 1, .target = 2, .source = 0,
                                              .data = {}});
        CHECK(proto.reply_failures() == 2);
    }
}

TEST_CASE("a target the sink never heard of falls back to the deepest ring") {
    // Node 2 is out of range of everyone.
    const auto topo = topology_from_positions({{0, 0}, {100, 0}, {500, 0}}, 110.0);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {});
    proto.start_level_building();
    sim.run_to_quiescence();
    REQUIRE(proto.sink().max_known_level == 1);
    proto.reset_query_state();

    proto.start_query(2);
    sim.run_to_quiescence();

    CHECK(proto.unknown_level_fallbacks() == 1);
    CHECK(proto.sink().completed.empty());          // nobody answered
    CHECK(proto.sink().outstanding.size() == 1);    // still open = failed query
    CHECK(proto.sink().outstanding.begin()->second.used_fallback);

    // Dissemination floods always use the deepest ring and are not fallbacks.
    proto.reset_query_state();
    proto.start_query(kNoTarget);
    sim.run_to_quiescence();
    CHECK(proto.unknown_level_fallbacks() == 1);
}

TEST_CASE("reset forgets query state but keeps the level field") {
    const auto topo = chain(3);
    Simulator sim(topo, no_jitter());
    LbfProtocol proto(sim, {});
    proto.start_level_building();
    sim.run_to_quiescence();
    proto.start_query(2);
    sim.run_to_quiescence();
    REQUIRE(!proto.node(1).processed_queries.empty());

    proto.reset_query_state();
    CHECK(proto.node(1).processed_queries.empty());
    CHECK(proto.node(1).pending_rad.empty());
    CHECK(proto.level_of(1) == 1);
    CHECK(proto.level_of(2) == 2);
    CHECK(proto.sink().level_table.size() == 2);
}

TEST_CASE("nodes forward a given query at most once") {
    const auto topo = generate_topology(scenario_preset(1), 8);
    TimingConfig timing;
    timing.protocol_seed = 8;
    Simulator sim(topo, timing);
    LbfProtocol proto(sim, {.threshold_p = 0.2, .payload_bytes = 8});
    proto.start_level_building();
    sim.run_to_quiescence();
    proto.reset_query_state();

    std::vector<std::uint64_t> broadcasts_before(topo.node_count());
    for (NodeId u = 0; u < topo.node_count(); ++u)
        broadcasts_before[u] = sim.counters(u).sent_broadcast;

    const auto seq = proto.start_query(kNoTarget);
    sim.run_to_quiescence();

    for (NodeId u = 0; u < topo.node_count(); ++u)
        CHECK(sim.counters(u).sent_broadcast - broadcasts_before[u] <= 1);
    CHECK(proto.processed_count(QueryKey{0, seq}) <= topo.node_count());
}

TEST_CASE("configuration limits are enforced") {
    const auto topo = chain(3);
    Simulator sim(topo, no_jitter());
    CHECK_THROWS_AS(LbfProtocol(sim, {.threshold_p = 1.5, .payload_bytes = 8}),
                    std::invalid_argument);
    CHECK_THROWS_AS(LbfProtocol(sim, {.threshold_p = -0.1, .payload_bytes = 8}),
                    std::invalid_argument);
    CHECK_THROWS_AS(LbfProtocol(sim, {.threshold_p = 0.4, .payload_bytes = 256}),
                    std::invalid_argument);
    LbfProtocol proto(sim, {});
    CHECK_THROWS_AS(proto.start_query(0), std::invalid_argument);  // the sink itself
    CHECK_THROWS_AS(proto.on_deliver(1, 0, FloodQueryPacket{}), std::logic_error);
}
