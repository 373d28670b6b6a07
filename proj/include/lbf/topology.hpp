#pragma once

// Random geometric topologies for the simulations.
//
// A scenario is a square field with one sink and uniformly placed sensors;
// two nodes are linked when their distance is at most the communication
// radius (unit-disk model).  Placement is a pure function of the scenario and
// a seed, so a topology can be reproduced from (scenario, seed) alone.

#include <cstdint>
#include <vector>

#include "lbf/packets.hpp"

namespace lbf {

struct ScenarioConfig {
    std::uint32_t node_count = 0;  // sensors plus the sink
    double side = 0.0;             // field edge length, metres
    double comm_radius = 110.0;    // link range, metres
};

// The five standard field sizes used by the experiments, 1-based.
ScenarioConfig scenario_preset(int scenario);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Topology {
    ScenarioConfig config;
    std::vector<Point> positions;              // indexed by node id
    std::vector<std::vector<NodeId>> neighbors;  // sorted ascending, symmetric
    NodeId sink = 0;

    std::size_t node_count() const { return positions.size(); }
    std::size_t degree(NodeId id) const { return neighbors[id].size(); }
};

// Node 0 is the sink at the exact field centre; sensors 1..n-1 get i.i.d.
// uniform positions (x then y, in id order).  Throws std::invalid_argument on
// a degenerate config (no nodes, non-positive field or radius, or more nodes
// than the 16-bit id space holds).
Topology generate_topology(const ScenarioConfig& config, std::uint64_t topology_seed);

// Topology over explicit coordinates (node 0 the sink); used for hand-built
// fixtures where the adjacency must be known exactly.
Topology topology_from_positions(const std::vector<Point>& positions, double comm_radius);

// Hop distance from the sink to every node via breadth-first search;
// -1 for unreachable nodes.  This is the reference the protocol's level
// field is checked against.
std::vector<int> hop_distance_oracle(const Topology& topo);

// Mean neighbour count over all nodes.
double average_degree(const Topology& topo);

// True when every node is reachable from the sink.
bool is_connected(const Topology& topo);

// Expected mean degree if all n nodes were placed i.i.d. uniformly: (n-1)
// times the probability that two uniform points in the square lie within the
// radius.  For r = comm_radius/side <= 1 that probability has the closed form
// pi r^2 - (8/3) r^3 + r^4 / 2.  The pinned-centre sink makes the true value
// differ only at the 1/n scale.
double expected_average_degree(const ScenarioConfig& config);

}  // namespace lbf
