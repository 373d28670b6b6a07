#include "lbf/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "lbf/rng.hpp"

namespace lbf {

ScenarioConfig scenario_preset(int scenario) {
    switch (scenario) {
        case 1: return {50, 250.0, 110.0};
        case 2: return {125, 500.0, 110.0};
        case 3: return {250, 1000.0, 110.0};
        case 4: return {1000, 2000.0, 110.0};
        case 5: return {4000, 4000.0, 110.0};
    }
    throw std::invalid_argument("scenario must be 1..5");
}

Topology generate_topology(const ScenarioConfig& config, std::uint64_t topology_seed) {
    if (config.node_count == 0) throw std::invalid_argument("node_count must be >= 1");
    if (config.node_count > kNoTarget)  // id 0xFFFF is reserved
        throw std::invalid_argument("node_count exceeds the 16-bit id space");
    if (!(config.side > 0.0)) throw std::invalid_argument("side must be positive");
    if (!(config.comm_radius > 0.0)) throw std::invalid_argument("comm_radius must be positive");

    Topology topo;
    topo.config = config;
    topo.sink = 0;

    const std::size_t n = config.node_count;
    topo.positions.resize(n);
    topo.positions[0] = {config.side / 2.0, config.side / 2.0};
    auto eng = rng::substream(topology_seed, "placement");
    for (std::size_t i = 1; i < n; ++i) {
        topo.positions[i].x = rng::uniform_real(eng, 0.0, config.side);
        topo.positions[i].y = rng::uniform_real(eng, 0.0, config.side);
    }

    topo.neighbors.assign(n, {});
    const double r2 = config.comm_radius * config.comm_radius;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = topo.positions[i].x - topo.positions[j].x;
            const double dy = topo.positions[i].y - topo.positions[j].y;
            if (dx * dx + dy * dy <= r2) {
                topo.neighbors[i].push_back(static_cast<NodeId>(j));
                topo.neighbors[j].push_back(static_cast<NodeId>(i));
            }
        }
    }
    // Each list k first collects back-links (ids < k, in ascending outer-loop
    // order) and then forward links (ids > k, ascending inner-loop order), so
    // adjacency lists come out sorted without an explicit sort.
    return topo;
}

Topology topology_from_positions(const std::vector<Point>& positions, double comm_radius) {
    if (positions.empty()) throw std::invalid_argument("need at least one position");
    if (positions.size() > kNoTarget)
        throw std::invalid_argument("node_count exceeds the 16-bit id space");
    if (!(comm_radius > 0.0)) throw std::invalid_argument("comm_radius must be positive");

    Topology topo;
    double extent = 0.0;
    for (const Point& p : positions) extent = std::max({extent, p.x, p.y});
    topo.config = {static_cast<std::uint32_t>(positions.size()), std::max(extent, 1.0),
                   comm_radius};
    topo.sink = 0;
    topo.positions = positions;
    topo.neighbors.assign(positions.size(), {});
    const double r2 = comm_radius * comm_radius;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        for (std::size_t j = i + 1; j < positions.size(); ++j) {
            const double dx = positions[i].x - positions[j].x;
            const double dy = positions[i].y - positions[j].y;
            if (dx * dx + dy * dy <= r2) {
                topo.neighbors[i].push_back(static_cast<NodeId>(j));
                topo.neighbors[j].push_back(static_cast<NodeId>(i));
            }
        }
    }
    return topo;
}

std::vector<int> hop_distance_oracle(const Topology& topo) {
    std::vector<int> dist(topo.node_count(), -1);
    std::queue<NodeId> frontier;
    dist[topo.sink] = 0;
    frontier.push(topo.sink);
    while (!frontier.empty()) {
        const NodeId u = frontier.front();
        frontier.pop();
        for (NodeId v : topo.neighbors[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                frontier.push(v);
            }
        }
    }
    return dist;
}

double average_degree(const Topology& topo) {
    std::size_t total = 0;
    for (const auto& adj : topo.neighbors) total += adj.size();
    return static_cast<double>(total) / static_cast<double>(topo.node_count());
}

bool is_connected(const Topology& topo) {
    for (int d : hop_distance_oracle(topo))
        if (d < 0) return false;
    return true;
}

double expected_average_degree(const ScenarioConfig& config) {
    const double r = config.comm_radius / config.side;
    if (r >= 1.0) {
        // Radius covers the whole square only when it exceeds the diagonal;
        // the closed form below is valid for r <= 1, which all presets satisfy.
        throw std::invalid_argument("expected_average_degree requires comm_radius <= side");
    }
    const double p = std::numbers::pi * r * r - (8.0 / 3.0) * r * r * r + 0.5 * r * r * r * r;
    return (config.node_count - 1) * p;
}

}  // namespace lbf
