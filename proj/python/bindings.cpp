// Python bindings for the simulator: topology generation, the packet codec,
// level building, and the experiment driver.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lbf/baseline.hpp"
#include "lbf/engine.hpp"
#include "lbf/experiment.hpp"
#include "lbf/protocol.hpp"
#include "lbf/topology.hpp"
#include "lbf/wire.hpp"

namespace py = pybind11;
using namespace lbf;

namespace {

py::dict packet_to_dict(const wire::WirePacket& packet) {
    py::dict d;
    std::visit(
        [&d](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LevelBuildingPacket>) {
                d["kind"] = "level_building";
                d["level"] = p.level;
                d["source"] = p.source;
                d["seq"] = p.seq;
            } else if constexpr (std::is_same_v<T, LevelBackPacket>) {
                d["kind"] = "level_back";
                d["ttl"] = p.ttl;
                d["level"] = p.level;
                d["seq"] = p.seq;
                d["target"] = p.target;
                d["source"] = p.source;
            } else if constexpr (std::is_same_v<T, QueryPacket>) {
                d["kind"] = "query";
                d["hop_count"] = p.hop_count;
                d["ttl"] = p.ttl;
                d["seq"] = p.seq;
                d["target"] = p.target;
                d["source"] = p.source;
            } else {
                d["kind"] = "data_back";
                d["ttl"] = p.ttl;
                d["seq"] = p.seq;
                d["target"] = p.target;
                d["source"] = p.source;
                d["data"] = py::bytes(reinterpret_cast<const char*>(p.data.data()), p.data.size());
            }
        },
        packet);
    return d;
}

wire::WirePacket packet_from_dict(const py::dict& d) {
    const std::string kind = d["kind"].cast<std::string>();
    if (kind == "level_building") {
        LevelBuildingPacket p;
        p.level = d["level"].cast<std::uint8_t>();
        p.source = d["source"].cast<NodeId>();
        p.seq = d["seq"].cast<std::uint16_t>();
        return p;
    }
    if (kind == "level_back") {
        LevelBackPacket p;
        p.ttl = d["ttl"].cast<std::uint8_t>();
        p.level = d["level"].cast<std::uint8_t>();
        p.seq = d["seq"].cast<std::uint16_t>();
        p.target = d["target"].cast<NodeId>();
        p.source = d["source"].cast<NodeId>();
        return p;
    }
    if (kind == "query") {
        QueryPacket p;
        p.hop_count = d["hop_count"].cast<std::uint8_t>();
        p.ttl = d["ttl"].cast<std::uint8_t>();
        p.seq = d["seq"].cast<std::uint16_t>();
        p.target = d["target"].cast<NodeId>();
        p.source = d["source"].cast<NodeId>();
        return p;
    }
    if (kind == "data_back") {
        DataBackPacket p;
        p.ttl = d["ttl"].cast<std::uint8_t>();
        p.seq = d["seq"].cast<std::uint16_t>();
        p.target = d["target"].cast<NodeId>();
        p.source = d["source"].cast<NodeId>();
        const std::string data = d["data"].cast<std::string>();
        p.data.assign(data.begin(), data.end());
        return p;
    }
    throw std::invalid_argument("unknown packet kind '" + kind + "'");
}

py::dict cell_to_dict(const CellResult& cell) {
    py::dict d;
    d["scenario"] = cell.scenario;
    d["protocol"] = cell.protocol;
    d["P"] = cell.p;
    d["topo_seed"] = cell.seeds.topo_seed;
    d["proto_seed"] = cell.seeds.proto_seed;
    d["avg_cost"] = cell.report.average_cost;
    d["avg_energy"] = cell.report.average_energy_cost;
    d["avg_latency"] = cell.report.average_latency;
    d["suc_ratio"] = cell.report.suc_ratio;
    d["convergence_rate"] = cell.report.convergence_rate;
    d["ec_level_building"] = cell.report.ec_level_building;
    d["sr"] = cell.report.sr ? py::cast(*cell.report.sr) : py::cast(nullptr);
    d["ec"] = cell.report.ec;
    d["re"] = cell.report.re;
    d["max_level"] = cell.max_level;
    d["avg_level"] = cell.avg_level;
    d["reply_failures"] = cell.reply_failures;
    d["unknown_level_fallbacks"] = cell.unknown_level_fallbacks;
    return d;
}

void spec_set_seeds(ExperimentSpec& spec, const std::vector<std::pair<std::uint64_t, std::uint64_t>>& seeds) {
    spec.seeds.clear();
    for (auto [t, p] : seeds) spec.seeds.push_back({t, p});
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> spec_get_seeds(const ExperimentSpec& spec) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (auto s : spec.seeds) out.emplace_back(s.topo_seed, s.proto_seed);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Level-based flooding search simulator";
    m.attr("__version__") = "0.1.0";
    m.attr("NO_TARGET") = kNoTarget;

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init([](std::uint32_t node_count, double side, double comm_radius) {
                 return ScenarioConfig{node_count, side, comm_radius};
             }),
             py::arg("node_count"), py::arg("side"), py::arg("comm_radius") = 110.0)
        .def_readwrite("node_count", &ScenarioConfig::node_count)
        .def_readwrite("side", &ScenarioConfig::side)
        .def_readwrite("comm_radius", &ScenarioConfig::comm_radius);

    m.def("scenario_preset", &scenario_preset, py::arg("scenario"));
    m.def("default_threshold_p", &default_threshold_p, py::arg("scenario"));

    py::class_<Topology>(m, "Topology")
        .def_property_readonly("node_count", [](const Topology& t) { return t.node_count(); })
        .def("degree", [](const Topology& t, NodeId id) { return t.degree(id); }, py::arg("node"))
        .def("neighbors", [](const Topology& t, NodeId id) { return t.neighbors[id]; },
             py::arg("node"))
        .def("position",
             [](const Topology& t, NodeId id) {
                 return std::make_pair(t.positions[id].x, t.positions[id].y);
             },
             py::arg("node"));

    m.def("generate_topology", &generate_topology, py::arg("config"), py::arg("topology_seed"));
    m.def("hop_distance_oracle", &hop_distance_oracle, py::arg("topology"));
    m.def("average_degree", &average_degree, py::arg("topology"));
    m.def("expected_average_degree", &expected_average_degree, py::arg("config"));
    m.def("is_connected", &is_connected, py::arg("topology"));

    m.def(
        "encode",
        [](const py::dict& packet) {
            const auto bytes = wire::encode(packet_from_dict(packet));
            return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        },
        py::arg("packet"), "Encode a packet dict to its wire bytes.");
    m.def(
        "decode",
        [](const py::bytes& raw) {
            const std::string buf = raw;
            const auto result = wire::decode(
                std::span(reinterpret_cast<const std::uint8_t*>(buf.data()), buf.size()));
            if (wire::is_error(result))
                throw py::value_error(wire::to_string(std::get<wire::DecodeError>(result)));
            return packet_to_dict(std::get<wire::WirePacket>(result));
        },
        py::arg("data"), "Decode wire bytes to a packet dict; raises ValueError on bad input.");

    m.def(
        "level_building_levels",
        [](const ScenarioConfig& config, std::uint64_t topo_seed, std::uint64_t proto_seed) {
            const Topology topo = generate_topology(config, topo_seed);
            Simulator sim(topo, TimingConfig{1.0, 0.1, 0.5, proto_seed});
            LbfProtocol proto(sim, LbfProtocol::Config{});
            proto.start_level_building();
            sim.run_to_quiescence();
            std::vector<int> levels(topo.node_count());
            for (std::size_t i = 0; i < levels.size(); ++i) {
                const int l = proto.level_of(static_cast<NodeId>(i));
                levels[i] = l == kSentinelLevel ? -1 : l;
            }
            return levels;
        },
        py::arg("config"), py::arg("topology_seed"), py::arg("protocol_seed"),
        "Run the level-building phase; returns per-node levels (-1 = unreached).");

    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("scenario", &ExperimentSpec::scenario)
        .def_readwrite("custom_config", &ExperimentSpec::custom_config)
        .def_readwrite("protocol", &ExperimentSpec::protocol)
        .def_readwrite("p_values", &ExperimentSpec::p_values)
        .def_property("seeds", &spec_get_seeds, &spec_set_seeds)
        .def_readwrite("targets", &ExperimentSpec::targets)
        .def_readwrite("hop_delay", &ExperimentSpec::hop_delay)
        .def_readwrite("jitter_max", &ExperimentSpec::jitter_max)
        .def_readwrite("rad_t_max", &ExperimentSpec::rad_t_max)
        .def_readwrite("payload_bytes", &ExperimentSpec::payload_bytes)
        .def_readwrite("broadcast_batch", &ExperimentSpec::broadcast_batch)
        .def_readwrite("include_failed_in_cost", &ExperimentSpec::include_failed_in_cost)
        .def_readwrite("allow_large", &ExperimentSpec::allow_large);

    m.def(
        "run_experiment",
        [](const ExperimentSpec& spec) {
            py::list rows;
            for (const auto& cell : run_experiment(spec)) rows.append(cell_to_dict(cell));
            return rows;
        },
        py::arg("spec"), "Run the grid; returns one dict per CSV row.");
    m.def(
        "run_experiment_csv",
        [](const ExperimentSpec& spec) { return to_csv(run_experiment(spec)); }, py::arg("spec"),
        "Run the grid; returns the CSV text.");
    m.def(
        "compare",
        [](const ExperimentSpec& a, const ExperimentSpec& b) {
            const CompareSummary summary = compare(a, b);
            py::list rows;
            for (const auto& row : summary.rows) {
                py::dict d;
                d["topo_seed"] = row.seeds.topo_seed;
                d["proto_seed"] = row.seeds.proto_seed;
                d["cost_ratio"] = row.cost_ratio;
                d["energy_ratio"] = row.energy_ratio;
                d["latency_ratio"] = row.latency_ratio;
                d["suc_ratio_ratio"] = row.suc_ratio_ratio;
                rows.append(d);
            }
            py::dict out;
            out["rows"] = rows;
            out["mean_cost_ratio"] = summary.mean_cost_ratio;
            out["mean_energy_ratio"] = summary.mean_energy_ratio;
            out["mean_latency_ratio"] = summary.mean_latency_ratio;
            out["mean_suc_ratio_ratio"] = summary.mean_suc_ratio_ratio;
            return out;
        },
        py::arg("spec_a"), py::arg("spec_b"), "Paired per-seed metric ratios A/B.");
    m.def("csv_header", &csv_header);
}
