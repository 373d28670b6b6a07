#include "lbf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lbf/baseline.hpp"
#include "lbf/engine.hpp"
#include "lbf/protocol.hpp"

namespace lbf {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shortest round-trippable rendering; used for every double in CSV and trace
// output so reruns are byte-identical.
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

const char* packet_kind_name(const AnyPacket& packet) {
    return std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LevelBuildingPacket>) return "level_building";
            else if constexpr (std::is_same_v<T, LevelBackPacket>) return "level_back";
            else if constexpr (std::is_same_v<T, QueryPacket>) return "query";
            else if constexpr (std::is_same_v<T, DataBackPacket>) return "data_back";
            else if constexpr (std::is_same_v<T, FloodQueryPacket>) return "flood_query";
            else return "flood_reply";
        },
        packet);
}

void print_trace_line(std::ostream& os, const TraceEvent& ev) {
    switch (ev.type) {
        case TraceEvent::Type::Send:
            os << "t=" << fmt(ev.time) << " SEND from=" << ev.node;
            if (ev.broadcast) os << " bcast recipients=" << ev.recipients;
            else os << " to=" << ev.peer;
            os << " kind=" << packet_kind_name(*ev.packet) << "\n";
            break;
        case TraceEvent::Type::Deliver:
            os << "t=" << fmt(ev.time) << " DELIVER to=" << ev.node << " from=" << ev.peer
               << " kind=" << packet_kind_name(*ev.packet) << "\n";
            break;
        case TraceEvent::Type::RadExpiry:
            os << "t=" << fmt(ev.time) << " RAD_EXPIRY at=" << ev.node << "\n";
            break;
        case TraceEvent::Type::Action:
            os << "t=" << fmt(ev.time) << " ACTION\n";
            break;
    }
}

int scenario_index(const std::string& name) {
    if (name == "custom") return 0;
    if (name.size() == 2 && name[0] == 's' && name[1] >= '1' && name[1] <= '5')
        return name[1] - '0';
    throw std::invalid_argument("unknown scenario '" + name + "' (expected s1..s5 or custom)");
}

// Nodes big enough that a full-targets run takes minutes, not seconds.
constexpr std::uint32_t kLargeNodeCount = 500;

void validate(const ExperimentSpec& spec) {
    if (spec.protocol != "lbf" && spec.protocol != "flood")
        throw std::invalid_argument("protocol must be 'lbf' or 'flood'");
    if (spec.seeds.empty()) throw std::invalid_argument("at least one seed pair is required");
    for (double p : spec.p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("threshold values must be in [0, 1]");
    if (spec.payload_bytes > 255)
        throw std::invalid_argument("payload_bytes exceeds the 8-bit wire length field");
    if (!(spec.rad_t_max < spec.hop_delay))
        throw std::invalid_argument("rad_t_max must be smaller than hop_delay");
    if (spec.hop_delay < 0.0 || spec.jitter_max < 0.0 || spec.rad_t_max < 0.0)
        throw std::invalid_argument("timing values must be nonnegative");
    const ScenarioConfig config = resolve_scenario(spec);
    if (config.node_count < 2)
        throw std::invalid_argument("experiments need at least one sensor besides the sink");
    if (config.node_count > kLargeNodeCount && !spec.allow_large)
        throw std::invalid_argument("scenario has " + std::to_string(config.node_count) +
                                    " nodes; pass allow_large to run it");
    for (NodeId t : spec.targets)
        if (t == 0 || t >= config.node_count)
            throw std::invalid_argument("target " + std::to_string(t) + " is not a sensor node");
}

std::vector<NodeId> resolve_targets(const ExperimentSpec& spec, std::size_t node_count) {
    if (!spec.targets.empty()) return spec.targets;
    std::vector<NodeId> all;
    all.reserve(node_count - 1);
    for (std::size_t i = 1; i < node_count; ++i) all.push_back(static_cast<NodeId>(i));
    return all;
}

std::uint64_t total_sent_delta(const std::vector<NodeCounters>& before,
                               const std::vector<NodeCounters>& after) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < before.size(); ++i) total += after[i].sent - before[i].sent;
    return total;
}

double mean_reachable_level(const std::vector<int>& levels) {
    // Sensors only (index 0 is the sink); unreachable nodes excluded.
    std::uint64_t sum = 0;
    std::size_t counted = 0;
    for (std::size_t i = 1; i < levels.size(); ++i) {
        if (levels[i] < 0) continue;
        sum += static_cast<std::uint64_t>(levels[i]);
        ++counted;
    }
    return counted == 0 ? kNaN : static_cast<double>(sum) / static_cast<double>(counted);
}

void finish_report(metrics::MetricsReport& rep, const std::vector<metrics::QueryRecord>& records,
                   const std::vector<metrics::BroadcastMetrics>& batch, bool include_failed) {
    std::vector<metrics::QueryRecord> cost_records;
    if (include_failed) {
        cost_records = records;
    } else {
        for (const auto& r : records)
            if (r.success) cost_records.push_back(r);
    }
    rep.average_cost = cost_records.empty() ? kNaN : metrics::average_cost(cost_records);
    rep.average_energy_cost = cost_records.empty() ? kNaN : metrics::average_energy_cost(cost_records);
    rep.average_latency = metrics::average_latency(records);
    rep.suc_ratio = metrics::suc_ratio(records);

    double sr_sum = 0.0, ec_sum = 0.0, re_sum = 0.0;
    std::size_t sr_defined = 0;
    for (const auto& m : batch) {
        if (m.sr) {
            sr_sum += *m.sr;
            ++sr_defined;
        }
        ec_sum += m.ec;
        re_sum += m.re;
    }
    if (sr_defined > 0) rep.sr = sr_sum / static_cast<double>(sr_defined);
    if (!batch.empty()) {
        rep.ec = ec_sum / static_cast<double>(batch.size());
        rep.re = re_sum / static_cast<double>(batch.size());
    }
}

CellResult run_lbf_cell(const ExperimentSpec& spec, double p, SeedPair seeds, const Topology& topo,
                        std::ostream* trace) {
    TimingConfig timing{spec.hop_delay, spec.jitter_max, spec.rad_t_max, seeds.proto_seed};
    Simulator sim(topo, timing);
    if (trace) sim.set_trace([trace](const TraceEvent& ev) { print_trace_line(*trace, ev); });
    LbfProtocol proto(sim, {p, spec.payload_bytes});

    // Phase 1: level building and the reports it routes back.
    auto before = sim.all_counters();
    proto.start_level_building();
    sim.run_to_quiescence();
    metrics::LevelBuildRecord lb;
    lb.t_start = proto.level_building_start();
    lb.t_end = proto.level_building_end();
    lb.energy = metrics::total_energy_delta(before, sim.all_counters());
    proto.reset_query_state();

    // Phase 2: dissemination floods for the broadcast-quality metrics.
    std::vector<metrics::BroadcastMetrics> batch;
    for (std::uint32_t b = 0; b < spec.broadcast_batch; ++b) {
        before = sim.all_counters();
        proto.start_query(kNoTarget);
        sim.run_to_quiescence();
        batch.push_back(
            metrics::broadcast_metrics(metrics::make_dissemination_record(before, sim.all_counters())));
        proto.reset_query_state();
    }

    // Phase 3: one query per target.
    const std::vector<NodeId> targets = resolve_targets(spec, topo.node_count());
    const auto phase_before = sim.all_counters();
    std::vector<metrics::QueryRecord> records;
    records.reserve(targets.size());
    for (NodeId target : targets) {
        before = sim.all_counters();
        const std::uint16_t seq = proto.start_query(target);
        sim.run_to_quiescence();
        metrics::QueryRecord rec;
        rec.target = target;
        rec.cost = total_sent_delta(before, sim.all_counters());
        rec.energy = metrics::total_energy_delta(before, sim.all_counters());
        const auto& done = proto.sink().completed;
        if (!done.empty() && done.back().seq == seq) {
            rec.success = true;
            rec.hops = done.back().hops;
        }
        records.push_back(rec);
        proto.reset_query_state();
    }
    const auto phase_after = sim.all_counters();

    CellResult cell;
    cell.scenario = spec.scenario;
    cell.protocol = spec.protocol;
    cell.p = p;
    cell.seeds = seeds;
    finish_report(cell.report, records, batch, spec.include_failed_in_cost);
    cell.report.average_load =
        metrics::per_node_average_load(phase_before, phase_after, records.size());
    cell.report.convergence_rate = metrics::convergence_rate(lb);
    cell.report.ec_level_building = metrics::ec_level_building(lb);
    cell.max_level = proto.max_level();
    std::vector<int> levels(topo.node_count());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const int l = proto.level_of(static_cast<NodeId>(i));
        levels[i] = (l == kSentinelLevel) ? -1 : l;
    }
    cell.avg_level = mean_reachable_level(levels);
    cell.reply_failures = proto.reply_failures();
    cell.unknown_level_fallbacks = proto.unknown_level_fallbacks();
    return cell;
}

CellResult run_flood_cell(const ExperimentSpec& spec, double p, SeedPair seeds, const Topology& topo,
                          std::ostream* trace) {
    TimingConfig timing{spec.hop_delay, spec.jitter_max, spec.rad_t_max, seeds.proto_seed};
    Simulator sim(topo, timing);
    if (trace) sim.set_trace([trace](const TraceEvent& ev) { print_trace_line(*trace, ev); });
    FloodProtocol proto(sim, {spec.payload_bytes});

    const std::vector<int> oracle = hop_distance_oracle(topo);
    int max_oracle = 0;
    for (int l : oracle) max_oracle = std::max(max_oracle, l);
    // Network-wide hop budget.  A budget of exactly the deepest level can
    // starve deepest-ring targets when queued delivery jitter inflates a
    // recorded hop count past the shortest path, so the baseline gets the
    // budget that guarantees every first-time receiver forwards once.
    const int query_ttl = static_cast<int>(topo.node_count());

    // Dissemination floods; no level building for the baseline.
    std::vector<metrics::BroadcastMetrics> batch;
    for (std::uint32_t b = 0; b < spec.broadcast_batch; ++b) {
        auto before = sim.all_counters();
        proto.flood_query(kNoTarget, query_ttl);
        sim.run_to_quiescence();
        batch.push_back(
            metrics::broadcast_metrics(metrics::make_dissemination_record(before, sim.all_counters())));
        proto.reset_query_state();
    }

    const std::vector<NodeId> targets = resolve_targets(spec, topo.node_count());
    const auto phase_before = sim.all_counters();
    std::vector<metrics::QueryRecord> records;
    records.reserve(targets.size());
    for (NodeId target : targets) {
        auto before = sim.all_counters();
        const std::uint16_t seq = proto.flood_query(target, query_ttl);
        sim.run_to_quiescence();
        metrics::QueryRecord rec;
        rec.target = target;
        rec.cost = total_sent_delta(before, sim.all_counters());
        rec.energy = metrics::total_energy_delta(before, sim.all_counters());
        if (!proto.completed().empty() && proto.completed().back().seq == seq) {
            rec.success = true;
            rec.hops = proto.completed().back().hops;
        }
        records.push_back(rec);
        proto.reset_query_state();
    }
    const auto phase_after = sim.all_counters();

    CellResult cell;
    cell.scenario = spec.scenario;
    cell.protocol = spec.protocol;
    cell.p = p;
    cell.seeds = seeds;
    finish_report(cell.report, records, batch, spec.include_failed_in_cost);
    cell.report.average_load =
        metrics::per_node_average_load(phase_before, phase_after, records.size());
    cell.report.convergence_rate = 0.0;  // no level building phase
    cell.report.ec_level_building = 0;
    cell.max_level = max_oracle;
    cell.avg_level = mean_reachable_level(oracle);
    cell.reply_failures = 0;  // source-routed replies cannot get lost
    cell.unknown_level_fallbacks = 0;
    return cell;
}

}  // namespace

double default_threshold_p(int scenario) {
    switch (scenario) {
        case 1: return 0.4;
        case 2: return 0.4;
        case 3: return 0.5;
        case 4: return 0.8;
        case 5: return 0.8;
        default: return 0.5;  // custom scenarios: middle of the road
    }
}

ScenarioConfig resolve_scenario(const ExperimentSpec& spec) {
    const int index = scenario_index(spec.scenario);
    return index == 0 ? spec.custom_config : scenario_preset(index);
}

CellResult run_cell(const ExperimentSpec& spec, double p, SeedPair seeds, std::ostream* trace) {
    validate(spec);
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("threshold must be in [0, 1]");
    const Topology topo = generate_topology(resolve_scenario(spec), seeds.topo_seed);
    return spec.protocol == "lbf" ? run_lbf_cell(spec, p, seeds, topo, trace)
                                  : run_flood_cell(spec, p, seeds, topo, trace);
}

std::vector<CellResult> run_experiment(const ExperimentSpec& spec, std::ostream* trace) {
    validate(spec);
    std::vector<double> ps = spec.p_values;
    if (ps.empty()) ps.push_back(default_threshold_p(scenario_index(spec.scenario)));
    std::vector<CellResult> cells;
    cells.reserve(ps.size() * spec.seeds.size());
    for (double p : ps) {
        for (SeedPair seeds : spec.seeds) {
            try {
                cells.push_back(run_cell(spec, p, seeds, trace));
            } catch (const std::runtime_error& e) {
                // Re-raise with the coordinates needed to replay the cell.
                throw std::runtime_error("cell P=" + fmt(p) +
                                         " topo_seed=" + std::to_string(seeds.topo_seed) +
                                         " proto_seed=" + std::to_string(seeds.proto_seed) + ": " +
                                         e.what());
            }
        }
    }
    return cells;
}

std::string csv_header() {
    return "scenario,protocol,P,topo_seed,proto_seed,avg_cost,avg_energy,avg_latency,suc_ratio,"
           "convergence_rate,ec_level_building,sr,ec,re,max_level,avg_level,reply_failures,"
           "unknown_level_fallbacks";
}

std::string to_csv_row(const CellResult& cell) {
    std::string row;
    row += cell.scenario;
    row += ',';
    row += cell.protocol;
    row += ',';
    row += fmt(cell.p);
    row += ',';
    row += std::to_string(cell.seeds.topo_seed);
    row += ',';
    row += std::to_string(cell.seeds.proto_seed);
    row += ',';
    row += fmt(cell.report.average_cost);
    row += ',';
    row += fmt(cell.report.average_energy_cost);
    row += ',';
    row += fmt(cell.report.average_latency);
    row += ',';
    row += fmt(cell.report.suc_ratio);
    row += ',';
    row += fmt(cell.report.convergence_rate);
    row += ',';
    row += std::to_string(cell.report.ec_level_building);
    row += ',';
    row += fmt(cell.report.sr ? *cell.report.sr : kNaN);
    row += ',';
    row += fmt(cell.report.ec);
    row += ',';
    row += fmt(cell.report.re);
    row += ',';
    row += std::to_string(cell.max_level);
    row += ',';
    row += fmt(cell.avg_level);
    row += ',';
    row += std::to_string(cell.reply_failures);
    row += ',';
    row += std::to_string(cell.unknown_level_fallbacks);
    return row;
}

std::string to_csv(const std::vector<CellResult>& cells) {
    std::string out = csv_header();
    out += '\n';
    for (const auto& cell : cells) {
        out += to_csv_row(cell);
        out += '\n';
    }
    return out;
}

CompareSummary compare(const ExperimentSpec& spec_a, const ExperimentSpec& spec_b) {
    validate(spec_a);
    validate(spec_b);
    if (spec_a.scenario != spec_b.scenario)
        throw std::invalid_argument("compare requires the same scenario on both sides");
    if (!(spec_a.seeds == spec_b.seeds))
        throw std::invalid_argument("compare requires identical seed lists on both sides");
    if (spec_a.p_values.size() > 1 || spec_b.p_values.size() > 1)
        throw std::invalid_argument("compare takes a single threshold per side");
    const double pa = spec_a.p_values.empty()
                          ? default_threshold_p(scenario_index(spec_a.scenario))
                          : spec_a.p_values[0];
    const double pb = spec_b.p_values.empty()
                          ? default_threshold_p(scenario_index(spec_b.scenario))
                          : spec_b.p_values[0];

    const auto ratio = [](double a, double b) { return b == 0.0 ? kNaN : a / b; };
    CompareSummary summary;
    double cost = 0.0, energy = 0.0, latency = 0.0, suc = 0.0;
    for (SeedPair seeds : spec_a.seeds) {
        const CellResult a = run_cell(spec_a, pa, seeds);
        const CellResult b = run_cell(spec_b, pb, seeds);
        CompareRow row;
        row.seeds = seeds;
        row.cost_ratio = ratio(a.report.average_cost, b.report.average_cost);
        row.energy_ratio = ratio(a.report.average_energy_cost, b.report.average_energy_cost);
        row.latency_ratio = ratio(a.report.average_latency, b.report.average_latency);
        row.suc_ratio_ratio = ratio(a.report.suc_ratio, b.report.suc_ratio);
        summary.rows.push_back(row);
        cost += row.cost_ratio;
        energy += row.energy_ratio;
        latency += row.latency_ratio;
        suc += row.suc_ratio_ratio;
    }
    const double count = static_cast<double>(summary.rows.size());
    summary.mean_cost_ratio = cost / count;
    summary.mean_energy_ratio = energy / count;
    summary.mean_latency_ratio = latency / count;
    summary.mean_suc_ratio_ratio = suc / count;
    return summary;
}

std::string to_csv(const CompareSummary& summary) {
    std::string out = "topo_seed,proto_seed,cost_ratio,energy_ratio,latency_ratio,suc_ratio_ratio\n";
    for (const auto& row : summary.rows) {
        out += std::to_string(row.seeds.topo_seed);
        out += ',';
        out += std::to_string(row.seeds.proto_seed);
        out += ',';
        out += fmt(row.cost_ratio);
        out += ',';
        out += fmt(row.energy_ratio);
        out += ',';
        out += fmt(row.latency_ratio);
        out += ',';
        out += fmt(row.suc_ratio_ratio);
        out += '\n';
    }
    out += "mean,mean,";
    out += fmt(summary.mean_cost_ratio);
    out += ',';
    out += fmt(summary.mean_energy_ratio);
    out += ',';
    out += fmt(summary.mean_latency_ratio);
    out += ',';
    out += fmt(summary.mean_suc_ratio_ratio);
    out += '\n';
    return out;
}

}  // namespace lbf
