// Command-line driver: experiment batches to CSV, paired protocol
// comparisons, and a packet hex-dump helper.
//
// Precedence for run/compare settings: built-in defaults, then the JSON
// config file (keys named exactly like the experiment spec fields), then
// flags / LBFSIM_* environment variables.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbf/experiment.hpp"
#include "lbf/wire.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, sep))
        if (!item.empty()) parts.push_back(item);
    return parts;
}

// "1..20" (pairs (k,k)), "7" (pair (7,7)), "3:9" (topology seed 3, protocol
// seed 9), comma-separated combinations thereof.
std::vector<lbf::SeedPair> parse_seeds(const std::string& text) {
    std::vector<lbf::SeedPair> seeds;
    for (const std::string& part : split(text, ',')) {
        if (auto dots = part.find(".."); dots != std::string::npos) {
            const std::uint64_t lo = std::stoull(part.substr(0, dots));
            const std::uint64_t hi = std::stoull(part.substr(dots + 2));
            if (hi < lo) throw CLI::ValidationError("--seeds", "range is reversed: " + part);
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back({s, s});
        } else if (auto colon = part.find(':'); colon != std::string::npos) {
            seeds.push_back({std::stoull(part.substr(0, colon)), std::stoull(part.substr(colon + 1))});
        } else {
            const std::uint64_t s = std::stoull(part);
            seeds.push_back({s, s});
        }
    }
    if (seeds.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
    return seeds;
}

std::vector<lbf::NodeId> parse_targets(const std::string& text) {
    std::vector<lbf::NodeId> targets;
    if (text == "all") return targets;  // empty = every sensor
    for (const std::string& part : split(text, ','))
        targets.push_back(static_cast<lbf::NodeId>(std::stoul(part)));
    return targets;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> values;
    for (const std::string& part : split(text, ',')) values.push_back(std::stod(part));
    return values;
}

// JSON config with keys mirroring the ExperimentSpec fields.  Applied after
// parsing, and only for settings whose flag (or environment variable) was
// not given, so the documented precedence holds: defaults < config < flags.
void apply_config_file(const std::string& path, lbf::ExperimentSpec& spec, const CLI::App& cmd) {
    const auto given = [&cmd](std::initializer_list<const char*> names) {
        for (const char* name : names) {
            const CLI::Option* opt = cmd.get_option_no_throw(name);
            if (opt != nullptr && opt->count() > 0) return true;
        }
        return false;
    };
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json doc = json::parse(in);
    for (const auto& [key, value] : doc.items()) {
        if (key == "scenario") {
            if (!given({"--scenario"})) spec.scenario = value.get<std::string>();
        } else if (key == "protocol") {
            if (!given({"--protocol", "--protocol-a"})) spec.protocol = value.get<std::string>();
        } else if (key == "p_values") {
            if (!given({"--p", "--sweep-p", "--p-a"}))
                spec.p_values = value.get<std::vector<double>>();
        } else if (key == "seeds") {
            if (given({"--seeds"})) continue;
            spec.seeds.clear();
            for (const auto& entry : value) {
                if (entry.is_array())
                    spec.seeds.push_back({entry.at(0).get<std::uint64_t>(),
                                          entry.at(1).get<std::uint64_t>()});
                else
                    spec.seeds.push_back({entry.get<std::uint64_t>(), entry.get<std::uint64_t>()});
            }
        } else if (key == "targets") {
            if (!given({"--targets"})) spec.targets = value.get<std::vector<lbf::NodeId>>();
        } else if (key == "hop_delay") {
            if (!given({"--hop-delay"})) spec.hop_delay = value.get<double>();
        } else if (key == "jitter_max") {
            if (!given({"--jitter"})) spec.jitter_max = value.get<double>();
        } else if (key == "rad_t_max") {
            if (!given({"--rad-tmax"})) spec.rad_t_max = value.get<double>();
        } else if (key == "payload_bytes") {
            if (!given({"--payload-bytes"})) spec.payload_bytes = value.get<std::uint32_t>();
        } else if (key == "broadcast_batch") {
            if (!given({"--batch"})) spec.broadcast_batch = value.get<std::uint32_t>();
        } else if (key == "include_failed_in_cost") {
            if (!given({"--exclude-failed"}))
                spec.include_failed_in_cost = value.get<bool>();
        } else if (key == "allow_large") {
            if (!given({"--allow-large"})) spec.allow_large = value.get<bool>();
        } else if (key == "custom_config") {
            if (!given({"--nodes"}))
                spec.custom_config.node_count = value.at("node_count").get<std::uint32_t>();
            if (!given({"--side"})) spec.custom_config.side = value.at("side").get<double>();
            if (!given({"--radius"}))
                spec.custom_config.comm_radius = value.value("comm_radius", 110.0);
        } else {
            throw CLI::ValidationError("--config", "unknown key '" + key + "'");
        }
    }
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << content;
}

// Options shared by run and compare.  Values land in `spec` after parse;
// finalize() then layers in config-file values for anything the command
// line (or environment) did not set, so explicit flags win.
struct CommonOptions {
    std::string config_path;
    std::string seeds_text;
    std::string targets_text;
    std::string out_path;
    bool trace = false;

    void attach(CLI::App& cmd, lbf::ExperimentSpec& spec) {
        cmd.add_option("--config", config_path, "JSON config file (flags override it)")
            ->envname("LBFSIM_CONFIG");
        cmd.add_option("--scenario", spec.scenario, "s1..s5 or custom")->envname("LBFSIM_SCENARIO");
        cmd.add_option("--nodes", spec.custom_config.node_count, "custom scenario: node count")
            ->envname("LBFSIM_NODES");
        cmd.add_option("--side", spec.custom_config.side, "custom scenario: field edge, m")
            ->envname("LBFSIM_SIDE");
        cmd.add_option("--radius", spec.custom_config.comm_radius, "custom scenario: link range, m")
            ->envname("LBFSIM_RADIUS");
        cmd.add_option("--seeds", seeds_text, "e.g. 1..20, or 3,5, or topo:proto pairs 3:9")
            ->envname("LBFSIM_SEEDS");
        cmd.add_option("--targets", targets_text, "'all' or comma-separated node ids")
            ->envname("LBFSIM_TARGETS");
        cmd.add_option("--out", out_path, "output CSV path (default stdout)")->envname("LBFSIM_OUT");
        cmd.add_flag("--trace", trace, "dump the event log to stderr")->envname("LBFSIM_TRACE");
        cmd.add_option("--hop-delay", spec.hop_delay, "per-hop delay, virtual s")
            ->envname("LBFSIM_HOP_DELAY");
        cmd.add_option("--jitter", spec.jitter_max, "delivery jitter upper bound")
            ->envname("LBFSIM_JITTER");
        cmd.add_option("--rad-tmax", spec.rad_t_max, "assessment delay upper bound")
            ->envname("LBFSIM_RAD_TMAX");
        cmd.add_option("--payload-bytes", spec.payload_bytes, "data-back payload size")
            ->envname("LBFSIM_PAYLOAD_BYTES");
        cmd.add_option("--batch", spec.broadcast_batch, "dissemination floods per cell")
            ->envname("LBFSIM_BATCH");
        cmd.add_flag("--exclude-failed", "cost averages over successful queries only")
            ->envname("LBFSIM_EXCLUDE_FAILED");
        cmd.add_flag("--allow-large", spec.allow_large, "permit s4/s5-scale node counts")
            ->envname("LBFSIM_ALLOW_LARGE");
    }

    void finalize(CLI::App& cmd, lbf::ExperimentSpec& spec) {
        if (!config_path.empty()) apply_config_file(config_path, spec, cmd);
        if (!seeds_text.empty()) spec.seeds = parse_seeds(seeds_text);
        if (!targets_text.empty()) spec.targets = parse_targets(targets_text);
        if (cmd.count("--exclude-failed") > 0) spec.include_failed_in_cost = false;
    }
};

void describe(const lbf::wire::WirePacket& packet, std::ostream& os) {
    std::visit(
        [&os](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, lbf::LevelBuildingPacket>) {
                os << "kind=level_building level=" << int(p.level) << " source=" << p.source
                   << " seq=" << p.seq;
            } else if constexpr (std::is_same_v<T, lbf::LevelBackPacket>) {
                os << "kind=level_back ttl=" << int(p.ttl) << " level=" << int(p.level)
                   << " seq=" << p.seq << " target=" << p.target << " source=" << p.source;
            } else if constexpr (std::is_same_v<T, lbf::QueryPacket>) {
                os << "kind=query hop_count=" << int(p.hop_count) << " ttl=" << int(p.ttl)
                   << " seq=" << p.seq << " target=" << p.target << " source=" << p.source;
            } else {
                os << "kind=data_back ttl=" << int(p.ttl) << " seq=" << p.seq
                   << " target=" << p.target << " source=" << p.source
                   << " data_len=" << p.data.size();
            }
        },
        packet);
    os << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Level-based flooding search simulator"};
    app.require_subcommand(1);

    lbf::ExperimentSpec run_spec;
    CommonOptions run_common;
    std::string run_p_text, run_sweep_text;
    CLI::App* run = app.add_subcommand("run", "run an experiment batch, emit CSV rows");
    run_common.attach(*run, run_spec);
    auto* p_opt = run->add_option("--p", run_p_text, "threshold P")->envname("LBFSIM_P");
    run->add_option("--sweep-p", run_sweep_text, "comma-separated threshold list")
        ->envname("LBFSIM_SWEEP_P")
        ->excludes(p_opt);
    run->add_option("--protocol", run_spec.protocol, "lbf or flood")->envname("LBFSIM_PROTOCOL");

    lbf::ExperimentSpec cmp_a, cmp_b;
    CommonOptions cmp_common;
    std::string cmp_pa_text, cmp_pb_text;
    CLI::App* cmp = app.add_subcommand("compare", "paired per-seed metric ratios A/B");
    cmp_common.attach(*cmp, cmp_a);
    cmp->add_option("--protocol-a", cmp_a.protocol, "side A protocol (default lbf)");
    cmp->add_option("--protocol-b", cmp_b.protocol, "side B protocol (default flood)");
    cmp->add_option("--p-a", cmp_pa_text, "side A threshold");
    cmp->add_option("--p-b", cmp_pb_text, "side B threshold");

    std::vector<std::string> hex_parts;
    CLI::App* hexdump = app.add_subcommand("hexdump", "decode a packet from hex bytes");
    hexdump->add_option("bytes", hex_parts, "hex byte string, e.g. '03 00 02 02 00 07 00 05 00 00'")
        ->required();

    cmp_a.protocol = "lbf";
    cmp_b.protocol = "flood";

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            run_common.finalize(*run, run_spec);
            if (!run_p_text.empty()) run_spec.p_values = {std::stod(run_p_text)};
            if (!run_sweep_text.empty()) run_spec.p_values = parse_doubles(run_sweep_text);
            std::ostream* trace = run_common.trace ? &std::cerr : nullptr;
            const auto cells = lbf::run_experiment(run_spec, trace);
            write_output(run_common.out_path, lbf::to_csv(cells));
        } else if (cmp->parsed()) {
            cmp_common.finalize(*cmp, cmp_a);
            // Side B shares everything but protocol and threshold.
            const std::string protocol_b = cmp_b.protocol;
            cmp_b = cmp_a;
            cmp_b.protocol = protocol_b;
            cmp_a.p_values.clear();
            cmp_b.p_values.clear();
            if (!cmp_pa_text.empty()) cmp_a.p_values = {std::stod(cmp_pa_text)};
            if (!cmp_pb_text.empty()) cmp_b.p_values = {std::stod(cmp_pb_text)};
            const auto summary = lbf::compare(cmp_a, cmp_b);
            write_output(cmp_common.out_path, lbf::to_csv(summary));
        } else if (hexdump->parsed()) {
            std::string joined;
            for (const auto& part : hex_parts) {
                joined += part;
                joined += ' ';
            }
            std::vector<std::uint8_t> bytes;
            if (!lbf::wire::from_hex(joined, bytes)) {
                std::cerr << "error: not a hex byte string\n";
                return 2;
            }
            const auto result = lbf::wire::decode(bytes);
            if (lbf::wire::is_error(result)) {
                std::cerr << "decode error: "
                          << lbf::wire::to_string(std::get<lbf::wire::DecodeError>(result)) << "\n";
                return 1;
            }
            const auto& packet = std::get<lbf::wire::WirePacket>(result);
            describe(packet, std::cout);
            std::cout << "bytes: " << lbf::wire::to_hex(lbf::wire::encode(packet)) << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
