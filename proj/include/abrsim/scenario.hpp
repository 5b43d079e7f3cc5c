#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "abrsim/event_queue.hpp"
#include "abrsim/policy.hpp"
#include "abrsim/source.hpp"
#include "abrsim/source_params.hpp"
#include "abrsim/switch_fabric.hpp"
#include "abrsim/trace.hpp"
#include "abrsim/traffic.hpp"

namespace abrsim {

// Configuration problem; what holds the offending field's path.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field, const std::string& msg)
        : std::runtime_error(field + ": " + msg), field_path(field) {}
    std::string field_path;
};

enum class TrafficKind { Greedy, Bottleneck, ClosedLoopClient, ClosedLoopServer };

struct TrafficConfig {
    TrafficKind kind = TrafficKind::Greedy;
    BottleneckSchedule schedule;       // Bottleneck
    ClosedLoopParams closed_loop;      // ClosedLoopClient
    std::string peer_vc;               // client: response VC; server: request VC
};

struct VcDef {
    std::string name;
    std::string src_host;
    std::string dst_host;
    SourceParams params;
    TrafficConfig traffic;
};

struct HostDef {
    std::string name;
    int switch_index = 0;
    double link_km = 1000.0;
    double link_mbps = 155.52;
};

struct TopologyDef {
    int switches = 2;
    std::vector<double> interswitch_km;  // switches-1 entries
    double interswitch_mbps = 155.52;
    std::vector<HostDef> hosts;
    std::vector<VcDef> vcs;
};

struct ScenarioConfig {
    TopologyDef topology;
    SimTime run_ns = ns_from_ms(400.0);
    PolicyConfig policy;
    EricaParams erica;
    std::uint64_t seed = 0;  // reserved; the built-in models are deterministic
    std::string output_dir;

    void validate() const;  // throws ConfigError
};

// Canonical configurations.
ScenarioConfig five_sources_preset();
ScenarioConfig single_client_preset(std::int64_t request_cells = 256);

// JSON round trip. load accepts either a full topology or {"preset": name}
// plus overrides; to_json always emits the expanded form.
ScenarioConfig config_from_json_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json_text(const ScenarioConfig& cfg);

struct PortInfo {
    Port* port = nullptr;
    std::string owner;  // switch or host name
    std::string name;   // "to_<peer>"
    bool is_switch_port = false;
};

// A fully wired simulation ready to run.
struct Scenario {
    Simulator sim;
    TraceSink trace;

    std::vector<std::unique_ptr<SwitchNode>> switches;
    std::vector<std::unique_ptr<HostNode>> hosts;
    std::vector<std::unique_ptr<Port>> ports;
    std::vector<std::unique_ptr<SourceEndSystem>> sources;
    std::vector<std::unique_ptr<DestinationEndSystem>> dests;
    std::vector<std::unique_ptr<TrafficModel>> traffics;

    std::vector<PortInfo> port_infos;
    std::map<std::string, std::int32_t> vc_ids;
    std::map<std::int32_t, SourceEndSystem*> ses_by_vc;
    std::map<std::int32_t, DestinationEndSystem*> des_by_vc;
    std::map<std::int32_t, ClosedLoopClient*> clients_by_vc;

    // Forward inter-switch port between the first two switches, when present;
    // the bottleneck of both canonical topologies.
    Port* bottleneck_port = nullptr;

    SourceEndSystem* ses(const std::string& vc_name);
};

struct VcSummary {
    std::string name;
    double mean_acr_cps = 0;
    double final_acr_cps = 0;
    std::int64_t frm_sent = 0;
    std::int64_t data_sent = 0;
    std::int64_t brm_received = 0;
    std::int64_t burst_count = 0;
    double mean_burst_throughput_bps = 0;
    double mean_burst_response_ns = 0;
};

struct PortSummary {
    std::string owner;
    std::string name;
    std::int32_t max_qlen = 0;
    std::int32_t final_qlen = 0;
    std::int64_t enqueued = 0;
    std::int64_t dequeued = 0;
    double utilization = 0;
};

struct MetricsSummary {
    SimTime run_ns = 0;
    std::uint64_t dispatched_events = 0;
    std::vector<VcSummary> vcs;
    std::vector<PortSummary> ports;

    std::string to_json_text() const;
};

std::unique_ptr<Scenario> build_scenario(const ScenarioConfig& cfg);

// Runs to cfg.run_ns and, when cfg.output_dir is set, writes acr_trace.csv,
// queue_trace.csv, burst_records.csv and summary.json there.
MetricsSummary run_scenario(Scenario& sc, const ScenarioConfig& cfg);

}  // namespace abrsim
