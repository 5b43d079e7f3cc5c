#include "abrsim/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace abrsim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Presets

namespace {

SourceParams five_sources_params() {
    SourceParams p;
    p.pcr_cps = cps_from_mbps(155.52);
    p.mcr_cps = 0.0;
    p.icr_cps = cps_from_mbps(1.0);
    p.rif = 1.0;
    p.rdf = 1.0 / 512.0;
    p.nrm = 32;
    p.mrm = 2;
    p.trm_ns = ns_from_ms(100.0);
    p.tof = 2.0;
    p.tdf = 0.125;
    p.headroom_cps = cps_from_mbps(1.0);
    p.frtt_ns = ns_from_ms(30.0);
    p.addf = 2.0;
    p.tbe = 4096;
    p.atdf_ns = ns_from_ms(500.0);
    p.pni = false;
    p.delta_cps = 100.0;
    p.crm = std::min(static_cast<double>(p.tbe) / p.nrm, p.pcr_cps * sec_from_ns(p.frtt_ns) / p.nrm);
    p.cdf = 0.5;
    p.tcr_cps = 10.0;
    return p;
}

SourceParams single_client_params() {
    SourceParams p = five_sources_params();
    p.icr_cps = cps_from_mbps(10.0);
    p.tdf = 1.0 / 8.0;
    p.headroom_cps = cps_from_mbps(10.0);
    p.frtt_ns = ns_from_ms(15.0);
    p.tbe = 512;
    p.cdf = 0.0;
    p.crm = std::min(static_cast<double>(p.tbe) / p.nrm, p.pcr_cps * sec_from_ns(p.frtt_ns) / p.nrm);
    return p;
}

}  // namespace

ScenarioConfig five_sources_preset() {
    ScenarioConfig cfg;
    cfg.run_ns = ns_from_ms(400.0);
    cfg.policy.kind = PolicyKind::CountBased;
    cfg.topology.switches = 2;
    cfg.topology.interswitch_km = {1000.0};
    cfg.topology.interswitch_mbps = 155.52;

    SourceParams p = five_sources_params();
    BottleneckSchedule sched;
    sched.segments.push_back({ns_from_ms(200.0), cps_from_mbps(10.0)});
    sched.segments.push_back({INT64_MAX, kUnboundedRate});

    for (int i = 1; i <= 5; ++i) {
        std::string s = "s" + std::to_string(i);
        std::string d = "d" + std::to_string(i);
        cfg.topology.hosts.push_back({s, 0, 1000.0, 155.52});
        cfg.topology.hosts.push_back({d, 1, 1000.0, 155.52});
        VcDef fwd;
        fwd.name = "vc" + std::to_string(i) + "_fwd";
        fwd.src_host = s;
        fwd.dst_host = d;
        fwd.params = p;
        fwd.traffic.kind = TrafficKind::Bottleneck;
        fwd.traffic.schedule = sched;
        cfg.topology.vcs.push_back(fwd);
        VcDef rev = fwd;
        rev.name = "vc" + std::to_string(i) + "_rev";
        rev.src_host = d;
        rev.dst_host = s;
        cfg.topology.vcs.push_back(rev);
    }
    return cfg;
}

ScenarioConfig single_client_preset(std::int64_t request_cells) {
    ScenarioConfig cfg;
    cfg.run_ns = ns_from_ms(400.0);
    cfg.policy.kind = PolicyKind::CountBased;
    cfg.topology.switches = 2;
    cfg.topology.interswitch_km = {500.0};
    cfg.topology.interswitch_mbps = 155.52;
    cfg.topology.hosts = {
        {"client", 0, 500.0, 155.52},
        {"bg", 0, 500.0, 155.52},
        {"server", 1, 500.0, 155.52},
        {"bgsink", 1, 500.0, 155.52},
    };

    SourceParams p = single_client_params();
    ClosedLoopParams cl;
    cl.request_cells = request_cells;
    cl.response_cells = 16;
    cl.inter_cycle_ns = ns_from_ms(1.0);

    VcDef client;
    client.name = "client";
    client.src_host = "client";
    client.dst_host = "server";
    client.params = p;
    client.traffic.kind = TrafficKind::ClosedLoopClient;
    client.traffic.closed_loop = cl;
    client.traffic.peer_vc = "server";
    cfg.topology.vcs.push_back(client);

    VcDef server;
    server.name = "server";
    server.src_host = "server";
    server.dst_host = "client";
    server.params = p;
    server.traffic.kind = TrafficKind::ClosedLoopServer;
    server.traffic.peer_vc = "client";
    cfg.topology.vcs.push_back(server);

    VcDef bg;
    bg.name = "bg";
    bg.src_host = "bg";
    bg.dst_host = "bgsink";
    bg.params = p;
    bg.traffic.kind = TrafficKind::Greedy;
    cfg.topology.vcs.push_back(bg);
    return cfg;
}

// ---------------------------------------------------------------------------
// Validation

void ScenarioConfig::validate() const {
    if (run_ns <= 0) throw ConfigError("run_ms", "must be positive");
    if (erica.target_utilization <= 0 || erica.target_utilization > 1) {
        throw ConfigError("erica.target_utilization", "must be in (0, 1]");
    }
    if (erica.interval_ns <= 0) throw ConfigError("erica.interval_ms", "must be positive");
    if (erica.interval_cells <= 0) throw ConfigError("erica.interval_cells", "must be positive");
    if (erica.smoothing_weight < 0 || erica.smoothing_weight > 1) {
        throw ConfigError("erica.smoothing_weight", "must be in [0, 1]");
    }
    if (topology.switches < 1) throw ConfigError("topology.switches", "need at least one switch");
    if (static_cast<int>(topology.interswitch_km.size()) != topology.switches - 1) {
        throw ConfigError("topology.interswitch_km", "need switches-1 link lengths");
    }
    for (std::size_t i = 0; i < topology.interswitch_km.size(); ++i) {
        if (topology.interswitch_km[i] <= 0) {
            throw ConfigError("topology.interswitch_km[" + std::to_string(i) + "]",
                              "length must be positive");
        }
    }
    if (topology.interswitch_mbps <= 0) {
        throw ConfigError("topology.interswitch_mbps", "rate must be positive");
    }

    std::set<std::string> host_names;
    for (std::size_t i = 0; i < topology.hosts.size(); ++i) {
        const auto& h = topology.hosts[i];
        std::string base = "topology.hosts[" + std::to_string(i) + "]";
        if (h.name.empty()) throw ConfigError(base + ".name", "empty host name");
        if (!host_names.insert(h.name).second) throw ConfigError(base + ".name", "duplicate");
        if (h.switch_index < 0 || h.switch_index >= topology.switches) {
            throw ConfigError(base + ".switch", "switch index out of range");
        }
        if (h.link_km <= 0) throw ConfigError(base + ".link_km", "length must be positive");
        if (h.link_mbps <= 0) throw ConfigError(base + ".link_mbps", "rate must be positive");
    }

    std::set<std::string> vc_names;
    for (std::size_t i = 0; i < topology.vcs.size(); ++i) {
        const auto& vc = topology.vcs[i];
        std::string base = "topology.vcs[" + std::to_string(i) + "]";
        if (vc.name.empty()) throw ConfigError(base + ".name", "empty VC name");
        if (!vc_names.insert(vc.name).second) throw ConfigError(base + ".name", "duplicate");
        if (!host_names.count(vc.src_host)) throw ConfigError(base + ".src", "unknown host");
        if (!host_names.count(vc.dst_host)) throw ConfigError(base + ".dst", "unknown host");
        if (vc.src_host == vc.dst_host) throw ConfigError(base, "src and dst must differ");
        std::string err = vc.params.validate();
        if (!err.empty()) throw ConfigError(base + ".params", err);
        if (vc.traffic.kind == TrafficKind::Bottleneck) {
            const auto& segs = vc.traffic.schedule.segments;
            if (segs.empty()) throw ConfigError(base + ".traffic.segments", "empty schedule");
            for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
                if (segs[k].until_ns >= segs[k + 1].until_ns) {
                    throw ConfigError(base + ".traffic.segments", "segment boundaries not increasing");
                }
            }
        }
        if (vc.traffic.kind == TrafficKind::ClosedLoopClient) {
            const auto& cl = vc.traffic.closed_loop;
            if (cl.request_cells <= 0) throw ConfigError(base + ".traffic.request_cells", "must be positive");
            if (cl.response_cells <= 0) throw ConfigError(base + ".traffic.response_cells", "must be positive");
            if (cl.requests_per_cycle < 1) throw ConfigError(base + ".traffic.requests_per_cycle", "must be >= 1");
            if (cl.inter_cycle_ns < 0) throw ConfigError(base + ".traffic.inter_cycle_ms", "must be non-negative");
        }
        if (vc.traffic.kind == TrafficKind::ClosedLoopClient ||
            vc.traffic.kind == TrafficKind::ClosedLoopServer) {
            if (!vc_names.count(vc.traffic.peer_vc)) {
                // Peer may be declared later in the list; resolve below.
                bool found = false;
                for (const auto& other : topology.vcs) {
                    if (other.name == vc.traffic.peer_vc) found = true;
                }
                if (!found) throw ConfigError(base + ".traffic.peer_vc", "unknown VC");
            }
        }
    }

    // Closed-loop pairs must terminate at each other's endpoints.
    for (std::size_t i = 0; i < topology.vcs.size(); ++i) {
        const auto& vc = topology.vcs[i];
        std::string base = "topology.vcs[" + std::to_string(i) + "]";
        if (vc.traffic.kind != TrafficKind::ClosedLoopClient) continue;
        const VcDef* peer = nullptr;
        for (const auto& other : topology.vcs) {
            if (other.name == vc.traffic.peer_vc) peer = &other;
        }
        if (!peer || peer->traffic.kind != TrafficKind::ClosedLoopServer) {
            throw ConfigError(base + ".traffic.peer_vc", "must name a closed_loop_server VC");
        }
        if (peer->src_host != vc.dst_host || peer->dst_host != vc.src_host) {
            throw ConfigError(base + ".traffic.peer_vc", "response VC must mirror the request VC");
        }
    }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

double get_num(const json& j, const std::string& path, const char* key, double fallback,
               bool* present = nullptr) {
    if (!j.contains(key)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    if (!j[key].is_number()) throw ConfigError(path + "." + key, "expected a number");
    return j[key].get<double>();
}

void parse_params(const json& j, const std::string& path, SourceParams& p) {
    p.pcr_cps = cps_from_mbps(get_num(j, path, "pcr_mbps", mbps_from_cps(p.pcr_cps)));
    p.mcr_cps = cps_from_mbps(get_num(j, path, "mcr_mbps", mbps_from_cps(p.mcr_cps)));
    p.icr_cps = cps_from_mbps(get_num(j, path, "icr_mbps", mbps_from_cps(p.icr_cps)));
    p.rif = get_num(j, path, "rif", p.rif);
    p.rdf = get_num(j, path, "rdf", p.rdf);
    p.nrm = static_cast<int>(get_num(j, path, "nrm", p.nrm));
    p.mrm = static_cast<int>(get_num(j, path, "mrm", p.mrm));
    p.trm_ns = ns_from_ms(get_num(j, path, "trm_ms", ms_from_ns(p.trm_ns)));
    p.tof = get_num(j, path, "tof", p.tof);
    p.tdf = get_num(j, path, "tdf", p.tdf);
    p.headroom_cps = cps_from_mbps(get_num(j, path, "headroom_mbps", mbps_from_cps(p.headroom_cps)));
    p.frtt_ns = ns_from_ms(get_num(j, path, "frtt_ms", ms_from_ns(p.frtt_ns)));
    p.addf = get_num(j, path, "addf", p.addf);
    p.tbe = static_cast<std::int64_t>(get_num(j, path, "tbe", static_cast<double>(p.tbe)));
    p.atdf_ns = ns_from_ms(get_num(j, path, "atdf_ms", ms_from_ns(p.atdf_ns)));
    if (j.contains("pni")) {
        if (!j["pni"].is_boolean()) throw ConfigError(path + ".pni", "expected a boolean");
        p.pni = j["pni"].get<bool>();
    }
    p.delta_cps = get_num(j, path, "delta_cps", p.delta_cps);
    p.crm = get_num(j, path, "crm", p.crm);
    p.cdf = get_num(j, path, "cdf", p.cdf);
    p.tcr_cps = get_num(j, path, "tcr_cps", p.tcr_cps);
}

json params_to_json(const SourceParams& p) {
    json j;
    j["pcr_mbps"] = mbps_from_cps(p.pcr_cps);
    j["mcr_mbps"] = mbps_from_cps(p.mcr_cps);
    j["icr_mbps"] = mbps_from_cps(p.icr_cps);
    j["rif"] = p.rif;
    j["rdf"] = p.rdf;
    j["nrm"] = p.nrm;
    j["mrm"] = p.mrm;
    j["trm_ms"] = ms_from_ns(p.trm_ns);
    j["tof"] = p.tof;
    j["tdf"] = p.tdf;
    j["headroom_mbps"] = mbps_from_cps(p.headroom_cps);
    j["frtt_ms"] = ms_from_ns(p.frtt_ns);
    j["addf"] = p.addf;
    j["tbe"] = p.tbe;
    j["atdf_ms"] = ms_from_ns(p.atdf_ns);
    j["pni"] = p.pni;
    j["delta_cps"] = p.delta_cps;
    j["crm"] = p.crm;
    j["cdf"] = p.cdf;
    j["tcr_cps"] = p.tcr_cps;
    return j;
}

void parse_policy(const json& j, PolicyConfig& pol) {
    if (j.contains("kind")) {
        std::string name = j["kind"].get<std::string>();
        if (!policy_kind_from_name(name, pol.kind)) {
            throw ConfigError("policy.kind", "unknown policy '" + name + "'");
        }
    }
    if (j.contains("time_based_floor")) {
        std::string f = j["time_based_floor"].get<std::string>();
        if (f == "a") {
            pol.time_based_floor = TimeBasedFloor::OptionA;
        } else if (f == "b") {
            pol.time_based_floor = TimeBasedFloor::OptionB;
        } else {
            throw ConfigError("policy.time_based_floor", "must be \"a\" or \"b\"");
        }
    }
    if (j.contains("use_pr5")) pol.use_pr5 = j["use_pr5"].get<bool>();
    if (j.contains("switch_aging")) pol.switch_aging_enabled = j["switch_aging"].get<bool>();
    pol.aging_alpha = get_num(j, "policy", "aging_alpha", pol.aging_alpha);
    pol.aging_delta = get_num(j, "policy", "aging_delta", pol.aging_delta);
}

void parse_traffic(const json& j, const std::string& path, TrafficConfig& t) {
    std::string kind = j.value("kind", "greedy");
    if (kind == "greedy") {
        t.kind = TrafficKind::Greedy;
    } else if (kind == "bottleneck") {
        t.kind = TrafficKind::Bottleneck;
        t.schedule.segments.clear();
        if (!j.contains("segments") || !j["segments"].is_array()) {
            throw ConfigError(path + ".segments", "expected an array");
        }
        for (const auto& s : j["segments"]) {
            BottleneckSchedule::Segment seg;
            seg.until_ns = s.contains("until_ms") ? ns_from_ms(s["until_ms"].get<double>())
                                                  : INT64_MAX;
            if (s.contains("cap_mbps")) {
                if (s["cap_mbps"].is_string()) {
                    seg.cap_cps = kUnboundedRate;  // "unbounded"
                } else {
                    seg.cap_cps = cps_from_mbps(s["cap_mbps"].get<double>());
                }
            }
            t.schedule.segments.push_back(seg);
        }
    } else if (kind == "closed_loop_client") {
        t.kind = TrafficKind::ClosedLoopClient;
        t.closed_loop.request_cells =
            static_cast<std::int64_t>(get_num(j, path, "request_cells", 256));
        t.closed_loop.response_cells =
            static_cast<std::int64_t>(get_num(j, path, "response_cells", 16));
        t.closed_loop.inter_cycle_ns = ns_from_ms(get_num(j, path, "inter_cycle_ms", 1.0));
        t.closed_loop.inter_request_ns = ns_from_ms(get_num(j, path, "inter_request_ms", 0.0));
        t.closed_loop.requests_per_cycle =
            static_cast<int>(get_num(j, path, "requests_per_cycle", 1));
        t.peer_vc = j.value("response_vc", "");
    } else if (kind == "closed_loop_server") {
        t.kind = TrafficKind::ClosedLoopServer;
        t.peer_vc = j.value("request_vc", "");
    } else {
        throw ConfigError(path + ".kind", "unknown traffic kind '" + kind + "'");
    }
}

json traffic_to_json(const TrafficConfig& t) {
    json j;
    switch (t.kind) {
        case TrafficKind::Greedy:
            j["kind"] = "greedy";
            break;
        case TrafficKind::Bottleneck: {
            j["kind"] = "bottleneck";
            json segs = json::array();
            for (const auto& s : t.schedule.segments) {
                json seg;
                if (s.until_ns != INT64_MAX) seg["until_ms"] = ms_from_ns(s.until_ns);
                if (s.cap_cps == kUnboundedRate) {
                    seg["cap_mbps"] = "unbounded";
                } else {
                    seg["cap_mbps"] = mbps_from_cps(s.cap_cps);
                }
                segs.push_back(seg);
            }
            j["segments"] = segs;
            break;
        }
        case TrafficKind::ClosedLoopClient:
            j["kind"] = "closed_loop_client";
            j["request_cells"] = t.closed_loop.request_cells;
            j["response_cells"] = t.closed_loop.response_cells;
            j["inter_cycle_ms"] = ms_from_ns(t.closed_loop.inter_cycle_ns);
            j["inter_request_ms"] = ms_from_ns(t.closed_loop.inter_request_ns);
            j["requests_per_cycle"] = t.closed_loop.requests_per_cycle;
            j["response_vc"] = t.peer_vc;
            break;
        case TrafficKind::ClosedLoopServer:
            j["kind"] = "closed_loop_server";
            j["request_vc"] = t.peer_vc;
            break;
    }
    return j;
}

}  // namespace

ScenarioConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("JSON parse error: ") + e.what());
    }

    ScenarioConfig cfg;
    bool have_topology = false;
    if (j.contains("preset")) {
        std::string preset = j["preset"].get<std::string>();
        if (preset == "five_sources") {
            cfg = five_sources_preset();
        } else if (preset == "single_client") {
            cfg = single_client_preset();
        } else {
            throw ConfigError("preset", "unknown preset '" + preset + "'");
        }
        have_topology = true;
    }

    if (j.contains("run_ms")) cfg.run_ns = ns_from_ms(j["run_ms"].get<double>());
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("policy")) parse_policy(j["policy"], cfg.policy);
    if (j.contains("erica")) {
        const json& e = j["erica"];
        cfg.erica.target_utilization =
            get_num(e, "erica", "target_utilization", cfg.erica.target_utilization);
        cfg.erica.interval_ns = ns_from_ms(get_num(e, "erica", "interval_ms",
                                                   ms_from_ns(cfg.erica.interval_ns)));
        cfg.erica.interval_cells =
            static_cast<int>(get_num(e, "erica", "interval_cells", cfg.erica.interval_cells));
        cfg.erica.smoothing_weight =
            get_num(e, "erica", "smoothing_weight", cfg.erica.smoothing_weight);
    }

    if (j.contains("topology")) {
        const json& t = j["topology"];
        cfg.topology = TopologyDef{};
        cfg.topology.switches = static_cast<int>(get_num(t, "topology", "switches", 2));
        if (t.contains("interswitch_km")) {
            cfg.topology.interswitch_km.clear();
            for (const auto& v : t["interswitch_km"]) {
                cfg.topology.interswitch_km.push_back(v.get<double>());
            }
        }
        cfg.topology.interswitch_mbps =
            get_num(t, "topology", "interswitch_mbps", cfg.topology.interswitch_mbps);
        if (!t.contains("hosts") || !t.contains("vcs")) {
            throw ConfigError("topology", "custom topology needs hosts and vcs");
        }
        for (std::size_t i = 0; i < t["hosts"].size(); ++i) {
            const json& h = t["hosts"][i];
            std::string path = "topology.hosts[" + std::to_string(i) + "]";
            HostDef hd;
            hd.name = h.value("name", "");
            hd.switch_index = static_cast<int>(get_num(h, path, "switch", 0));
            hd.link_km = get_num(h, path, "link_km", 1000.0);
            hd.link_mbps = get_num(h, path, "link_mbps", 155.52);
            cfg.topology.hosts.push_back(hd);
        }
        for (std::size_t i = 0; i < t["vcs"].size(); ++i) {
            const json& v = t["vcs"][i];
            std::string path = "topology.vcs[" + std::to_string(i) + "]";
            VcDef vc;
            vc.name = v.value("name", "");
            vc.src_host = v.value("src", "");
            vc.dst_host = v.value("dst", "");
            if (v.contains("params")) parse_params(v["params"], path + ".params", vc.params);
            if (v.contains("traffic")) parse_traffic(v["traffic"], path + ".traffic", vc.traffic);
            cfg.topology.vcs.push_back(vc);
        }
        have_topology = true;
    }
    if (j.contains("source_overrides") && have_topology) {
        for (auto& vc : cfg.topology.vcs) {
            parse_params(j["source_overrides"], "source_overrides", vc.params);
        }
    }
    if (j.contains("traffic_overrides") && have_topology) {
        // Applied to every closed-loop client; used to vary the request size
        // of the single_client preset.
        const json& o = j["traffic_overrides"];
        for (auto& vc : cfg.topology.vcs) {
            if (vc.traffic.kind != TrafficKind::ClosedLoopClient) continue;
            auto& cl = vc.traffic.closed_loop;
            cl.request_cells =
                static_cast<std::int64_t>(get_num(o, "traffic_overrides", "request_cells",
                                                  static_cast<double>(cl.request_cells)));
            cl.response_cells =
                static_cast<std::int64_t>(get_num(o, "traffic_overrides", "response_cells",
                                                  static_cast<double>(cl.response_cells)));
            cl.inter_cycle_ns = ns_from_ms(get_num(o, "traffic_overrides", "inter_cycle_ms",
                                                   ms_from_ns(cl.inter_cycle_ns)));
        }
    }

    if (!have_topology) throw ConfigError("topology", "missing (set \"preset\" or \"topology\")");
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("<file>", "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ScenarioConfig& cfg) {
    json j;
    j["run_ms"] = ms_from_ns(cfg.run_ns);
    j["seed"] = cfg.seed;
    if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
    json pol;
    pol["kind"] = policy_kind_name(cfg.policy.kind);
    pol["time_based_floor"] = cfg.policy.time_based_floor == TimeBasedFloor::OptionA ? "a" : "b";
    pol["use_pr5"] = cfg.policy.use_pr5;
    pol["switch_aging"] = cfg.policy.switch_aging_enabled;
    pol["aging_alpha"] = cfg.policy.aging_alpha;
    pol["aging_delta"] = cfg.policy.aging_delta;
    j["policy"] = pol;
    json er;
    er["target_utilization"] = cfg.erica.target_utilization;
    er["interval_ms"] = ms_from_ns(cfg.erica.interval_ns);
    er["interval_cells"] = cfg.erica.interval_cells;
    er["smoothing_weight"] = cfg.erica.smoothing_weight;
    j["erica"] = er;
    json topo;
    topo["switches"] = cfg.topology.switches;
    topo["interswitch_km"] = cfg.topology.interswitch_km;
    topo["interswitch_mbps"] = cfg.topology.interswitch_mbps;
    json hosts = json::array();
    for (const auto& h : cfg.topology.hosts) {
        json hj;
        hj["name"] = h.name;
        hj["switch"] = h.switch_index;
        hj["link_km"] = h.link_km;
        hj["link_mbps"] = h.link_mbps;
        hosts.push_back(hj);
    }
    topo["hosts"] = hosts;
    json vcs = json::array();
    for (const auto& vc : cfg.topology.vcs) {
        json vj;
        vj["name"] = vc.name;
        vj["src"] = vc.src_host;
        vj["dst"] = vc.dst_host;
        vj["params"] = params_to_json(vc.params);
        vj["traffic"] = traffic_to_json(vc.traffic);
        vcs.push_back(vj);
    }
    topo["vcs"] = vcs;
    j["topology"] = topo;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Build

SourceEndSystem* Scenario::ses(const std::string& vc_name) {
    auto it = vc_ids.find(vc_name);
    return it == vc_ids.end() ? nullptr : ses_by_vc.at(it->second);
}

std::unique_ptr<Scenario> build_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    auto sc = std::make_unique<Scenario>();
    const TopologyDef& topo = cfg.topology;

    for (int i = 0; i < topo.switches; ++i) {
        std::string name = "sw" + std::to_string(i);
        sc->switches.push_back(std::make_unique<SwitchNode>(
            sc->trace, i, name, cfg.policy.switch_aging_enabled, cfg.policy.aging_alpha,
            cfg.policy.aging_delta));
        sc->trace.register_switch(i, name);
    }

    auto make_port = [&](std::int32_t owner_id, const std::string& owner_name,
                         const std::string& port_name, LinkParams link, CellSink* dest,
                         bool is_switch_port) -> Port* {
        std::int32_t port_id = static_cast<std::int32_t>(sc->ports.size());
        sc->ports.push_back(std::make_unique<Port>(sc->sim, sc->trace, owner_id, port_id, link,
                                                   dest, is_switch_port, cfg.erica));
        Port* p = sc->ports.back().get();
        p->set_traced(is_switch_port);
        if (is_switch_port) sc->trace.register_port(owner_id, port_id, port_name);
        sc->port_infos.push_back({p, owner_name, port_name, is_switch_port});
        return p;
    };

    // Inter-switch links, both directions.
    std::vector<Port*> fwd_chain(std::max(0, topo.switches - 1));
    std::vector<Port*> bwd_chain(std::max(0, topo.switches - 1));
    for (int i = 0; i + 1 < topo.switches; ++i) {
        LinkParams link{cps_from_mbps(topo.interswitch_mbps), topo.interswitch_km[i]};
        fwd_chain[i] = make_port(i, "sw" + std::to_string(i), "to_sw" + std::to_string(i + 1),
                                 link, sc->switches[i + 1].get(), true);
        bwd_chain[i] = make_port(i + 1, "sw" + std::to_string(i + 1), "to_sw" + std::to_string(i),
                                 link, sc->switches[i].get(), true);
    }
    if (!fwd_chain.empty()) sc->bottleneck_port = fwd_chain[0];

    // Hosts and their access links.
    struct HostWiring {
        HostNode* node;
        int switch_index;
        Port* uplink;    // host -> switch
        Port* downlink;  // switch -> host
    };
    std::map<std::string, HostWiring> host_map;
    for (std::size_t i = 0; i < topo.hosts.size(); ++i) {
        const HostDef& h = topo.hosts[i];
        sc->hosts.push_back(std::make_unique<HostNode>(h.name));
        HostNode* node = sc->hosts.back().get();
        LinkParams link{cps_from_mbps(h.link_mbps), h.link_km};
        Port* up = make_port(-1, h.name, "to_sw" + std::to_string(h.switch_index), link,
                             sc->switches[h.switch_index].get(), false);
        Port* down = make_port(h.switch_index, "sw" + std::to_string(h.switch_index),
                               "to_" + h.name, link, node, true);
        host_map[h.name] = HostWiring{node, h.switch_index, up, down};
    }

    // VCs: route along the switch chain, register per-switch forward and
    // backward output ports, create the end systems and traffic.
    for (std::size_t i = 0; i < topo.vcs.size(); ++i) {
        const VcDef& vc = topo.vcs[i];
        std::int32_t id = static_cast<std::int32_t>(i);
        sc->vc_ids[vc.name] = id;
        sc->trace.register_vc(id, vc.name);

        HostWiring& src = host_map.at(vc.src_host);
        HostWiring& dst = host_map.at(vc.dst_host);

        int a = src.switch_index;
        int b = dst.switch_index;
        int step = (b >= a) ? 1 : -1;
        for (int s = a; s != b + step; s += step) {
            Port* fwd_out;
            Port* bwd_out;
            if (s == b) {
                fwd_out = host_map.at(vc.dst_host).downlink;
            } else {
                fwd_out = (step == 1) ? fwd_chain[s] : bwd_chain[s - 1];
            }
            if (s == a) {
                bwd_out = src.downlink;
            } else {
                bwd_out = (step == 1) ? bwd_chain[s - 1] : fwd_chain[s];
            }
            sc->switches[s]->register_vc(id, fwd_out, bwd_out);
        }

        std::unique_ptr<TrafficModel> traffic;
        switch (vc.traffic.kind) {
            case TrafficKind::Greedy:
                traffic = std::make_unique<GreedyTraffic>();
                break;
            case TrafficKind::Bottleneck:
                traffic = std::make_unique<BottleneckTraffic>(vc.traffic.schedule);
                break;
            case TrafficKind::ClosedLoopClient: {
                auto client = std::make_unique<ClosedLoopClient>(sc->sim, sc->trace, id,
                                                                 vc.traffic.closed_loop);
                sc->clients_by_vc[id] = client.get();
                traffic = std::move(client);
                break;
            }
            case TrafficKind::ClosedLoopServer: {
                // The server mirrors the client's request/response sizes.
                ClosedLoopParams prm;
                for (const auto& other : topo.vcs) {
                    if (other.name == vc.traffic.peer_vc) prm = other.traffic.closed_loop;
                }
                traffic = std::make_unique<ClosedLoopServer>(sc->trace, id, prm);
                break;
            }
        }

        sc->sources.push_back(std::make_unique<SourceEndSystem>(
            sc->sim, sc->trace, id, vc.params, cfg.policy, src.uplink, traffic.get()));
        sc->ses_by_vc[id] = sc->sources.back().get();
        sc->traffics.push_back(std::move(traffic));

        sc->dests.push_back(std::make_unique<DestinationEndSystem>(id, dst.uplink));
        sc->des_by_vc[id] = sc->dests.back().get();
        src.node->add_ses(id, sc->sources.back().get());
        dst.node->add_des(id, sc->dests.back().get());
    }

    // Second pass: wire closed-loop callbacks now that every DES exists.
    for (std::size_t i = 0; i < topo.vcs.size(); ++i) {
        const VcDef& vc = topo.vcs[i];
        std::int32_t id = static_cast<std::int32_t>(i);
        if (vc.traffic.kind == TrafficKind::ClosedLoopClient) {
            ClosedLoopClient* client = sc->clients_by_vc.at(id);
            std::int32_t resp_id = sc->vc_ids.at(vc.traffic.peer_vc);
            // Replace the response VC's DES data hook with the client's counter.
            auto& des = sc->dests[resp_id];
            des = std::make_unique<DestinationEndSystem>(
                resp_id, host_map.at(topo.vcs[resp_id].dst_host).uplink,
                [client](SimTime t) { client->on_response_data(t); });
            sc->des_by_vc[resp_id] = des.get();
            host_map.at(topo.vcs[resp_id].dst_host).node->add_des(resp_id, des.get());
        }
        if (vc.traffic.kind == TrafficKind::ClosedLoopServer) {
            auto* server = dynamic_cast<ClosedLoopServer*>(sc->traffics[i].get());
            std::int32_t req_id = sc->vc_ids.at(vc.traffic.peer_vc);
            auto& des = sc->dests[req_id];
            des = std::make_unique<DestinationEndSystem>(
                req_id, host_map.at(topo.vcs[req_id].dst_host).uplink,
                [server](SimTime t) { server->on_request_data(t); });
            sc->des_by_vc[req_id] = des.get();
            host_map.at(topo.vcs[req_id].dst_host).node->add_des(req_id, des.get());
        }
    }

    return sc;
}

// ---------------------------------------------------------------------------
// Run + summary

MetricsSummary run_scenario(Scenario& sc, const ScenarioConfig& cfg) {
    for (auto& t : sc.traffics) t->start(sc.sim);
    sc.sim.run_until(cfg.run_ns);

    MetricsSummary sum;
    sum.run_ns = cfg.run_ns;
    sum.dispatched_events = sc.sim.dispatched_total();

    std::map<std::int32_t, std::vector<const BurstRecord*>> bursts;
    for (const auto& b : sc.trace.burst_records()) bursts[b.vc].push_back(&b);

    for (const auto& [name, id] : sc.vc_ids) {
        const SourceEndSystem* ses = sc.ses_by_vc.at(id);
        VcSummary v;
        v.name = name;
        v.mean_acr_cps = ses->mean_acr(cfg.run_ns);
        v.final_acr_cps = ses->acr();
        v.frm_sent = ses->frm_sent();
        v.data_sent = ses->data_sent();
        v.brm_received = ses->brm_received();
        auto it = bursts.find(id);
        if (it != bursts.end()) {
            v.burst_count = static_cast<std::int64_t>(it->second.size());
            double tp = 0, rt = 0;
            for (const BurstRecord* b : it->second) {
                tp += b->throughput_bps;
                rt += static_cast<double>(b->response_ns);
            }
            v.mean_burst_throughput_bps = tp / v.burst_count;
            v.mean_burst_response_ns = rt / v.burst_count;
        }
        sum.vcs.push_back(v);
    }

    for (const auto& info : sc.port_infos) {
        PortSummary p;
        p.owner = info.owner;
        p.name = info.name;
        p.max_qlen = info.port->max_qlen();
        p.final_qlen = info.port->qlen();
        p.enqueued = info.port->enqueued_total();
        p.dequeued = info.port->dequeued_total();
        p.utilization = info.port->utilization(cfg.run_ns);
        sum.ports.push_back(p);
    }

    if (!cfg.output_dir.empty()) {
        sc.trace.write_csvs(cfg.output_dir);
        std::ofstream f(std::filesystem::path(cfg.output_dir) / "summary.json", std::ios::binary);
        if (!f) throw std::runtime_error("cannot write summary.json under " + cfg.output_dir);
        f << sum.to_json_text();
    }
    return sum;
}

std::string MetricsSummary::to_json_text() const {
    json j;
    j["run_ns"] = run_ns;
    j["dispatched_events"] = dispatched_events;
    json vj;
    for (const auto& v : vcs) {
        json e;
        e["mean_acr_cps"] = v.mean_acr_cps;
        e["final_acr_cps"] = v.final_acr_cps;
        e["frm_sent"] = v.frm_sent;
        e["data_sent"] = v.data_sent;
        e["brm_received"] = v.brm_received;
        e["burst_count"] = v.burst_count;
        e["mean_burst_throughput_bps"] = v.mean_burst_throughput_bps;
        e["mean_burst_response_ns"] = v.mean_burst_response_ns;
        vj[v.name] = e;
    }
    j["vcs"] = vj;
    json pj;
    for (const auto& p : ports) {
        json e;
        e["max_qlen_cells"] = p.max_qlen;
        e["final_qlen_cells"] = p.final_qlen;
        e["enqueued"] = p.enqueued;
        e["dequeued"] = p.dequeued;
        e["utilization"] = p.utilization;
        pj[p.owner + "/" + p.name] = e;
    }
    j["ports"] = pj;
    return j.dump(2) + "\n";
}

}  // namespace abrsim
