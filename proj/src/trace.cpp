#include "abrsim/trace.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace abrsim {

const char* acr_event_name(AcrEvent e) {
    switch (e) {
        case AcrEvent::Frm: return "frm";
        case AcrEvent::Uili: return "uili";
        case AcrEvent::Brm: return "brm";
        case AcrEvent::Atdf: return "atdf";
    }
    return "?";
}

void TraceSink::register_vc(std::int32_t vc, std::string name) { vc_names_[vc] = std::move(name); }
void TraceSink::register_switch(std::int32_t sw, std::string name) { switch_names_[sw] = std::move(name); }
void TraceSink::register_port(std::int32_t sw, std::int32_t port, std::string name) {
    port_names_[{sw, port}] = std::move(name);
}

const std::string& TraceSink::vc_name(std::int32_t vc) const {
    static const std::string unknown = "?";
    auto it = vc_names_.find(vc);
    return it == vc_names_.end() ? unknown : it->second;
}

const std::string& TraceSink::switch_name(std::int32_t sw) const {
    static const std::string unknown = "?";
    auto it = switch_names_.find(sw);
    return it == switch_names_.end() ? unknown : it->second;
}

const std::string& TraceSink::port_name(std::int32_t sw, std::int32_t port) const {
    static const std::string unknown = "?";
    auto it = port_names_.find({sw, port});
    return it == port_names_.end() ? unknown : it->second;
}

namespace {

void append_rate(std::string& out, double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    out += buf;
}

}  // namespace

std::string TraceSink::acr_csv() const {
    std::string out = "time_ns,vc,acr_cps,sr_cps,region,event\n";
    for (const auto& r : acr_) {
        out += std::to_string(r.t);
        out += ',';
        out += vc_name(r.vc);
        out += ',';
        append_rate(out, r.acr_cps);
        out += ',';
        append_rate(out, r.sr_cps);
        out += ',';
        if (r.region == '-') {
            out += "n/a";
        } else {
            out += r.region;
        }
        out += ',';
        out += acr_event_name(r.event);
        out += '\n';
    }
    return out;
}

std::string TraceSink::queue_csv() const {
    std::string out = "time_ns,switch,port,qlen_cells\n";
    for (const auto& r : queue_) {
        out += std::to_string(r.t);
        out += ',';
        out += switch_name(r.switch_id);
        out += ',';
        out += port_name(r.switch_id, r.port_id);
        out += ',';
        out += std::to_string(r.qlen);
        out += '\n';
    }
    return out;
}

std::string TraceSink::burst_csv() const {
    std::string out = "vc,burst_index,size_cells,start_ns,end_ns,response_ns,throughput_bps\n";
    for (const auto& b : bursts_) {
        out += vc_name(b.vc);
        out += ',';
        out += std::to_string(b.burst_index);
        out += ',';
        out += std::to_string(b.size_cells);
        out += ',';
        out += std::to_string(b.first_cell_at);
        out += ',';
        out += std::to_string(b.last_cell_at);
        out += ',';
        out += std::to_string(b.response_ns);
        out += ',';
        append_rate(out, b.throughput_bps);
        out += '\n';
    }
    return out;
}

void TraceSink::write_csvs(const std::string& dir) const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + name + " under " + dir);
        f << body;
    };
    write("acr_trace.csv", acr_csv());
    write("queue_trace.csv", queue_csv());
    write("burst_records.csv", burst_csv());
}

}  // namespace abrsim
