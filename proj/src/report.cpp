#include "padsteg/report.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "padsteg/error.hpp"

namespace padsteg {

void KeyValueReport::set(std::string key, std::string value) {
    if (auto it = index_.find(key); it != index_.end()) {
        entries_[it->second].second = std::move(value);
        return;
    }
    index_.emplace(key, entries_.size());
    entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValueReport::set(std::string key, std::uint64_t value) { set(std::move(key), std::to_string(value)); }
void KeyValueReport::set(std::string key, std::int64_t value) { set(std::move(key), std::to_string(value)); }
void KeyValueReport::set(std::string key, double value) { set(std::move(key), format_number(value)); }
void KeyValueReport::set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }

const std::string* KeyValueReport::get(std::string_view key) const {
    auto it = index_.find(key);
    return it == index_.end() ? nullptr : &entries_[it->second].second;
}

void KeyValueReport::write(std::ostream& os) const {
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
}

void KeyValueReport::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write(out);
    if (!out) throw Error("write to " + path.string() + " failed");
}

namespace {
std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}
}  // namespace

KeyValueReport KeyValueReport::parse(std::istream& is) {
    KeyValueReport r;
    std::string line;
    while (std::getline(is, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError("missing '=' in report line: " + t);
        r.set(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
    }
    return r;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string escape_text(ByteView bytes) {
    std::string out;
    for (auto b : bytes) {
        if (b >= 0x20 && b < 0x7f && b != '\\') {
            out.push_back(static_cast<char>(b));
        } else {
            char buf[5];
            std::snprintf(buf, sizeof buf, "\\x%02x", b);
            out += buf;
        }
    }
    return out;
}

void add_trace_stats(KeyValueReport& r, const TraceStats& s) {
    r.set("total_frames", s.total_frames);
    r.set("padded_frames", s.padded_frames);
    r.set("improper_frames", s.improper_frames);
    r.set("undecodable_frames", s.undecodable_frames);
    r.set("runt_frames", s.runt_frames);
    r.set("boundary_unknown_frames", s.boundary_unknown);
    r.set("days_spanned", s.total_frames ? s.days_spanned() : std::int64_t{0});
    for (Carrier c : kAllCarriers) {
        PaddingCounts pc;
        if (auto it = s.per_protocol.find(c); it != s.per_protocol.end()) pc = it->second;
        const std::string base = "protocol." + std::string(carrier_name(c));
        r.set(base + ".padded", pc.padded);
        r.set(base + ".improper", pc.improper);
        r.set(base + ".improper_share",
              s.improper_frames ? static_cast<double>(pc.improper) / static_cast<double>(s.improper_frames) : 0.0);
    }
    r.set("arp.request", s.arp_ops.request);
    r.set("arp.reply", s.arp_ops.reply);
    r.set("arp.gratuitous", s.arp_ops.gratuitous);
    r.set("arp.non_standard", s.arp_ops.non_standard);
    for (PaddingPattern p : kAllPatterns) {
        auto it = s.pattern_histogram.find(p);
        r.set("pattern." + std::string(pattern_name(p)), it == s.pattern_histogram.end() ? std::uint64_t{0} : it->second);
    }
    r.set("hosts", static_cast<std::uint64_t>(s.per_host.size()));
    for (const auto& [mac, h] : s.per_host) {
        const std::string base = "host." + mac.to_string();
        r.set(base + ".emitted", h.emitted);
        r.set(base + ".padded", h.padded);
        r.set(base + ".improper", h.improper);
    }
}

void add_bandwidth(KeyValueReport& r, const BandwidthEstimate& e) {
    for (const auto& [c, row] : e.per_carrier) {
        const std::string base = "bandwidth." + std::string(carrier_name(c));
        r.set(base + ".mean", row.mean);
        r.set(base + ".std", row.std);
        r.set(base + ".standard_error", row.standard_error);
    }
    r.set("bandwidth.total_mean", e.total_mean);
}

void add_warden(KeyValueReport& r, const WardenReport& w) {
    r.set("warden.frames_seen", w.frames_seen);
    r.set("warden.frames_modified", w.frames_modified);
    r.set("warden.bytes_zeroed", w.bytes_zeroed);
    r.set("warden.boundary_unknown", w.boundary_unknown);
}

}  // namespace padsteg
