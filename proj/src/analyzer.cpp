#include "padsteg/analyzer.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "padsteg/arp.hpp"
#include "padsteg/error.hpp"
#include "padsteg/hidden_node.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace padsteg {

std::optional<FrameClass> classify_frame(ByteView bytes) {
    EthernetFrame f;
    try {
        f = decode_frame(bytes);
    } catch (const Error&) {
        return std::nullopt;
    }
    FrameClass c;
    c.carrier = classify_carrier(f);
    c.boundary_unknown = f.boundary_unknown;
    c.padded = !f.padding.empty();
    c.improper = c.padded && !all_zero(f.padding);
    if (c.improper) c.pattern = classify_padding(f.padding);
    return c;
}

namespace {

DayIndex day_of(std::int64_t ts_micros) {
    const std::int64_t day = kSecondsPerDay * kMicrosPerSecond;
    return ts_micros >= 0 ? ts_micros / day : -((-ts_micros + day - 1) / day);
}

}  // namespace

void TraceStats::add(std::int64_t ts_micros, ByteView frame) {
    ++total_frames;
    const DayIndex day = day_of(ts_micros);
    first_day = first_day ? std::min(*first_day, day) : day;
    last_day = last_day ? std::max(*last_day, day) : day;
    if (frame.size() < kEthernetHeaderLen) {
        ++runt_frames;
        return;
    }
    HostCounts& host = per_host[MacAddress::from_bytes(frame, 6)];
    ++host.emitted;

    auto c = classify_frame(frame);
    if (!c) {
        ++undecodable_frames;
        return;
    }
    if (c->boundary_unknown) ++boundary_unknown;
    if (c->carrier == Carrier::ARP) {
        ArpPacket arp = decode_arp(frame.subspan(kEthernetHeaderLen, kArpPacketLen));
        if (arp.is_gratuitous())
            ++arp_ops.gratuitous;
        else if (arp.is_request())
            ++arp_ops.request;
        else if (arp.is_reply())
            ++arp_ops.reply;
        else
            ++arp_ops.non_standard;
    }
    if (!c->padded) return;
    ++padded_frames;
    ++host.padded;
    auto& proto = per_protocol[c->carrier];
    ++proto.padded;
    if (!c->improper) return;
    ++improper_frames;
    ++host.improper;
    ++proto.improper;
    ++pattern_histogram[*c->pattern];
    ++daily_improper[day][c->carrier];
}

TraceStats& TraceStats::merge(const TraceStats& o) {
    total_frames += o.total_frames;
    padded_frames += o.padded_frames;
    improper_frames += o.improper_frames;
    undecodable_frames += o.undecodable_frames;
    runt_frames += o.runt_frames;
    boundary_unknown += o.boundary_unknown;
    for (const auto& [c, n] : o.per_protocol) {
        auto& mine = per_protocol[c];
        mine.padded += n.padded;
        mine.improper += n.improper;
    }
    for (const auto& [mac, n] : o.per_host) {
        auto& mine = per_host[mac];
        mine.emitted += n.emitted;
        mine.padded += n.padded;
        mine.improper += n.improper;
    }
    arp_ops.request += o.arp_ops.request;
    arp_ops.reply += o.arp_ops.reply;
    arp_ops.gratuitous += o.arp_ops.gratuitous;
    arp_ops.non_standard += o.arp_ops.non_standard;
    for (const auto& [p, n] : o.pattern_histogram) pattern_histogram[p] += n;
    for (const auto& [day, per] : o.daily_improper)
        for (const auto& [c, n] : per) daily_improper[day][c] += n;
    if (o.first_day) first_day = first_day ? std::min(*first_day, *o.first_day) : o.first_day;
    if (o.last_day) last_day = last_day ? std::max(*last_day, *o.last_day) : o.last_day;
    return *this;
}

std::int64_t TraceStats::days_spanned() const {
    if (!first_day || !last_day) return 1;
    return *last_day - *first_day + 1;
}

bool TraceStats::consistent() const {
    if (improper_frames > padded_frames || padded_frames > total_frames) return false;
    std::uint64_t pp = 0, pi = 0, he = 0, hp = 0, hi = 0, pat = 0, daily = 0;
    for (const auto& [c, n] : per_protocol) {
        pp += n.padded;
        pi += n.improper;
    }
    for (const auto& [m, n] : per_host) {
        he += n.emitted;
        hp += n.padded;
        hi += n.improper;
    }
    for (const auto& [p, n] : pattern_histogram) pat += n;
    for (const auto& [d, per] : daily_improper)
        for (const auto& [c, n] : per) daily += n;
    return pp == padded_frames && pi == improper_frames && he + runt_frames == total_frames &&
           hp == padded_frames && hi == improper_frames && pat == improper_frames &&
           daily == improper_frames;
}

TraceStats compute_stats_serial(std::span<const PcapRecord> trace) {
    TraceStats s;
    for (const auto& r : trace) s.add(r.ts_micros, r.data);
    return s;
}

TraceStats compute_stats(std::span<const PcapRecord> trace) {
#ifdef _OPENMP
    const int threads = omp_get_max_threads();
    if (threads <= 1 || trace.size() < 1024) return compute_stats_serial(trace);
    std::vector<TraceStats> partial(static_cast<std::size_t>(threads));
    const auto n = static_cast<std::ptrdiff_t>(trace.size());
#pragma omp parallel num_threads(threads)
    {
        auto& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            const auto& r = trace[static_cast<std::size_t>(i)];
            mine.add(r.ts_micros, r.data);
        }
    }
    TraceStats total;
    for (const auto& p : partial) total.merge(p);
    return total;
#else
    return compute_stats_serial(trace);
#endif
}

TraceStats compute_stats(const std::filesystem::path& pcap) {
    PcapReader reader(pcap);
    TraceStats s;
    while (auto r = reader.next()) s.add(r->ts_micros, r->data);
    return s;
}

std::map<Carrier, double> default_padding_bits() {
    return {{Carrier::TCP, 48.0}, {Carrier::ARP, 144.0}, {Carrier::ICMP, 48.0}};
}

BandwidthEstimate estimate_bandwidth(const std::map<Carrier, std::vector<double>>& daily_counts,
                                     const std::map<Carrier, double>& padding_bits) {
    BandwidthEstimate est;
    std::optional<std::size_t> days;
    for (const auto& [carrier, counts] : daily_counts) {
        if (days && *days != counts.size())
            throw ConfigError("per-day count lists differ in length");
        days = counts.size();
    }
    if (days && *days < 2) throw ConfigError("bandwidth estimation needs at least 2 days");
    for (const auto& [carrier, counts] : daily_counts) {
        auto bits = padding_bits.find(carrier);
        if (bits == padding_bits.end())
            throw ConfigError("no bits-per-frame value for " + std::string(carrier_name(carrier)));
        const double n = static_cast<double>(counts.size());
        std::vector<double> rates;
        rates.reserve(counts.size());
        for (double c : counts) rates.push_back(c * bits->second / static_cast<double>(kSecondsPerDay));
        BandwidthRow row;
        row.mean = std::accumulate(rates.begin(), rates.end(), 0.0) / n;
        double ss = 0;
        for (double r : rates) ss += (r - row.mean) * (r - row.mean);
        row.std = std::sqrt(ss / (n - 1));
        row.standard_error = row.std / std::sqrt(n);
        est.per_carrier[carrier] = row;
        est.total_mean += row.mean;
    }
    return est;
}

std::map<Carrier, std::vector<double>> per_host_daily_counts(const TraceStats& stats) {
    std::size_t hosts = 0;
    for (const auto& [mac, h] : stats.per_host)
        if (h.improper > 0) ++hosts;
    std::map<Carrier, std::vector<double>> out;
    const auto days = static_cast<std::size_t>(stats.days_spanned());
    for (auto c : {Carrier::TCP, Carrier::ARP, Carrier::ICMP, Carrier::UDP}) {
        auto& v = out[c];
        v.assign(days, 0.0);
        if (hosts == 0 || !stats.first_day) continue;
        for (const auto& [day, per] : stats.daily_improper) {
            auto it = per.find(c);
            if (it != per.end())
                v[static_cast<std::size_t>(day - *stats.first_day)] =
                    static_cast<double>(it->second) / static_cast<double>(hosts);
        }
    }
    return out;
}

std::vector<OutlierMetrics> outlier_metrics(const TraceStats& stats) {
    std::vector<OutlierMetrics> out;
    const double days = static_cast<double>(stats.days_spanned());
    for (const auto& [mac, h] : stats.per_host) {
        if (h.padded == 0) continue;
        out.push_back({mac, static_cast<double>(h.improper) / static_cast<double>(h.padded),
                       static_cast<double>(h.improper) / days});
    }
    return out;
}

namespace {

struct MeanStd {
    double mean = 0;
    double std = 0;
};

template <typename F>
MeanStd mean_std(const std::vector<OutlierMetrics>& m, F field) {
    MeanStd r;
    for (const auto& x : m) r.mean += field(x);
    r.mean /= static_cast<double>(m.size());
    double ss = 0;
    for (const auto& x : m) ss += (field(x) - r.mean) * (field(x) - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(m.size() - 1));
    return r;
}

}  // namespace

std::vector<MacAddress> flag_outlier_hosts(const TraceStats& stats, double threshold_sigma) {
    auto metrics = outlier_metrics(stats);
    if (metrics.size() < 5)
        throw ConfigError("outlier detection needs at least 5 hosts with padded frames, got " +
                          std::to_string(metrics.size()));
    auto ratio = mean_std(metrics, [](const OutlierMetrics& m) { return m.improper_ratio; });
    auto volume = mean_std(metrics, [](const OutlierMetrics& m) { return m.daily_improper; });
    auto exceeds = [threshold_sigma](double x, const MeanStd& s) {
        return s.std > 0 && x - s.mean > threshold_sigma * s.std;
    };
    std::vector<MacAddress> flagged;
    for (const auto& m : metrics)
        if (exceeds(m.improper_ratio, ratio) || exceeds(m.daily_improper, volume))
            flagged.push_back(m.host);
    return flagged;
}

}  // namespace padsteg
