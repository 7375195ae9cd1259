#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "padsteg/address.hpp"
#include "padsteg/bytes.hpp"
#include "padsteg/frame.hpp"
#include "padsteg/pattern.hpp"
#include "padsteg/pcap.hpp"

namespace padsteg {

struct FrameClass {
    Carrier carrier = Carrier::Other;
    bool padded = false;
    bool improper = false;
    bool boundary_unknown = false;
    std::optional<PaddingPattern> pattern;
};

/// Undecodable bytes yield none.
std::optional<FrameClass> classify_frame(ByteView bytes);

struct PaddingCounts {
    std::uint64_t padded = 0;
    std::uint64_t improper = 0;
    bool operator==(const PaddingCounts&) const = default;
};

struct HostCounts {
    std::uint64_t emitted = 0;
    std::uint64_t padded = 0;
    std::uint64_t improper = 0;
    bool operator==(const HostCounts&) const = default;
};

struct ArpOpCounts {
    std::uint64_t request = 0;  // excluding gratuitous
    std::uint64_t reply = 0;
    std::uint64_t gratuitous = 0;
    std::uint64_t non_standard = 0;
    bool operator==(const ArpOpCounts&) const = default;
};

using DayIndex = std::int64_t;

struct TraceStats {
    std::uint64_t total_frames = 0;
    std::uint64_t padded_frames = 0;
    std::uint64_t improper_frames = 0;
    std::uint64_t undecodable_frames = 0;  // counted in total only
    std::uint64_t runt_frames = 0;         // shorter than an Ethernet header; no host
    std::uint64_t boundary_unknown = 0;
    std::map<Carrier, PaddingCounts> per_protocol;
    std::map<MacAddress, HostCounts> per_host;
    ArpOpCounts arp_ops;
    std::map<PaddingPattern, std::uint64_t> pattern_histogram;
    // Improper frames per 86400 s bin since the Unix epoch, by carrier.
    std::map<DayIndex, std::map<Carrier, std::uint64_t>> daily_improper;
    std::optional<DayIndex> first_day;
    std::optional<DayIndex> last_day;

    void add(std::int64_t ts_micros, ByteView frame);
    /// Associative and commutative.
    TraceStats& merge(const TraceStats& other);
    /// Days spanned from the first to the last frame (at least 1).
    std::int64_t days_spanned() const;
    /// Checks the count-sum invariants.
    bool consistent() const;

    bool operator==(const TraceStats&) const = default;
};

TraceStats compute_stats_serial(std::span<const PcapRecord> trace);
/// OpenMP shard-and-merge over the trace; equal to the serial result.
TraceStats compute_stats(std::span<const PcapRecord> trace);
/// Streams a pcap file.
TraceStats compute_stats(const std::filesystem::path& pcap);

struct BandwidthRow {
    double mean = 0;  // bit/s
    double std = 0;   // sample standard deviation, n-1 divisor
    double standard_error = 0;
};

struct BandwidthEstimate {
    std::map<Carrier, BandwidthRow> per_carrier;
    double total_mean = 0;
};

/// Per-day rate = count * bits / 86400. Throws ConfigError when lists differ
/// in length, have fewer than 2 days, or a carrier lacks a bit count.
BandwidthEstimate estimate_bandwidth(const std::map<Carrier, std::vector<double>>& daily_counts,
                                     const std::map<Carrier, double>& padding_bits);

/// Stego bits per frame from the nominal padding sizes (6/18/6 bytes).
std::map<Carrier, double> default_padding_bits();

/// Per improper-emitting host daily improper counts by carrier, over the
/// spanned days (missing days count as zero).
std::map<Carrier, std::vector<double>> per_host_daily_counts(const TraceStats& stats);

struct OutlierMetrics {
    MacAddress host;
    double improper_ratio = 0;
    double daily_improper = 0;
};

/// Hosts whose improper/padded ratio or daily improper volume exceeds the
/// population mean by more than threshold_sigma sample standard deviations.
/// Population: hosts with padded frames; throws ConfigError below 5.
std::vector<MacAddress> flag_outlier_hosts(const TraceStats& stats, double threshold_sigma);
std::vector<OutlierMetrics> outlier_metrics(const TraceStats& stats);

}  // namespace padsteg
