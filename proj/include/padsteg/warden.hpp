#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <vector>

#include "padsteg/bytes.hpp"

namespace padsteg {

struct WardenReport {
    std::uint64_t frames_seen = 0;
    std::uint64_t frames_modified = 0;
    std::uint64_t bytes_zeroed = 0;  // nonzero padding bytes rewritten
    std::uint64_t boundary_unknown = 0;

    WardenReport& operator+=(const WardenReport& o);
    bool operator==(const WardenReport&) const = default;
};

struct SanitizeResult {
    Bytes bytes;
    bool modified = false;
    bool boundary_unknown = false;
    std::uint64_t bytes_zeroed = 0;
};

/// Zeroes the padding of a frame with a known padding boundary. Undecodable
/// frames and frames without nonzero padding pass through unchanged.
SanitizeResult sanitize_frame(ByteView bytes);

/// In-place batch sanitization. The serial version is the reference for the
/// OpenMP one; both produce identical frames and reports.
WardenReport sanitize_batch_serial(std::vector<Bytes>& frames);
WardenReport sanitize_batch(std::vector<Bytes>& frames);

/// Streams in -> out, preserving timestamps and order. Propagates read errors.
WardenReport sanitize_pcap(const std::filesystem::path& in, const std::filesystem::path& out);

/// Warden placed on the simulator's delivery path.
class InlineWarden {
public:
    InlineWarden() : report_(std::make_shared<WardenReport>()) {}

    /// Transformer for Simulator::set_transformer; shares this warden's report.
    std::function<Bytes(ByteView)> transformer() const;
    const WardenReport& report() const { return *report_; }

private:
    std::shared_ptr<WardenReport> report_;
};

}  // namespace padsteg
