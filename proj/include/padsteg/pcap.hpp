#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <vector>

#include "padsteg/bytes.hpp"

namespace padsteg {

inline constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4;
inline constexpr std::uint32_t kPcapMagicSwapped = 0xd4c3b2a1;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;
inline constexpr std::size_t kPcapGlobalHeaderLen = 24;
inline constexpr std::size_t kPcapRecordHeaderLen = 16;

struct PcapRecord {
    std::int64_t ts_micros = 0;  // since the Unix epoch
    Bytes data;
    std::uint32_t orig_len = 0;

    bool operator==(const PcapRecord&) const = default;
};

/// Classic (microsecond) pcap reader; either byte order.
class PcapReader {
public:
    /// Throws FormatError (I/O, magic) or UnsupportedError (link type).
    explicit PcapReader(const std::filesystem::path& path);

    /// Next record in file order; none at end of file. A truncated record
    /// ends iteration and bumps truncated().
    std::optional<PcapRecord> next();

    bool swapped() const { return swapped_; }
    std::uint32_t snaplen() const { return snaplen_; }
    std::size_t truncated() const { return truncated_; }

private:
    std::uint32_t read_u32(const std::uint8_t* p) const;

    std::ifstream in_;
    bool swapped_ = false;
    std::uint32_t snaplen_ = 0;
    std::size_t truncated_ = 0;
    bool done_ = false;
};

std::vector<PcapRecord> read_pcap(const std::filesystem::path& path);

/// Writes little-endian classic pcap, link type Ethernet.
class PcapWriter {
public:
    /// Throws FormatError if the file cannot be created.
    explicit PcapWriter(const std::filesystem::path& path, std::uint32_t snaplen = 65535);

    /// orig_len defaults to the frame size.
    void write(std::int64_t ts_micros, ByteView frame, std::optional<std::uint32_t> orig_len = {});
    void write(const PcapRecord& r) { write(r.ts_micros, r.data, r.orig_len); }
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::uint32_t snaplen_;
};

void write_pcap(const std::filesystem::path& path, const std::vector<PcapRecord>& records);

}  // namespace padsteg
