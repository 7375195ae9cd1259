#include "padsteg/pcap.hpp"

#include <array>
#include <string>

#include "padsteg/error.hpp"

namespace padsteg {

namespace {

std::uint32_t le32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

void put_le16(std::array<std::uint8_t, 24>& b, std::size_t off, std::uint16_t v) {
    b[off] = static_cast<std::uint8_t>(v);
    b[off + 1] = static_cast<std::uint8_t>(v >> 8);
}

template <std::size_t N>
void put_le32(std::array<std::uint8_t, N>& b, std::size_t off, std::uint32_t v) {
    for (std::size_t i = 0; i < 4; ++i) b[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

}  // namespace

PcapReader::PcapReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path.string());
    std::array<std::uint8_t, kPcapGlobalHeaderLen> hdr{};
    if (!in_.read(reinterpret_cast<char*>(hdr.data()), hdr.size()))
        throw FormatError(path.string() + ": missing pcap global header");
    std::uint32_t magic = le32(hdr.data());
    if (magic == kPcapMagic) {
        swapped_ = false;
    } else if (magic == kPcapMagicSwapped) {
        swapped_ = true;
    } else {
        throw FormatError(path.string() + ": bad pcap magic");
    }
    snaplen_ = read_u32(hdr.data() + 16);
    std::uint32_t linktype = read_u32(hdr.data() + 20);
    if (linktype != kLinkTypeEthernet)
        throw UnsupportedError(path.string() + ": unsupported link type " + std::to_string(linktype));
}

std::uint32_t PcapReader::read_u32(const std::uint8_t* p) const {
    std::uint32_t v = le32(p);
    return swapped_ ? __builtin_bswap32(v) : v;
}

std::optional<PcapRecord> PcapReader::next() {
    if (done_) return std::nullopt;
    std::array<std::uint8_t, kPcapRecordHeaderLen> hdr{};
    in_.read(reinterpret_cast<char*>(hdr.data()), hdr.size());
    if (in_.gcount() == 0) {
        done_ = true;
        return std::nullopt;
    }
    if (static_cast<std::size_t>(in_.gcount()) != hdr.size()) {
        done_ = true;
        ++truncated_;
        return std::nullopt;
    }
    PcapRecord r;
    std::uint32_t sec = read_u32(hdr.data());
    std::uint32_t usec = read_u32(hdr.data() + 4);
    std::uint32_t incl = read_u32(hdr.data() + 8);
    r.orig_len = read_u32(hdr.data() + 12);
    r.ts_micros = static_cast<std::int64_t>(sec) * 1'000'000 + usec;
    r.data.resize(incl);
    in_.read(reinterpret_cast<char*>(r.data.data()), incl);
    if (static_cast<std::uint32_t>(in_.gcount()) != incl) {
        done_ = true;
        ++truncated_;
        return std::nullopt;
    }
    return r;
}

std::vector<PcapRecord> read_pcap(const std::filesystem::path& path) {
    PcapReader reader(path);
    std::vector<PcapRecord> out;
    while (auto r = reader.next()) out.push_back(std::move(*r));
    return out;
}

PcapWriter::PcapWriter(const std::filesystem::path& path, std::uint32_t snaplen)
    : out_(path, std::ios::binary | std::ios::trunc), snaplen_(snaplen) {
    if (!out_) throw FormatError("cannot create " + path.string());
    std::array<std::uint8_t, kPcapGlobalHeaderLen> hdr{};
    put_le32(hdr, 0, kPcapMagic);
    put_le16(hdr, 4, 2);
    put_le16(hdr, 6, 4);
    put_le32(hdr, 16, snaplen_);
    put_le32(hdr, 20, kLinkTypeEthernet);
    out_.write(reinterpret_cast<const char*>(hdr.data()), hdr.size());
}

void PcapWriter::write(std::int64_t ts_micros, ByteView frame, std::optional<std::uint32_t> orig_len) {
    std::array<std::uint8_t, kPcapRecordHeaderLen> hdr{};
    const auto incl = static_cast<std::uint32_t>(std::min<std::size_t>(frame.size(), snaplen_));
    put_le32(hdr, 0, static_cast<std::uint32_t>(ts_micros / 1'000'000));
    put_le32(hdr, 4, static_cast<std::uint32_t>(ts_micros % 1'000'000));
    put_le32(hdr, 8, incl);
    put_le32(hdr, 12, orig_len.value_or(static_cast<std::uint32_t>(frame.size())));
    out_.write(reinterpret_cast<const char*>(hdr.data()), hdr.size());
    out_.write(reinterpret_cast<const char*>(frame.data()), incl);
    if (!out_) throw FormatError("pcap write failed");
}

void write_pcap(const std::filesystem::path& path, const std::vector<PcapRecord>& records) {
    PcapWriter w(path);
    for (const auto& r : records) w.write(r);
}

}  // namespace padsteg
