#include "padsteg/stego.hpp"

#include <algorithm>
#include <string>

#include "padsteg/error.hpp"
#include "padsteg/md5.hpp"

namespace padsteg {

CarrierProtocolId::CarrierProtocolId(std::uint8_t pid) : pid_(pid) {
    if (pid == 0) throw ConfigError("carrier-protocol id must be nonzero");
}

std::optional<Carrier> CarrierProtocolId::carrier() const {
    switch (pid_) {
        case kTcp: return Carrier::TCP;
        case kArp: return Carrier::ARP;
        case kIcmp: return Carrier::ICMP;
        case kUdp: return Carrier::UDP;
        default: return std::nullopt;
    }
}

std::optional<CarrierProtocolId> CarrierProtocolId::for_carrier(Carrier c) {
    switch (c) {
        case Carrier::TCP: return tcp();
        case Carrier::ARP: return arp();
        case Carrier::ICMP: return icmp();
        case Carrier::UDP: return udp();
        case Carrier::Other: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<CarrierProtocolId> default_pid_order() {
    return {CarrierProtocolId::tcp(), CarrierProtocolId::arp(), CarrierProtocolId::icmp(),
            CarrierProtocolId::udp()};
}

std::size_t carrier_chunk_length(CarrierProtocolId pid) {
    switch (pid.value()) {
        case CarrierProtocolId::kTcp: return 6;
        case CarrierProtocolId::kArp:
        case CarrierProtocolId::kIcmp:
        case CarrierProtocolId::kUdp: return 18;
        default: throw ConfigError("no data carrier for pid " + std::to_string(pid.value()));
    }
}

HashFunction md5_hash() {
    return {"md5", 16, [](ByteView data) {
                auto d = Md5::digest(data);
                return Bytes(d.begin(), d.end());
            }};
}

Bytes AdvertisingSequence::serialize() const {
    Bytes out;
    out.reserve(kAdvertLen);
    append_be16(out, rd);
    out.insert(out.end(), hash.begin(), hash.end());
    return out;
}

Bytes advert_preimage(CarrierProtocolId pid, std::uint16_t rd, const MacAddress& src_mac) {
    Bytes pre;
    pre.reserve(9);
    pre.push_back(pid.value());
    append_be16(pre, rd);
    pre.insert(pre.end(), src_mac.octets.begin(), src_mac.octets.end());
    return pre;
}

AdvertisingSequence build_advertising_sequence(CarrierProtocolId pid, std::uint16_t rd,
                                               const MacAddress& src_mac, const HashFunction& h) {
    if (rd == 0) throw ConfigError("advertisement random number must be nonzero");
    if (h.digest_len != 16) throw ConfigError("advertisement hash must produce 16 bytes");
    Bytes digest = h.digest(advert_preimage(pid, rd, src_mac));
    if (digest.size() != 16) throw ConfigError("hash '" + h.name + "' returned wrong length");
    AdvertisingSequence a;
    a.rd = rd;
    std::copy(digest.begin(), digest.end(), a.hash.begin());
    return a;
}

std::optional<CarrierProtocolId> verify_advertisement(ByteView padding, const MacAddress& src_mac,
                                                      std::span<const CarrierProtocolId> pid_order,
                                                      const HashFunction& h) {
    if (padding.size() != kAdvertLen)
        throw StructuralError("advertising sequence must be 18 bytes, got " +
                              std::to_string(padding.size()));
    std::uint16_t rd = load_be16(padding, 0);
    if (rd == 0 || all_zero(padding)) return std::nullopt;
    auto received = padding.subspan(2);
    for (auto pid : pid_order) {
        Bytes digest = h.digest(advert_preimage(pid, rd, src_mac));
        if (std::equal(received.begin(), received.end(), digest.begin(), digest.end())) return pid;
    }
    return std::nullopt;
}

bool terminator_frames_cleanly(ByteView message, ByteView terminator) {
    if (terminator.empty()) return false;
    Bytes framed(message.begin(), message.end());
    framed.insert(framed.end(), terminator.begin(), terminator.end());
    auto it = std::search(framed.begin(), framed.end(), terminator.begin(), terminator.end());
    return static_cast<std::size_t>(it - framed.begin()) == message.size();
}

namespace {

void require_clean(ByteView message, ByteView terminator) {
    if (!terminator_frames_cleanly(message, terminator))
        throw StructuralError("terminator occurs inside the message");
}

}  // namespace

std::vector<StegoChunk> chunk_message(ByteView message, std::size_t chunk_len, ByteView terminator,
                                      Rng& filler_rng) {
    if (chunk_len == 0) throw StructuralError("chunk length must be positive");
    require_clean(message, terminator);
    Bytes framed(message.begin(), message.end());
    framed.insert(framed.end(), terminator.begin(), terminator.end());

    std::vector<StegoChunk> chunks;
    for (std::size_t off = 0; off < framed.size(); off += chunk_len) {
        std::size_t n = std::min(chunk_len, framed.size() - off);
        StegoChunk c(framed.begin() + static_cast<std::ptrdiff_t>(off),
                     framed.begin() + static_cast<std::ptrdiff_t>(off + n));
        while (c.size() < chunk_len) c.push_back(filler_rng.next_nonzero_byte());
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::optional<Bytes> reassemble(std::span<const StegoChunk> chunks, ByteView terminator) {
    Bytes all;
    for (const auto& c : chunks) all.insert(all.end(), c.begin(), c.end());
    auto it = std::search(all.begin(), all.end(), terminator.begin(), terminator.end());
    if (terminator.empty() || it == all.end()) return std::nullopt;
    return Bytes(all.begin(), it);
}

std::optional<Bytes> Reassembler::push(ByteView chunk) {
    if (terminator_.empty()) return std::nullopt;
    // The terminator may straddle the previous chunk boundary.
    std::size_t search_from = buffer_.size() >= terminator_.size() - 1
                                  ? buffer_.size() - (terminator_.size() - 1)
                                  : 0;
    buffer_.insert(buffer_.end(), chunk.begin(), chunk.end());
    auto start = buffer_.begin() + static_cast<std::ptrdiff_t>(search_from);
    auto it = std::search(start, buffer_.end(), terminator_.begin(), terminator_.end());
    if (it == buffer_.end()) return std::nullopt;
    Bytes message(buffer_.begin(), it);
    buffer_.clear();
    return message;
}

void StegoStream::enqueue(ByteView message) {
    require_clean(message, terminator_);
    Bytes framed(message.begin(), message.end());
    framed.insert(framed.end(), terminator_.begin(), terminator_.end());
    pending_.push_back(std::move(framed));
}

std::size_t StegoStream::bytes_remaining() const {
    std::size_t n = 0;
    for (const auto& m : pending_) n += m.size();
    return n - offset_;
}

std::size_t StegoStream::chunks_remaining(std::size_t chunk_len) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < pending_.size(); ++i) {
        std::size_t left = pending_[i].size() - (i == 0 ? offset_ : 0);
        n += (left + chunk_len - 1) / chunk_len;
    }
    return n;
}

StegoChunk StegoStream::next_chunk(std::size_t chunk_len, Rng& filler_rng) {
    if (pending_.empty()) return {};
    const Bytes& front = pending_.front();
    std::size_t n = std::min(chunk_len, front.size() - offset_);
    StegoChunk c(front.begin() + static_cast<std::ptrdiff_t>(offset_),
                 front.begin() + static_cast<std::ptrdiff_t>(offset_ + n));
    offset_ += n;
    if (offset_ == front.size()) {
        pending_.pop_front();
        offset_ = 0;
    }
    while (c.size() < chunk_len) c.push_back(filler_rng.next_nonzero_byte());
    return c;
}

}  // namespace padsteg
