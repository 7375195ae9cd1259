#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <deque>
#include <vector>

#include "padsteg/address.hpp"
#include "padsteg/bytes.hpp"
#include "padsteg/frame.hpp"
#include "padsteg/rng.hpp"

namespace padsteg {

/// Carrier-protocol identifier advertised by a hidden node. Nonzero.
class CarrierProtocolId {
public:
    static constexpr std::uint8_t kTcp = 1;
    static constexpr std::uint8_t kArp = 2;
    static constexpr std::uint8_t kIcmp = 3;
    static constexpr std::uint8_t kUdp = 4;

    /// Throws ConfigError for 0.
    explicit CarrierProtocolId(std::uint8_t pid);

    static CarrierProtocolId tcp() { return CarrierProtocolId{kTcp}; }
    static CarrierProtocolId arp() { return CarrierProtocolId{kArp}; }
    static CarrierProtocolId icmp() { return CarrierProtocolId{kIcmp}; }
    static CarrierProtocolId udp() { return CarrierProtocolId{kUdp}; }

    std::uint8_t value() const { return pid_; }

    /// Default assignment TCP=1, ARP=2, ICMP=3, UDP=4; none for other ids.
    std::optional<Carrier> carrier() const;
    static std::optional<CarrierProtocolId> for_carrier(Carrier c);

    auto operator<=>(const CarrierProtocolId&) const = default;

private:
    std::uint8_t pid_;
};

/// Most likely carriers first.
std::vector<CarrierProtocolId> default_pid_order();

/// Padding bytes available in a data frame of the carrier as generated by
/// hidden nodes: 6 for a pure TCP ACK, 18 for ARP and empty ICMP/UDP.
std::size_t carrier_chunk_length(CarrierProtocolId pid);

struct HashFunction {
    std::string name;
    std::size_t digest_len = 0;
    std::function<Bytes(ByteView)> digest;
};

HashFunction md5_hash();

inline constexpr std::size_t kAdvertLen = 18;

struct AdvertisingSequence {
    std::uint16_t rd = 0;
    std::array<std::uint8_t, 16> hash{};

    /// rd big-endian followed by the hash.
    Bytes serialize() const;
    bool operator==(const AdvertisingSequence&) const = default;
};

/// Hash preimage: pid (1 byte) || rd (2 bytes, big-endian) || mac (6 bytes).
Bytes advert_preimage(CarrierProtocolId pid, std::uint16_t rd, const MacAddress& src_mac);

/// Throws ConfigError for rd == 0 or a hash whose digest is not 16 bytes.
AdvertisingSequence build_advertising_sequence(CarrierProtocolId pid, std::uint16_t rd,
                                               const MacAddress& src_mac,
                                               const HashFunction& h = md5_hash());

/// Tries each pid of `pid_order` in turn and returns the first that
/// reproduces the hash. All-zero padding or rd == 0 yields none without any
/// hash evaluation. Throws StructuralError if padding is not 18 bytes.
std::optional<CarrierProtocolId> verify_advertisement(ByteView padding, const MacAddress& src_mac,
                                                      std::span<const CarrierProtocolId> pid_order,
                                                      const HashFunction& h = md5_hash());

inline const Bytes kCrlf{0x0d, 0x0a};

using StegoChunk = Bytes;

/// True iff the first occurrence of `terminator` in message || terminator
/// is the appended one.
bool terminator_frames_cleanly(ByteView message, ByteView terminator);

/// Splits message || terminator into chunk_len pieces; the last piece is
/// topped up with random nonzero filler. Throws StructuralError if the
/// terminator occurs inside the message or chunk_len is 0.
std::vector<StegoChunk> chunk_message(ByteView message, std::size_t chunk_len,
                                      ByteView terminator, Rng& filler_rng);

/// Message bytes before the first terminator; none if it has not arrived.
std::optional<Bytes> reassemble(std::span<const StegoChunk> chunks, ByteView terminator);

/// Incremental reassembly of a chunk stream that may carry several
/// messages; bytes after a terminator in the same chunk are filler.
class Reassembler {
public:
    explicit Reassembler(Bytes terminator = kCrlf) : terminator_(std::move(terminator)) {}

    /// Returns a completed message when this chunk carries its terminator.
    std::optional<Bytes> push(ByteView chunk);
    std::size_t buffered() const { return buffer_.size(); }

private:
    Bytes terminator_;
    Bytes buffer_;
};

/// Outbound message queue toward one peer; chunks are cut at send time so a
/// carrier change between chunks takes effect immediately.
class StegoStream {
public:
    explicit StegoStream(Bytes terminator = kCrlf) : terminator_(std::move(terminator)) {}

    /// Throws StructuralError when the terminator occurs in the message.
    void enqueue(ByteView message);
    bool empty() const { return pending_.empty(); }
    /// Chunks remaining if everything were sent with chunk_len pieces.
    std::size_t chunks_remaining(std::size_t chunk_len) const;
    std::size_t bytes_remaining() const;
    StegoChunk next_chunk(std::size_t chunk_len, Rng& filler_rng);

private:
    Bytes terminator_;
    std::deque<Bytes> pending_;  // each entry: message || terminator
    std::size_t offset_ = 0;      // into pending_.front()
};

}  // namespace padsteg
