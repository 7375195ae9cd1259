#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "padsteg/bytes.hpp"

namespace padsteg {

struct MacAddress {
    std::array<std::uint8_t, 6> octets{};

    static constexpr MacAddress broadcast() { return {{0xff, 0xff, 0xff, 0xff, 0xff, 0xff}}; }
    static constexpr MacAddress zero() { return {}; }

    /// Accepts "aa:bb:cc:dd:ee:ff" or "aa-bb-...". Throws FormatError.
    static MacAddress parse(std::string_view text);
    static MacAddress from_bytes(ByteView b, std::size_t off = 0);

    bool is_broadcast() const { return *this == broadcast(); }
    std::string to_string() const;

    auto operator<=>(const MacAddress&) const = default;
};

struct Ipv4Address {
    std::array<std::uint8_t, 4> octets{};

    static Ipv4Address parse(std::string_view text);
    static Ipv4Address from_bytes(ByteView b, std::size_t off = 0);
    static Ipv4Address from_u32(std::uint32_t v);

    std::uint32_t to_u32() const;
    std::string to_string() const;

    auto operator<=>(const Ipv4Address&) const = default;
};

}  // namespace padsteg
