#pragma once

#include <optional>
#include <string_view>

#include "padsteg/bytes.hpp"
#include "padsteg/rng.hpp"

namespace padsteg {

// Observed classes of leaked padding content, checked in this order.
enum class PaddingPattern : std::uint8_t {
    Constant,        // exact known values, e.g. 0101050a74b6
    ConstantPrefix,  // known prefix, random tail, e.g. 80fca7a0...
    ZeroPrefix,      // leading zero bytes, random tail
    ZeroRun,         // nonzero start with a run of >= 3 zero bytes later on
    Random,          // fallback
};

inline constexpr PaddingPattern kAllPatterns[] = {
    PaddingPattern::Constant, PaddingPattern::ConstantPrefix, PaddingPattern::ZeroPrefix,
    PaddingPattern::ZeroRun, PaddingPattern::Random};
inline constexpr std::size_t kPatternCount = 5;

std::string_view pattern_name(PaddingPattern p);
std::optional<PaddingPattern> parse_pattern(std::string_view name);

/// Pattern of improper padding; none for empty or all-zero padding.
std::optional<PaddingPattern> classify_padding(ByteView padding);

/// Etherleak-looking padding of the requested class. Never all zero.
/// Classes without a template for `len` fall back to random content.
Bytes mimic_padding(std::size_t len, PaddingPattern pattern, Rng& rng);

}  // namespace padsteg
