#include "padsteg/pattern.hpp"

#include <algorithm>
#include <array>

namespace padsteg {

namespace {

struct Template {
    std::size_t len;
    Bytes bytes;
};

const std::vector<Template>& constants() {
    static const std::vector<Template> kConstants = {
        {6, {0x01, 0x01, 0x05, 0x0a, 0x74, 0xb6}},
        {6, {0x20, 0x20, 0x20, 0x20, 0x20, 0x20}},
        {18, {0x80, 0xfc, 0xa7, 0xa0, 0x80, 0xfe, 0x88, 0xe0, 0xff, 0xff, 0xff, 0xff, 0xf0, 0x01,
              0x21, 0x79, 0xcf, 0xd5}},
    };
    return kConstants;
}

const std::vector<Template>& prefixes() {
    static const std::vector<Template> kPrefixes = {
        {6, {0x80}},
        {6, {0x47, 0x45, 0x54, 0x20, 0x2f}},  // "GET /"
        {18, {0x80, 0xfc, 0xa7, 0xa0}},
        {18, {0xa9, 0x6f}},
    };
    return kPrefixes;
}

// 6-byte paddings starting with a 0xc? nibble form their own prefix family.
bool c_nibble_prefix(ByteView p) { return p.size() == 6 && (p[0] >> 4) == 0xc; }

std::size_t zero_prefix_len(std::size_t len) {
    if (len == 6) return 2;
    if (len == 18) return 14;
    return len / 2;
}

bool has_zero_run(ByteView p) {
    if (p.empty() || p[0] == 0) return false;
    std::size_t run = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        run = p[i] == 0 ? run + 1 : 0;
        if (run >= 3) return true;
    }
    return false;
}

bool starts_with(ByteView p, const Bytes& prefix) {
    return p.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), p.begin());
}

void fill_random(Bytes& out, std::size_t from, Rng& rng) {
    for (std::size_t i = from; i < out.size(); ++i) out[i] = rng.next_byte();
}

Bytes random_nonzero(std::size_t len, Rng& rng) {
    Bytes out(len);
    do {
        fill_random(out, 0, rng);
    } while (all_zero(out));
    return out;
}

}  // namespace

std::string_view pattern_name(PaddingPattern p) {
    switch (p) {
        case PaddingPattern::Constant: return "constant";
        case PaddingPattern::ConstantPrefix: return "constant-prefix";
        case PaddingPattern::ZeroPrefix: return "zero-prefix";
        case PaddingPattern::ZeroRun: return "zero-run";
        case PaddingPattern::Random: return "random";
    }
    return "random";
}

std::optional<PaddingPattern> parse_pattern(std::string_view name) {
    for (auto p : kAllPatterns)
        if (pattern_name(p) == name) return p;
    return std::nullopt;
}

std::optional<PaddingPattern> classify_padding(ByteView padding) {
    if (padding.empty() || all_zero(padding)) return std::nullopt;
    for (const auto& t : constants())
        if (t.len == padding.size() && std::equal(t.bytes.begin(), t.bytes.end(), padding.begin()))
            return PaddingPattern::Constant;
    for (const auto& t : prefixes())
        if (t.len == padding.size() && starts_with(padding, t.bytes))
            return PaddingPattern::ConstantPrefix;
    if (c_nibble_prefix(padding)) return PaddingPattern::ConstantPrefix;
    std::size_t zp = zero_prefix_len(padding.size());
    if (zp > 0 && zp < padding.size() && all_zero(padding.first(zp)))
        return PaddingPattern::ZeroPrefix;
    if (has_zero_run(padding)) return PaddingPattern::ZeroRun;
    return PaddingPattern::Random;
}

namespace {

Bytes mimic_once(std::size_t len, PaddingPattern pattern, Rng& rng) {
    switch (pattern) {
        case PaddingPattern::Constant: {
            std::vector<const Template*> fits;
            for (const auto& t : constants())
                if (t.len == len) fits.push_back(&t);
            if (fits.empty()) break;
            return fits[rng.below(fits.size())]->bytes;
        }
        case PaddingPattern::ConstantPrefix: {
            std::vector<const Template*> fits;
            for (const auto& t : prefixes())
                if (t.len == len) fits.push_back(&t);
            if (fits.empty()) break;
            const Bytes& prefix = fits[rng.below(fits.size())]->bytes;
            Bytes out(len);
            std::copy(prefix.begin(), prefix.end(), out.begin());
            fill_random(out, prefix.size(), rng);
            return out;
        }
        case PaddingPattern::ZeroPrefix: {
            std::size_t zp = zero_prefix_len(len);
            if (zp == 0 || zp >= len) break;
            Bytes out(len, 0);
            Bytes tail = random_nonzero(len - zp, rng);
            std::copy(tail.begin(), tail.end(), out.begin() + static_cast<std::ptrdiff_t>(zp));
            return out;
        }
        case PaddingPattern::ZeroRun: {
            if (len < 4) break;
            Bytes out(len);
            fill_random(out, 0, rng);
            out[0] = rng.next_nonzero_byte();
            std::size_t at = 1 + rng.below(len - 3);
            std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(at), 3, 0);
            return out;
        }
        case PaddingPattern::Random: break;
    }
    return random_nonzero(len, rng);
}

}  // namespace

Bytes mimic_padding(std::size_t len, PaddingPattern pattern, Rng& rng) {
    if (len == 0) return {};
    // Random draws occasionally hit an earlier class (a 0x80 lead byte, a
    // zero prefix); redraw those.
    for (int attempt = 0; attempt < 64; ++attempt) {
        Bytes out = mimic_once(len, pattern, rng);
        if (classify_padding(out) == pattern) return out;
    }
    return mimic_once(len, pattern, rng);
}

}  // namespace padsteg
