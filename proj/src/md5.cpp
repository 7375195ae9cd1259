#include "padsteg/md5.hpp"

#include <bit>
#include <cstring>

namespace padsteg {

namespace {

constexpr std::array<std::uint32_t, 64> kSine = {
    0xd76aa478, 0xe8c7b756, 0x242070db, 0xc1bdceee, 0xf57c0faf, 0x4787c62a, 0xa8304613,
    0xfd469501, 0x698098d8, 0x8b44f7af, 0xffff5bb1, 0x895cd7be, 0x6b901122, 0xfd987193,
    0xa679438e, 0x49b40821, 0xf61e2562, 0xc040b340, 0x265e5a51, 0xe9b6c7aa, 0xd62f105d,
    0x02441453, 0xd8a1e681, 0xe7d3fbc8, 0x21e1cde6, 0xc33707d6, 0xf4d50d87, 0x455a14ed,
    0xa9e3e905, 0xfcefa3f8, 0x676f02d9, 0x8d2a4c8a, 0xfffa3942, 0x8771f681, 0x6d9d6122,
    0xfde5380c, 0xa4beea44, 0x4bdecfa9, 0xf6bb4b60, 0xbebfbc70, 0x289b7ec6, 0xeaa127fa,
    0xd4ef3085, 0x04881d05, 0xd9d4d039, 0xe6db99e5, 0x1fa27cf8, 0xc4ac5665, 0xf4292244,
    0x432aff97, 0xab9423a7, 0xfc93a039, 0x655b59c3, 0x8f0ccc92, 0xffeff47d, 0x85845dd1,
    0x6fa87e4f, 0xfe2ce6e0, 0xa3014314, 0x4e0811a1, 0xf7537e82, 0xbd3af235, 0x2ad7d2bb,
    0xeb86d391};

constexpr std::array<int, 64> kShift = {7,  12, 17, 22, 7,  12, 17, 22, 7,  12, 17, 22, 7,
                                        12, 17, 22, 5,  9,  14, 20, 5,  9,  14, 20, 5,  9,
                                        14, 20, 5,  9,  14, 20, 4,  11, 16, 23, 4,  11, 16,
                                        23, 4,  11, 16, 23, 4,  11, 16, 23, 6,  10, 15, 21,
                                        6,  10, 15, 21, 6,  10, 15, 21, 6,  10, 15, 21};

std::uint32_t load_le32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

}  // namespace

void Md5::reset() {
    state_ = {0x67452301, 0xefcdab89, 0x98badcfe, 0x10325476};
    length_ = 0;
}

void Md5::compress(const std::uint8_t* block) {
    std::array<std::uint32_t, 16> m;
    for (std::size_t i = 0; i < 16; ++i) m[i] = load_le32(block + 4 * i);

    auto [a, b, c, d] = state_;
    for (std::uint32_t i = 0; i < 64; ++i) {
        std::uint32_t f;
        std::uint32_t g;
        if (i < 16) {
            f = (b & c) | (~b & d);
            g = i;
        } else if (i < 32) {
            f = (d & b) | (~d & c);
            g = (5 * i + 1) % 16;
        } else if (i < 48) {
            f = b ^ c ^ d;
            g = (3 * i + 5) % 16;
        } else {
            f = c ^ (b | ~d);
            g = (7 * i) % 16;
        }
        std::uint32_t tmp = d;
        d = c;
        c = b;
        b = b + std::rotl(a + f + kSine[i] + m[g], kShift[i]);
        a = tmp;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
}

void Md5::update(ByteView data) {
    std::size_t fill = length_ % 64;
    length_ += data.size();
    std::size_t pos = 0;
    if (fill != 0) {
        std::size_t take = std::min<std::size_t>(64 - fill, data.size());
        std::memcpy(buffer_.data() + fill, data.data(), take);
        pos = take;
        if (fill + take < 64) return;
        compress(buffer_.data());
    }
    for (; pos + 64 <= data.size(); pos += 64) compress(data.data() + pos);
    if (pos < data.size()) std::memcpy(buffer_.data(), data.data() + pos, data.size() - pos);
}

Md5Digest Md5::finish() {
    const std::uint64_t bit_len = length_ * 8;
    std::array<std::uint8_t, 72> pad{};
    pad[0] = 0x80;
    std::size_t fill = length_ % 64;
    std::size_t pad_len = (fill < 56 ? 56 - fill : 120 - fill);
    for (std::size_t i = 0; i < 8; ++i) pad[pad_len + i] = static_cast<std::uint8_t>(bit_len >> (8 * i));
    update(ByteView(pad.data(), pad_len + 8));

    Md5Digest out;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            out[4 * i + j] = static_cast<std::uint8_t>(state_[i] >> (8 * j));
    reset();
    return out;
}

}  // namespace padsteg
