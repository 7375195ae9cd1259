#pragma once

#include <array>
#include <cstdint>

#include "padsteg/bytes.hpp"

namespace padsteg {

using Md5Digest = std::array<std::uint8_t, 16>;

// RFC 1321 MD5. Incremental use: update() any number of times, then finish().
class Md5 {
public:
    Md5() { reset(); }

    void reset();
    void update(ByteView data);
    Md5Digest finish();

    static Md5Digest digest(ByteView data) {
        Md5 h;
        h.update(data);
        return h.finish();
    }

private:
    void compress(const std::uint8_t* block);

    std::array<std::uint32_t, 4> state_{};
    std::array<std::uint8_t, 64> buffer_{};
    std::uint64_t length_ = 0;  // bytes processed
};

}  // namespace padsteg
