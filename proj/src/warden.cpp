#include "padsteg/warden.hpp"

#include "padsteg/error.hpp"
#include "padsteg/frame.hpp"
#include "padsteg/pcap.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace padsteg {

WardenReport& WardenReport::operator+=(const WardenReport& o) {
    frames_seen += o.frames_seen;
    frames_modified += o.frames_modified;
    bytes_zeroed += o.bytes_zeroed;
    boundary_unknown += o.boundary_unknown;
    return *this;
}

SanitizeResult sanitize_frame(ByteView bytes) {
    SanitizeResult r;
    r.bytes.assign(bytes.begin(), bytes.end());
    EthernetFrame f;
    try {
        f = decode_frame(bytes);
    } catch (const Error&) {
        return r;
    }
    if (f.boundary_unknown) {
        r.boundary_unknown = true;
        return r;
    }
    const std::size_t pad_start = bytes.size() - f.padding.size();
    for (std::size_t i = pad_start; i < r.bytes.size(); ++i) {
        if (r.bytes[i] != 0) {
            r.bytes[i] = 0;
            ++r.bytes_zeroed;
        }
    }
    r.modified = r.bytes_zeroed > 0;
    return r;
}

namespace {

void tally(WardenReport& rep, const SanitizeResult& r) {
    ++rep.frames_seen;
    if (r.modified) ++rep.frames_modified;
    if (r.boundary_unknown) ++rep.boundary_unknown;
    rep.bytes_zeroed += r.bytes_zeroed;
}

}  // namespace

WardenReport sanitize_batch_serial(std::vector<Bytes>& frames) {
    WardenReport rep;
    for (auto& frame : frames) {
        auto r = sanitize_frame(frame);
        tally(rep, r);
        frame = std::move(r.bytes);
    }
    return rep;
}

WardenReport sanitize_batch(std::vector<Bytes>& frames) {
    std::uint64_t seen = 0, modified = 0, zeroed = 0, unknown = 0;
    const auto n = static_cast<std::ptrdiff_t>(frames.size());
#pragma omp parallel for schedule(static) reduction(+ : seen, modified, zeroed, unknown)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        auto r = sanitize_frame(frames[static_cast<std::size_t>(i)]);
        ++seen;
        modified += r.modified ? 1 : 0;
        unknown += r.boundary_unknown ? 1 : 0;
        zeroed += r.bytes_zeroed;
        frames[static_cast<std::size_t>(i)] = std::move(r.bytes);
    }
    return {seen, modified, zeroed, unknown};
}

WardenReport sanitize_pcap(const std::filesystem::path& in, const std::filesystem::path& out) {
    PcapReader reader(in);
    PcapWriter writer(out, reader.snaplen() == 0 ? 65535 : reader.snaplen());
    WardenReport rep;
    while (auto rec = reader.next()) {
        auto r = sanitize_frame(rec->data);
        tally(rep, r);
        writer.write(rec->ts_micros, r.bytes, rec->orig_len);
    }
    writer.flush();
    return rep;
}

std::function<Bytes(ByteView)> InlineWarden::transformer() const {
    return [report = report_](ByteView frame) {
        auto r = sanitize_frame(frame);
        tally(*report, r);
        return std::move(r.bytes);
    };
}

}  // namespace padsteg
