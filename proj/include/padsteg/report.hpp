#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "padsteg/analyzer.hpp"
#include "padsteg/bytes.hpp"
#include "padsteg/warden.hpp"

namespace padsteg {

/// Ordered `key = value` summary shared by the simulate, analyze and warden
/// commands. Keys are written in insertion order; setting a key twice
/// replaces the value in place.
class KeyValueReport {
public:
    void set(std::string key, std::string value);
    void set(std::string key, std::uint64_t value);
    void set(std::string key, std::int64_t value);
    void set(std::string key, int value) { set(std::move(key), static_cast<std::int64_t>(value)); }
    void set(std::string key, double value);
    void set(std::string key, bool value);

    const std::string* get(std::string_view key) const;
    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    void write(std::ostream& os) const;
    /// Throws Error when the file cannot be written.
    void save(const std::filesystem::path& path) const;

    /// Inverse of write. Blank lines and lines starting with '#' are skipped.
    static KeyValueReport parse(std::istream& is);

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

std::string format_number(double v);
/// Printable ASCII passes through; everything else becomes \xHH.
std::string escape_text(ByteView bytes);

void add_trace_stats(KeyValueReport& r, const TraceStats& s);
void add_bandwidth(KeyValueReport& r, const BandwidthEstimate& e);
void add_warden(KeyValueReport& r, const WardenReport& w);

}  // namespace padsteg
