#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nbundle/trajectory.hpp"

namespace nbundle {

/// Shortest decimal representation that round-trips a double exactly.
std::string format_double(double v);

/// Click-record columnar text format: `# key=value` header lines, then
/// `time,channel` rows with channel in {a, s}. Round-trips bit-exactly.
std::string serialize_click_record(const ClickRecord& rec);
ClickRecord parse_click_record(const std::string& text);

void write_click_record(const std::filesystem::path& path,
                        const ClickRecord& rec);
ClickRecord read_click_record(const std::filesystem::path& path);

/// CSV with `#`-prefixed header comments. Payloads are deterministic:
/// fixed column order, round-trip double formatting, no timestamps.
class CsvWriter {
public:
    CsvWriter(std::vector<std::string> columns,
              std::map<std::string, std::string> header_params);

    void add_row(const std::vector<std::string>& cells);
    void add_row(const std::vector<double>& cells);
    std::string str() const;
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> columns_;
    std::map<std::string, std::string> params_;
    std::vector<std::string> rows_;
};

/// FNV-1a 64-bit digest, fingerprint for manifest entries.
std::uint64_t fnv1a64(const std::string& bytes);

} // namespace nbundle
