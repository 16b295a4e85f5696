#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace chbsim {

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double value);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

void write_csv(const std::filesystem::path& path, const Table& table);

/// Same records as the CSV, as an array of objects keyed by the header.
void write_json_records(const std::filesystem::path& path, const Table& table);

/// Writes `table` in the requested format ("csv" or "json"); returns the path
/// actually written (extension follows the format).
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const std::string& format, const Table& table);

/// Minimal CSV reader for round-trips of our own output (no quoting or escapes).
Table read_csv(const std::filesystem::path& path);

}  // namespace chbsim
