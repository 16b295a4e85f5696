#include "chbsim/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chbsim/errors.hpp"

namespace chbsim {

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw numeric_error("failed to format value");
    return std::string(buf, ptr);
}

void write_csv(const std::filesystem::path& path, const Table& table) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file " + path.string());
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

void write_json_records(const std::filesystem::path& path, const Table& table) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json record;
        for (std::size_t i = 0; i < row.size() && i < table.header.size(); ++i) {
            // Numeric cells stay numeric in the JSON mirror.
            const char* begin = row[i].data();
            const char* end = begin + row[i].size();
            long long integer = 0;
            auto [iptr, iec] = std::from_chars(begin, end, integer);
            if (iec == std::errc{} && iptr == end) {
                record[table.header[i]] = integer;
                continue;
            }
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec == std::errc{} && ptr == end)
                record[table.header[i]] = value;
            else
                record[table.header[i]] = row[i];
        }
        records.push_back(std::move(record));
    }
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file " + path.string());
    out << records.dump(2) << '\n';
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const std::string& format, const Table& table) {
    std::filesystem::create_directories(dir);
    if (format == "json") {
        const auto path = dir / (stem + ".json");
        write_json_records(path, table);
        return path;
    }
    const auto path = dir / (stem + ".csv");
    write_csv(path, table);
    return path;
}

Table read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open " + path.string());
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

}  // namespace chbsim
