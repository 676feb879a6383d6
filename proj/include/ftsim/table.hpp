#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace ftsim {

enum class TableKind { aggr_cwnd, write_tat, read_tat };

inline TableKind table_kind_of(const std::string& name) {
    if (name == "aggr_cwnd") return TableKind::aggr_cwnd;
    if (name == "write_tat") return TableKind::write_tat;
    if (name == "read_tat") return TableKind::read_tat;
    throw ConfigError("unknown table '" + name +
                      "' (expected aggr_cwnd, write_tat, or read_tat)");
}

namespace detail {

struct TableCell {
    double mean = 0;
    double sd = 0;
    double pct = 0;
    std::size_t runs = 0;  // seeds folded in
};

// Minimal reader for the comparison.csv this tool itself emits: columns
// are located by header name, so column insertions stay harmless.
struct ComparisonTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ConfigError("comparison csv: missing column '" + name + "'");
    }
};

inline ComparisonTable parse_comparison(const std::string& text) {
    ComparisonTable t;
    std::size_t start = 0;
    bool first = true;
    while (start < text.size()) {
        std::size_t eol = text.find('\n', start);
        if (eol == std::string::npos) eol = text.size();
        const std::string line = text.substr(start, eol - start);
        start = eol + 1;
        if (line.empty()) continue;
        std::vector<std::string> fields = split(line, ',');
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() != t.header.size())
                throw ConfigError("comparison csv: row has " +
                                  std::to_string(fields.size()) +
                                  " fields, header has " +
                                  std::to_string(t.header.size()));
            t.rows.push_back(std::move(fields));
        }
    }
    if (t.header.empty())
        throw ConfigError("comparison csv: missing header line");
    return t;
}

}  // namespace detail

// Seed-averaged mode comparison, one row per delay.  Values come from the
// stat triple selected by `kind`; rows lacking that stat (count zero) are
// skipped.  aggr_cwnd prints KB, the turnaround tables print ms.
inline std::string emit_table(const std::string& comparison_csv,
                              TableKind kind) {
    using detail::TableCell;
    const detail::ComparisonTable t =
        detail::parse_comparison(comparison_csv);

    const char* title = kind == TableKind::aggr_cwnd
                            ? "# aggregate congestion window, KB"
                        : kind == TableKind::write_tat
                            ? "# write turnaround, ms"
                            : "# read turnaround, ms";
    const char* stem = kind == TableKind::aggr_cwnd ? "aggr_cwnd"
                       : kind == TableKind::write_tat ? "write_tat"
                                                      : "read_tat";
    const double unit = kind == TableKind::aggr_cwnd ? 1024.0 : 1e6;
    const std::string mean_col =
        std::string(stem) +
        (kind == TableKind::aggr_cwnd ? "_mean_bytes" : "_mean_ns");
    const std::string sd_col =
        std::string(stem) +
        (kind == TableKind::aggr_cwnd ? "_sd_bytes" : "_sd_ns");
    const std::string pct_col = std::string(stem) + "_pct_sd";
    const std::string count_col =
        kind == TableKind::write_tat ? "write_count"
        : kind == TableKind::read_tat ? "read_count"
                                      : "";

    const std::size_t c_mode = t.col("mode");
    const std::size_t c_delay = t.col("delay_ms");
    const std::size_t c_mean = t.col(mean_col);
    const std::size_t c_sd = t.col(sd_col);
    const std::size_t c_pct = t.col(pct_col);
    const std::size_t c_count =
        count_col.empty() ? std::size_t(0) : t.col(count_col);

    std::map<std::uint32_t, std::map<std::string, TableCell>> grid;
    std::set<std::string> modes_seen;
    for (const std::vector<std::string>& row : t.rows) {
        if (!count_col.empty() && std::stoull(row[c_count]) == 0) continue;
        const std::uint32_t delay = std::uint32_t(std::stoul(row[c_delay]));
        TableCell& cell = grid[delay][row[c_mode]];
        cell.mean += std::stod(row[c_mean]);
        cell.sd += std::stod(row[c_sd]);
        cell.pct += std::stod(row[c_pct]);
        ++cell.runs;
        modes_seen.insert(row[c_mode]);
    }

    std::string out = std::string(title) + "\n";
    out += "Delay |           TCP            |        Fair-TCP\n";
    out += " (ms) |    Mean      SD     %SD  |    Mean      SD     %SD\n";
    out += "------+--------------------------+-------------------------\n";

    const bool have_std = modes_seen.count("standard") != 0;
    const bool have_fair = modes_seen.count("fair") != 0;
    char buf[64];
    auto triple = [&](const std::map<std::string, TableCell>& by_mode,
                      const char* mode, bool mode_present) -> std::string {
        if (!mode_present) return std::string(26, ' ');  // mode not in file
        auto it = by_mode.find(mode);
        if (it == by_mode.end() || it->second.runs == 0) {
            std::snprintf(buf, sizeof buf, " %7s %7s %7s  ", "-", "-", "-");
            return buf;
        }
        const TableCell& c = it->second;
        const double k = double(c.runs);
        std::snprintf(buf, sizeof buf, " %7.1f %7.1f %6.0f%%  ",
                      c.mean / k / unit, c.sd / k / unit, c.pct / k);
        return buf;
    };
    for (const auto& [delay, by_mode] : grid) {
        std::snprintf(buf, sizeof buf, "%5u |", delay);
        out += buf;
        out += triple(by_mode, "standard", have_std);
        out += "|";
        out += triple(by_mode, "fair", have_fair);
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += "\n";
    }
    return out;
}

}  // namespace ftsim
