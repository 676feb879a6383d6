#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "config.hpp"

namespace ftsim {

// One line of comparison.csv: a cell's scalar outcomes.
struct ComparisonRow {
    std::string workload;
    std::string mode;
    std::uint32_t delay_ms = 0;
    std::uint64_t seed = 0;
    std::uint64_t elapsed_ns = 0;
    std::uint64_t bytes_written = 0;
    std::uint64_t bytes_read = 0;
    double throughput = 0;  // payload bytes per second
    std::uint64_t retx_segments = 0;
    std::uint64_t retx_fast = 0;
    std::uint64_t retx_timeout = 0;
    SummaryStats write_tat;  // ns
    SummaryStats read_tat;   // ns
    SummaryStats aggr_cwnd;  // bytes
};

inline ComparisonRow summarize_cell(const CellConfig& cc,
                                    const CellResult& r) {
    ComparisonRow row;
    row.workload = workload_name(cc.workload);
    row.mode = mode_name(cc.mode);
    row.delay_ms = std::uint32_t(cc.delay / kMillisecond);
    row.seed = cc.seed;
    row.elapsed_ns = r.elapsed();
    row.bytes_written = r.report.bytes_written;
    row.bytes_read = r.report.bytes_read;
    row.throughput = r.throughput();

    // Both directions: write data retransmits on the forward path, read
    // data on the reverse path.
    std::vector<const TcpCounters*> all;
    for (const TcpCounters& c : r.initiator_counters) all.push_back(&c);
    for (const TcpCounters& c : r.target_counters) all.push_back(&c);
    const RetransmitSummary rs = retransmit_summary(all);
    row.retx_segments = rs.segments_retransmitted;
    row.retx_fast = rs.fast_episodes;
    row.retx_timeout = rs.timeout_episodes;

    std::vector<double> wt, rt;
    for (const TurnaroundRecord& rec : r.records) {
        const double tat = double(rec.complete_ns - rec.issue_ns);
        (rec.dir == ScsiDir::write ? wt : rt).push_back(tat);
    }
    if (!wt.empty()) row.write_tat = summarize(wt);
    if (!rt.empty()) row.read_tat = summarize(rt);
    if (!r.trace.aggregate().empty())
        row.aggr_cwnd = summarize(r.trace.aggregate());
    return row;
}

namespace csv {

inline std::string comparison(std::vector<ComparisonRow> rows) {
    // Canonical row order: execution order must not show in the output.
    std::sort(rows.begin(), rows.end(),
              [](const ComparisonRow& a, const ComparisonRow& b) {
                  return std::tie(a.workload, a.mode, a.delay_ms, a.seed) <
                         std::tie(b.workload, b.mode, b.delay_ms, b.seed);
              });
    std::string out =
        "workload,mode,delay_ms,seed,elapsed_ns,bytes_written,bytes_read,"
        "throughput_bytes_per_sec,retx_segments,retx_fast_episodes,"
        "retx_timeout_episodes,write_count,write_tat_mean_ns,"
        "write_tat_sd_ns,write_tat_pct_sd,read_count,read_tat_mean_ns,"
        "read_tat_sd_ns,read_tat_pct_sd,aggr_cwnd_mean_bytes,"
        "aggr_cwnd_sd_bytes,aggr_cwnd_pct_sd\n";
    for (const ComparisonRow& r : rows) {
        out += r.workload + "," + r.mode + "," + std::to_string(r.delay_ms) +
               "," + std::to_string(r.seed) + "," +
               std::to_string(r.elapsed_ns) + "," +
               std::to_string(r.bytes_written) + "," +
               std::to_string(r.bytes_read) + "," + num(r.throughput) + "," +
               std::to_string(r.retx_segments) + "," +
               std::to_string(r.retx_fast) + "," +
               std::to_string(r.retx_timeout) + "," +
               std::to_string(r.write_tat.n) + "," + num(r.write_tat.mean) +
               "," + num(r.write_tat.sd) + "," + num(r.write_tat.pct_sd) +
               "," + std::to_string(r.read_tat.n) + "," +
               num(r.read_tat.mean) + "," + num(r.read_tat.sd) + "," +
               num(r.read_tat.pct_sd) + "," + num(r.aggr_cwnd.mean) + "," +
               num(r.aggr_cwnd.sd) + "," + num(r.aggr_cwnd.pct_sd) + "\n";
    }
    return out;
}

}  // namespace csv

struct ExperimentResult {
    std::vector<ComparisonRow> rows;
    std::size_t cells = 0;
    std::filesystem::path root;
};

namespace detail {

inline void write_file(const std::filesystem::path& p,
                       const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + p.string() + "'");
}

}  // namespace detail

using CellObserver = std::function<void(const CellConfig&, const CellResult&)>;

// Runs the full sweep, writes per-cell traces plus the combined
// comparison.csv and a config echo under cfg.out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const CellObserver& observe = {}) {
    validate_config(cfg);
    ExperimentResult res;
    res.root = std::filesystem::path(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(res.root, ec);
    if (ec)
        throw IoError("cannot create directory '" + res.root.string() +
                      "': " + ec.message());
    detail::write_file(res.root / "config.echo", serialize_config(cfg));

    for (CcMode mode : cfg.modes) {
        for (std::uint32_t delay_ms : cfg.delays_ms) {
            for (std::uint64_t seed : cfg.seeds) {
                const CellConfig cc = cell_of(cfg, mode, delay_ms, seed);
                const CellResult r = run_cell(cc);
                const std::filesystem::path dir = res.root / cell_name(cc);
                std::filesystem::create_directories(dir, ec);
                if (ec)
                    throw IoError("cannot create directory '" + dir.string() +
                                  "': " + ec.message());
                detail::write_file(dir / "cwnd_trace.csv",
                                   csv::cwnd_trace(r.trace));
                detail::write_file(dir / "turnaround.csv",
                                   csv::turnaround(r.records));
                if (mode == CcMode::fair)
                    detail::write_file(dir / "ecb_trace.csv",
                                       csv::ecb_trace(r.ecb));
                res.rows.push_back(summarize_cell(cc, r));
                ++res.cells;
                if (observe) observe(cc, r);
            }
        }
    }
    detail::write_file(res.root / "comparison.csv", csv::comparison(res.rows));
    return res;
}

}  // namespace ftsim
