// Sweep driver: runs the mode x delay x seed experiment matrix for one
// workload and writes per-cell traces plus a combined comparison.csv.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ftsim/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ftsim::IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fabric transfer simulator sweep"};
    std::string config_path;
    std::string workload, growth, out_dir;
    std::vector<std::string> modes;
    std::vector<std::uint32_t> delays;
    std::vector<std::uint64_t> seeds;
    double loss = -1, scale = -1, rewrite_prob = -1;
    std::uint64_t n_conns = 0, file_size = 0, block_size = 0;
    std::uint64_t pm_files = 0, pm_min = 0, pm_max = 0, pm_txns = 0,
                  pm_procs = 0;
    std::uint64_t seekers = 0, seek_ops = 0, region = 0, read_len = 0;
    std::uint64_t bandwidth = 0, queue_pkts = 0, outstanding = 0;
    bool quiet = false;

    app.add_option("--config", config_path, "config file (ini)");
    app.add_option("--workload", workload,
                   "seq_write|seq_read|postmark|postmark_multi|rewrite|seek");
    app.add_option("--modes,--mode", modes, "standard and/or fair");
    app.add_option("--delays-ms", delays, "one-way router delays to sweep");
    app.add_option("--loss", loss, "per-packet loss probability");
    app.add_option("--connections", n_conns, "connections per session");
    app.add_option("--seeds,--seed", seeds, "rng seeds to sweep");
    app.add_option("--growth-mode", growth, "per_member|aggregate_one_flow");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--scale", scale, "sequential file size multiplier");
    app.add_option("--file-size", file_size, "sequential file size, bytes");
    app.add_option("--block-size", block_size, "sequential block size, bytes");
    app.add_option("--postmark-files", pm_files, "postmark file pool size");
    app.add_option("--postmark-size-min", pm_min, "postmark min file bytes");
    app.add_option("--postmark-size-max", pm_max, "postmark max file bytes");
    app.add_option("--postmark-transactions", pm_txns, "postmark txn count");
    app.add_option("--postmark-processes", pm_procs,
                   "generator count for postmark_multi");
    app.add_option("--seekers", seekers, "seek workload loop count");
    app.add_option("--seek-ops", seek_ops, "seek workload total reads");
    app.add_option("--seek-region-blocks", region, "seek region, 512B blocks");
    app.add_option("--seek-rewrite-prob", rewrite_prob,
                   "probability a seek read is followed by a rewrite");
    app.add_option("--seek-read-len", read_len, "seek read size, bytes");
    app.add_option("--bandwidth-bps", bandwidth, "link bandwidth, bits/s");
    app.add_option("--queue-pkts", queue_pkts, "router queue depth, packets");
    app.add_option("--max-outstanding", outstanding,
                   "session command window");
    app.add_flag("--quiet", quiet, "suppress per-cell progress lines");

    CLI11_PARSE(app, argc, argv);

    try {
        ftsim::ExperimentConfig cfg;
        if (!config_path.empty())
            cfg = ftsim::parse_config(read_file(config_path), config_path);

        if (!workload.empty())
            cfg.workload = ftsim::detail::to_workload(workload, "--workload", 0);
        if (!modes.empty()) {
            cfg.modes.clear();
            for (const std::string& m : modes)
                cfg.modes.push_back(ftsim::detail::to_mode(m, "--modes", 0));
        }
        if (!delays.empty()) cfg.delays_ms = delays;
        if (loss >= 0) cfg.loss_prob = loss;
        if (n_conns) cfg.n_conns = std::uint32_t(n_conns);
        if (!seeds.empty()) cfg.seeds = seeds;
        if (!growth.empty())
            cfg.growth = ftsim::detail::to_growth(growth, "--growth-mode", 0);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (scale > 0) cfg.scale = scale;
        if (file_size) cfg.seq.file_size_bytes = file_size;
        if (block_size) cfg.seq.block_size_bytes = block_size;
        if (pm_files) cfg.postmark.n_files = std::uint32_t(pm_files);
        if (pm_min) cfg.postmark.size_min = pm_min;
        if (pm_max) cfg.postmark.size_max = pm_max;
        if (pm_txns) cfg.postmark.n_transactions = std::uint32_t(pm_txns);
        if (pm_procs) cfg.postmark_processes = std::uint32_t(pm_procs);
        if (seekers) cfg.seek.n_seekers = std::uint32_t(seekers);
        if (seek_ops) cfg.seek.ops = seek_ops;
        if (region) cfg.seek.region_blocks = region;
        if (rewrite_prob >= 0) cfg.seek.rewrite_prob = rewrite_prob;
        if (read_len) cfg.seek.read_len = read_len;
        if (bandwidth) cfg.bandwidth_bps = bandwidth;
        if (queue_pkts) cfg.queue_capacity_pkts = std::uint32_t(queue_pkts);
        if (outstanding) cfg.max_outstanding = std::uint32_t(outstanding);

        ftsim::validate_config(cfg);

        ftsim::CellObserver observe;
        if (!quiet)
            observe = [](const ftsim::CellConfig& cc,
                         const ftsim::CellResult& r) {
                std::printf("%-32s elapsed %.3fs  throughput %.1f MB/s\n",
                            ftsim::cell_name(cc).c_str(),
                            ftsim::to_seconds(r.elapsed()),
                            r.throughput() / 1e6);
                std::fflush(stdout);
            };
        const ftsim::ExperimentResult res =
            ftsim::run_experiment(cfg, observe);
        std::printf("%zu cells -> %s\n", res.cells,
                    (res.root / "comparison.csv").string().c_str());
        return 0;
    } catch (const ftsim::ConfigError& e) {
        std::fprintf(stderr, "simrun: %s\n", e.what());
        return 2;
    } catch (const ftsim::IoError& e) {
        std::fprintf(stderr, "simrun: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simrun: %s\n", e.what());
        return 1;
    }
}
