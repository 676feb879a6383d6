#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "simulation.hpp"

namespace ftsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const char* mode_name(CcMode m) {
    return m == CcMode::standard ? "standard" : "fair";
}

inline const char* growth_name(GrowthMode g) {
    return g == GrowthMode::per_member ? "per_member" : "aggregate_one_flow";
}

// The experiment matrix: one workload swept over modes x delays x seeds.
struct ExperimentConfig {
    WorkloadKind workload = WorkloadKind::seq_write;
    std::vector<CcMode> modes = {CcMode::standard, CcMode::fair};
    GrowthMode growth = GrowthMode::per_member;
    std::uint32_t n_conns = 4;
    std::vector<std::uint32_t> delays_ms = {0, 2, 4, 6, 8, 10};
    double loss_prob = 0.027;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    double scale = 1.0;  // multiplies the sequential file size
    std::string out_dir = "out";
    SeqParams seq;
    PostmarkParams postmark{2000, 500, 102400, 5000};
    std::uint32_t postmark_processes = 10;
    SeekParams seek;
    std::uint64_t bandwidth_bps = 1'000'000'000;
    std::uint32_t queue_capacity_pkts = 100;
    std::uint32_t max_outstanding = 32;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        if (at == std::string::npos) {
            out.push_back(trim(s.substr(start)));
            return out;
        }
        out.push_back(trim(s.substr(start, at - start)));
        start = at + 1;
    }
}

[[noreturn]] inline void fail(const std::string& file, std::size_t line,
                              const std::string& what) {
    // line 0 marks a non-file source such as a command line flag
    if (line == 0) throw ConfigError(file + ": " + what);
    throw ConfigError(file + ":" + std::to_string(line) + ": " + what);
}

inline std::uint64_t to_u64(const std::string& v, const std::string& file,
                            std::size_t line, const std::string& key) {
    try {
        std::size_t used = 0;
        const std::uint64_t out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail(file, line, "bad integer '" + v + "' for key '" + key + "'");
    }
}

inline double to_double(const std::string& v, const std::string& file,
                        std::size_t line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        fail(file, line, "bad number '" + v + "' for key '" + key + "'");
    }
}

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline WorkloadKind to_workload(const std::string& v, const std::string& file,
                                std::size_t line) {
    for (WorkloadKind k :
         {WorkloadKind::seq_write, WorkloadKind::seq_read,
          WorkloadKind::postmark, WorkloadKind::postmark_multi,
          WorkloadKind::rewrite, WorkloadKind::seek})
        if (v == workload_name(k)) return k;
    fail(file, line, "unknown workload '" + v + "'");
}

inline CcMode to_mode(const std::string& v, const std::string& file,
                      std::size_t line) {
    if (v == "standard") return CcMode::standard;
    if (v == "fair") return CcMode::fair;
    fail(file, line, "unknown mode '" + v + "'");
}

inline GrowthMode to_growth(const std::string& v, const std::string& file,
                            std::size_t line) {
    if (v == "per_member") return GrowthMode::per_member;
    if (v == "aggregate_one_flow") return GrowthMode::aggregate_one_flow;
    fail(file, line, "unknown growth_mode '" + v + "'");
}

}  // namespace detail

// Line-oriented `key = value` under `[section]` headers.  Unknown sections,
// unknown keys, and malformed values fail with file:line messages.
inline ExperimentConfig parse_config(const std::string& text,
                                     const std::string& filename) {
    using namespace detail;
    ExperimentConfig cfg;
    std::string section;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t eol = text.find('\n', start);
        const std::string raw =
            eol == std::string::npos ? text.substr(start)
                                     : text.substr(start, eol - start);
        start = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                fail(filename, line_no, "unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "experiment" && section != "seq" &&
                section != "postmark" && section != "seek" &&
                section != "path" && section != "session")
                fail(filename, line_no, "unknown section '" + section + "'");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(filename, line_no, "expected 'key = value'");
        if (section.empty())
            fail(filename, line_no, "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        auto u64 = [&] { return to_u64(val, filename, line_no, key); };
        auto dbl = [&] { return to_double(val, filename, line_no, key); };

        if (section == "experiment") {
            if (key == "workload") {
                cfg.workload = to_workload(val, filename, line_no);
            } else if (key == "modes") {
                cfg.modes.clear();
                for (const std::string& m : split(val, ','))
                    cfg.modes.push_back(to_mode(m, filename, line_no));
            } else if (key == "growth_mode") {
                cfg.growth = to_growth(val, filename, line_no);
            } else if (key == "n_conns") {
                cfg.n_conns = std::uint32_t(u64());
            } else if (key == "delays_ms") {
                cfg.delays_ms.clear();
                for (const std::string& d : split(val, ','))
                    cfg.delays_ms.push_back(
                        std::uint32_t(to_u64(d, filename, line_no, key)));
            } else if (key == "loss_prob") {
                cfg.loss_prob = dbl();
            } else if (key == "seeds") {
                cfg.seeds.clear();
                for (const std::string& s : split(val, ','))
                    cfg.seeds.push_back(to_u64(s, filename, line_no, key));
            } else if (key == "scale") {
                cfg.scale = dbl();
            } else if (key == "out_dir") {
                cfg.out_dir = val;
            } else {
                fail(filename, line_no,
                     "unknown key '" + key + "' in [experiment]");
            }
        } else if (section == "seq") {
            if (key == "file_size_bytes")
                cfg.seq.file_size_bytes = u64();
            else if (key == "block_size_bytes")
                cfg.seq.block_size_bytes = u64();
            else
                fail(filename, line_no, "unknown key '" + key + "' in [seq]");
        } else if (section == "postmark") {
            if (key == "n_files")
                cfg.postmark.n_files = std::uint32_t(u64());
            else if (key == "size_min")
                cfg.postmark.size_min = u64();
            else if (key == "size_max")
                cfg.postmark.size_max = u64();
            else if (key == "n_transactions")
                cfg.postmark.n_transactions = std::uint32_t(u64());
            else if (key == "n_processes")
                cfg.postmark_processes = std::uint32_t(u64());
            else
                fail(filename, line_no,
                     "unknown key '" + key + "' in [postmark]");
        } else if (section == "seek") {
            if (key == "n_seekers")
                cfg.seek.n_seekers = std::uint32_t(u64());
            else if (key == "ops")
                cfg.seek.ops = u64();
            else if (key == "region_blocks")
                cfg.seek.region_blocks = u64();
            else if (key == "rewrite_prob")
                cfg.seek.rewrite_prob = dbl();
            else if (key == "read_len")
                cfg.seek.read_len = u64();
            else
                fail(filename, line_no, "unknown key '" + key + "' in [seek]");
        } else if (section == "path") {
            if (key == "bandwidth_bps")
                cfg.bandwidth_bps = u64();
            else if (key == "queue_capacity_pkts")
                cfg.queue_capacity_pkts = std::uint32_t(u64());
            else
                fail(filename, line_no, "unknown key '" + key + "' in [path]");
        } else if (section == "session") {
            if (key == "max_outstanding")
                cfg.max_outstanding = std::uint32_t(u64());
            else
                fail(filename, line_no,
                     "unknown key '" + key + "' in [session]");
        }
    }
    return cfg;
}

inline std::string serialize_config(const ExperimentConfig& c) {
    using detail::fmt_double;
    std::string out;
    out += "[experiment]\n";
    out += "workload = " + std::string(workload_name(c.workload)) + "\n";
    out += "modes = ";
    for (std::size_t i = 0; i < c.modes.size(); ++i) {
        if (i) out += ",";
        out += mode_name(c.modes[i]);
    }
    out += "\n";
    out += "growth_mode = " + std::string(growth_name(c.growth)) + "\n";
    out += "n_conns = " + std::to_string(c.n_conns) + "\n";
    out += "delays_ms = ";
    for (std::size_t i = 0; i < c.delays_ms.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(c.delays_ms[i]);
    }
    out += "\n";
    out += "loss_prob = " + fmt_double(c.loss_prob) + "\n";
    out += "seeds = ";
    for (std::size_t i = 0; i < c.seeds.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(c.seeds[i]);
    }
    out += "\n";
    out += "scale = " + fmt_double(c.scale) + "\n";
    out += "out_dir = " + c.out_dir + "\n";
    out += "\n[seq]\n";
    out += "file_size_bytes = " + std::to_string(c.seq.file_size_bytes) + "\n";
    out += "block_size_bytes = " + std::to_string(c.seq.block_size_bytes) +
           "\n";
    out += "\n[postmark]\n";
    out += "n_files = " + std::to_string(c.postmark.n_files) + "\n";
    out += "size_min = " + std::to_string(c.postmark.size_min) + "\n";
    out += "size_max = " + std::to_string(c.postmark.size_max) + "\n";
    out += "n_transactions = " + std::to_string(c.postmark.n_transactions) +
           "\n";
    out += "n_processes = " + std::to_string(c.postmark_processes) + "\n";
    out += "\n[seek]\n";
    out += "n_seekers = " + std::to_string(c.seek.n_seekers) + "\n";
    out += "ops = " + std::to_string(c.seek.ops) + "\n";
    out += "region_blocks = " + std::to_string(c.seek.region_blocks) + "\n";
    out += "rewrite_prob = " + fmt_double(c.seek.rewrite_prob) + "\n";
    out += "read_len = " + std::to_string(c.seek.read_len) + "\n";
    out += "\n[path]\n";
    out += "bandwidth_bps = " + std::to_string(c.bandwidth_bps) + "\n";
    out += "queue_capacity_pkts = " + std::to_string(c.queue_capacity_pkts) +
           "\n";
    out += "\n[session]\n";
    out += "max_outstanding = " + std::to_string(c.max_outstanding) + "\n";
    return out;
}

inline bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return serialize_config(a) == serialize_config(b);
}

inline void validate_config(const ExperimentConfig& c) {
    if (c.seeds.empty()) throw ConfigError("config: at least one seed required");
    if (c.modes.empty()) throw ConfigError("config: at least one mode required");
    if (c.delays_ms.empty())
        throw ConfigError("config: at least one delay required");
    if (c.n_conns == 0) throw ConfigError("config: n_conns must be positive");
    if (c.loss_prob < 0.0 || c.loss_prob >= 1.0)
        throw ConfigError("config: loss_prob must be in [0,1)");
    if (c.scale <= 0.0) throw ConfigError("config: scale must be positive");
    if (c.postmark.size_min == 0 || c.postmark.size_min > c.postmark.size_max)
        throw ConfigError("config: bad postmark size range");
    if (c.postmark.n_files == 0)
        throw ConfigError("config: postmark n_files must be positive");
    if (c.workload == WorkloadKind::postmark_multi && c.postmark_processes == 0)
        throw ConfigError("config: n_processes must be positive");
    if (c.seek.n_seekers == 0)
        throw ConfigError("config: n_seekers must be positive");
    if (c.bandwidth_bps == 0)
        throw ConfigError("config: bandwidth must be positive");
    if (c.max_outstanding == 0)
        throw ConfigError("config: max_outstanding must be positive");
}

// One simulation cell of the sweep.
inline CellConfig cell_of(const ExperimentConfig& e, CcMode mode,
                          std::uint32_t delay_ms, std::uint64_t seed) {
    CellConfig c;
    c.workload = e.workload;
    c.mode = mode;
    c.growth = e.growth;
    c.n_conns = e.n_conns;
    c.delay = SimTime(delay_ms) * kMillisecond;
    c.loss_prob = e.loss_prob;
    c.seed = seed;
    c.seq = e.seq;
    c.seq.file_size_bytes = std::uint64_t(double(e.seq.file_size_bytes) * e.scale);
    c.postmark = e.postmark;
    c.postmark_processes = e.postmark_processes;
    c.seek = e.seek;
    c.bandwidth_bps = e.bandwidth_bps;
    c.queue_capacity_pkts = e.queue_capacity_pkts;
    c.max_outstanding = e.max_outstanding;
    return c;
}

inline std::string cell_name(const CellConfig& c) {
    return std::string(workload_name(c.workload)) + "_" + mode_name(c.mode) +
           "_d" + std::to_string(c.delay / kMillisecond) + "_s" +
           std::to_string(c.seed);
}

}  // namespace ftsim
