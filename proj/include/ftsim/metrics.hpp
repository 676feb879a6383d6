#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "iscsi.hpp"
#include "sim_time.hpp"
#include "tcp.hpp"

namespace ftsim {

// Timestamped samples with strictly increasing timestamps.
class MetricSeries {
  public:
    void append(SimTime t, double v) {
        if (!times_.empty() && t <= times_.back())
            throw std::logic_error("metric series: non-increasing timestamp");
        times_.push_back(t);
        values_.push_back(v);
    }

    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    SimTime time_at(std::size_t i) const { return times_[i]; }
    double value_at(std::size_t i) const { return values_[i]; }
    const std::vector<SimTime>& times() const { return times_; }
    const std::vector<double>& values() const { return values_; }

  private:
    std::vector<SimTime> times_;
    std::vector<double> values_;
};

struct SummaryStats {
    double mean = 0;
    double sd = 0;      // population standard deviation
    double pct_sd = 0;  // 100 * sd / mean
    double min = 0;
    double max = 0;
    std::size_t n = 0;
};

inline SummaryStats summarize(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("summarize: empty sample");
    SummaryStats s;
    s.n = v.size();
    s.min = s.max = v[0];
    double sum = 0;
    for (double x : v) {
        sum += x;
        if (x < s.min) s.min = x;
        if (x > s.max) s.max = x;
    }
    s.mean = sum / double(v.size());
    double acc = 0;
    for (double x : v) acc += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(acc / double(v.size()));
    s.pct_sd = s.mean != 0 ? 100.0 * s.sd / s.mean : 0.0;
    return s;
}

inline SummaryStats summarize(const MetricSeries& m) {
    return summarize(m.values());
}

// Pointwise difference a - b; both series must be sampled on the same ticks.
inline MetricSeries window_difference(const MetricSeries& a,
                                      const MetricSeries& b) {
    if (a.size() != b.size())
        throw std::logic_error("window_difference: length mismatch");
    MetricSeries out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.time_at(i) != b.time_at(i))
            throw std::logic_error("window_difference: misaligned timestamps");
        out.append(a.time_at(i), a.value_at(i) - b.value_at(i));
    }
    return out;
}

// Per-connection window samples plus their exact sum on each tick.
class CwndTrace {
  public:
    explicit CwndTrace(std::size_t n_conns) : conns_(n_conns) {}

    void sample(SimTime t, const std::vector<std::uint64_t>& windows) {
        if (windows.size() != conns_.size())
            throw std::logic_error("cwnd trace: wrong sample width");
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < windows.size(); ++i) {
            conns_[i].append(t, double(windows[i]));
            sum += windows[i];
        }
        aggregate_.append(t, double(sum));
    }

    std::size_t conn_count() const { return conns_.size(); }
    const MetricSeries& conn(std::size_t i) const { return conns_[i]; }
    const MetricSeries& aggregate() const { return aggregate_; }

  private:
    std::vector<MetricSeries> conns_;
    MetricSeries aggregate_;
};

// Shared-block state over time (fair mode only).
struct EcbSample {
    SimTime t = 0;
    std::uint64_t cwnd = 0;
    std::uint64_t ssthresh = 0;
    std::uint32_t ref_cnt = 0;
    SimTime srtt = 0;
};

class EcbTrace {
  public:
    void sample(const EcbSample& s) {
        if (!samples_.empty() && s.t <= samples_.back().t)
            throw std::logic_error("ecb trace: non-increasing timestamp");
        samples_.push_back(s);
    }
    const std::vector<EcbSample>& samples() const { return samples_; }

  private:
    std::vector<EcbSample> samples_;
};

struct RetransmitSummary {
    std::uint64_t fast_episodes = 0;
    std::uint64_t timeout_episodes = 0;
    std::uint64_t episodes = 0;
    std::uint64_t segments_retransmitted = 0;
};

inline RetransmitSummary retransmit_summary(
    const std::vector<const TcpCounters*>& conns) {
    RetransmitSummary out;
    for (const TcpCounters* c : conns) {
        out.fast_episodes += c->fast_recovery_entries;
        out.timeout_episodes += c->timeouts;
        out.segments_retransmitted += c->segments_retransmitted;
    }
    out.episodes = out.fast_episodes + out.timeout_episodes;
    return out;
}

inline double throughput_bytes_per_sec(std::uint64_t bytes, SimTime elapsed) {
    if (elapsed == 0) return 0.0;
    return double(bytes) / to_seconds(elapsed);
}

namespace csv {

// Fixed six-decimal rendering keeps reruns byte-identical.
inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

inline std::string cwnd_trace(const CwndTrace& trace) {
    std::string out = "time_ns,conn_id,cwnd_bytes\n";
    const MetricSeries& agg = trace.aggregate();
    for (std::size_t k = 0; k < agg.size(); ++k) {
        for (std::size_t i = 0; i < trace.conn_count(); ++i) {
            out += std::to_string(trace.conn(i).time_at(k));
            out += ',';
            out += std::to_string(i);
            out += ',';
            out += std::to_string(std::uint64_t(trace.conn(i).value_at(k)));
            out += '\n';
        }
        out += std::to_string(agg.time_at(k));
        out += ",AGG,";
        out += std::to_string(std::uint64_t(agg.value_at(k)));
        out += '\n';
    }
    return out;
}

inline std::string turnaround(const std::vector<TurnaroundRecord>& recs) {
    std::string out = "command_id,direction,issue_ns,complete_ns,conn_id\n";
    for (const TurnaroundRecord& r : recs) {
        out += std::to_string(r.command_id);
        out += r.dir == ScsiDir::write ? ",write," : ",read,";
        out += std::to_string(r.issue_ns);
        out += ',';
        out += std::to_string(r.complete_ns);
        out += ',';
        out += std::to_string(r.conn_id);
        out += '\n';
    }
    return out;
}

inline std::string ecb_trace(const EcbTrace& trace) {
    std::string out =
        "time_ns,ecb_cwnd_bytes,ecb_ssthresh_bytes,ref_cnt,ecb_srtt_ns\n";
    for (const EcbSample& s : trace.samples()) {
        out += std::to_string(s.t);
        out += ',';
        out += std::to_string(s.cwnd);
        out += ',';
        out += std::to_string(s.ssthresh);
        out += ',';
        out += std::to_string(s.ref_cnt);
        out += ',';
        out += std::to_string(s.srtt);
        out += '\n';
    }
    return out;
}

struct SummaryRow {
    std::string config;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0;
};

inline std::string summary(const std::vector<SummaryRow>& rows) {
    std::string out = "config,seed,metric,value\n";
    for (const SummaryRow& r : rows) {
        out += r.config;
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += r.metric;
        out += ',';
        out += num(r.value);
        out += '\n';
    }
    return out;
}

}  // namespace csv

}  // namespace ftsim
