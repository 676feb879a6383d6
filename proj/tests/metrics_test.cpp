#include <catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "ftsim/metrics.hpp"
#include "ftsim/rng.hpp"
#include "oracles.hpp"

using namespace ftsim;

TEST_CASE("population statistics of a worked example") {
    const SummaryStats s = summarize({2.0, 4.0, 6.0});
    REQUIRE(s.mean == Catch::Approx(4.0));
    REQUIRE(s.sd == Catch::Approx(1.6329931618554518));
    REQUIRE(s.pct_sd == Catch::Approx(40.824829046386306));
    REQUIRE(s.min == 2.0);
    REQUIRE(s.max == 6.0);
    REQUIRE(s.n == 3);
}

TEST_CASE("statistics degenerate cases") {
    const SummaryStats one = summarize({5.0});
    REQUIRE(one.sd == 0.0);
    REQUIRE(one.pct_sd == 0.0);
    REQUIRE_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("statistics agree with the independent oracle") {
    RngStream rng(31, kStreamWorkloadBase);
    std::vector<double> v;
    for (int i = 0; i < 100; ++i) v.push_back(double(rng.below(100000)));
    const SummaryStats s = summarize(v);
    const oracle::Stats ref = oracle::pop_stats(v);
    REQUIRE(s.mean == Catch::Approx(ref.mean));
    REQUIRE(s.sd == Catch::Approx(ref.sd));
}

TEST_CASE("metric series rejects non-increasing timestamps") {
    MetricSeries m;
    m.append(10, 1.0);
    m.append(20, 2.0);
    REQUIRE_THROWS_AS(m.append(20, 3.0), std::logic_error);
    REQUIRE_THROWS_AS(m.append(5, 3.0), std::logic_error);
    REQUIRE(m.size() == 2);
}

TEST_CASE("window difference is pointwise and demands aligned ticks") {
    MetricSeries a, b;
    a.append(10, 5.0);
    a.append(20, 7.0);
    b.append(10, 2.0);
    b.append(20, 9.0);
    const MetricSeries d = window_difference(a, b);
    REQUIRE(d.size() == 2);
    REQUIRE(d.value_at(0) == 3.0);
    REQUIRE(d.value_at(1) == -2.0);

    MetricSeries c;
    c.append(10, 1.0);
    REQUIRE_THROWS_AS(window_difference(a, c), std::logic_error);
    MetricSeries e;
    e.append(10, 1.0);
    e.append(21, 1.0);
    REQUIRE_THROWS_AS(window_difference(a, e), std::logic_error);
}

TEST_CASE("aggregate window equals the exact sum of members per tick") {
    CwndTrace trace(3);
    trace.sample(0, {2920, 2920, 2920});
    trace.sample(10'000'000, {4096, 8192, 1460});
    REQUIRE(trace.aggregate().value_at(0) == 3 * 2920.0);
    REQUIRE(trace.aggregate().value_at(1) == 4096.0 + 8192.0 + 1460.0);
    REQUIRE(trace.conn(1).value_at(1) == 8192.0);
    REQUIRE_THROWS_AS(trace.sample(20'000'000, {1, 2}), std::logic_error);
}

TEST_CASE("retransmit counters split by cause and sum") {
    TcpCounters a, b;
    a.fast_recovery_entries = 3;
    a.timeouts = 1;
    a.segments_retransmitted = 17;
    b.fast_recovery_entries = 2;
    b.timeouts = 4;
    b.segments_retransmitted = 9;
    const RetransmitSummary s = retransmit_summary({&a, &b});
    REQUIRE(s.fast_episodes == 5);
    REQUIRE(s.timeout_episodes == 5);
    REQUIRE(s.episodes == 10);
    REQUIRE(s.segments_retransmitted == 26);
}

TEST_CASE("throughput is payload bytes over elapsed time") {
    REQUIRE(throughput_bytes_per_sec(1'000'000, kSecond) ==
            Catch::Approx(1e6));
    REQUIRE(throughput_bytes_per_sec(131072, 4'212'992) ==
            Catch::Approx(131072.0 / 4.212992e-3));
    REQUIRE(throughput_bytes_per_sec(5, 0) == 0.0);
}

TEST_CASE("cwnd trace csv renders per-conn rows then the aggregate") {
    CwndTrace trace(2);
    trace.sample(0, {2920, 2920});
    trace.sample(10'000'000, {5840, 4380});
    const std::string got = csv::cwnd_trace(trace);
    const std::string want =
        "time_ns,conn_id,cwnd_bytes\n"
        "0,0,2920\n"
        "0,1,2920\n"
        "0,AGG,5840\n"
        "10000000,0,5840\n"
        "10000000,1,4380\n"
        "10000000,AGG,10220\n";
    REQUIRE(got == want);
}

TEST_CASE("turnaround csv golden row") {
    std::vector<TurnaroundRecord> recs;
    recs.push_back({7, ScsiDir::read, 1000, 4213312, 2, 0, 131072});
    const std::string got = csv::turnaround(recs);
    REQUIRE(got ==
            "command_id,direction,issue_ns,complete_ns,conn_id\n"
            "7,read,1000,4213312,2\n");
}

TEST_CASE("ecb trace csv golden rows") {
    EcbTrace trace;
    trace.sample({0, 11680, 524288, 4, 0});
    trace.sample({10'000'000, 17520, 524288, 4, 8'400'000});
    REQUIRE(csv::ecb_trace(trace) ==
            "time_ns,ecb_cwnd_bytes,ecb_ssthresh_bytes,ref_cnt,ecb_srtt_ns\n"
            "0,11680,524288,4,0\n"
            "10000000,17520,524288,4,8400000\n");
    EcbTrace bad;
    bad.sample({5, 1, 1, 1, 0});
    REQUIRE_THROWS_AS(bad.sample({5, 1, 1, 1, 0}), std::logic_error);
}

TEST_CASE("summary csv renders values with fixed precision") {
    std::vector<csv::SummaryRow> rows;
    rows.push_back({"seq_write.fair.d4", 3, "throughput_bytes_per_sec",
                    31250000.0});
    rows.push_back({"seq_write.std.d4", 3, "pct_sd", 12.3456789});
    REQUIRE(csv::summary(rows) ==
            "config,seed,metric,value\n"
            "seq_write.fair.d4,3,throughput_bytes_per_sec,31250000.000000\n"
            "seq_write.std.d4,3,pct_sd,12.345679\n");
}

TEST_CASE("csv rendering is byte-stable across repeated calls") {
    CwndTrace trace(2);
    RngStream rng(4, kStreamWorkloadBase);
    for (int k = 0; k < 50; ++k)
        trace.sample(SimTime(k) * 10'000'000 + 1,
                     {rng.below(1 << 20), rng.below(1 << 20)});
    const std::string a = csv::cwnd_trace(trace);
    const std::string b = csv::cwnd_trace(trace);
    REQUIRE(a == b);
    REQUIRE(a.size() > 1000);
}
