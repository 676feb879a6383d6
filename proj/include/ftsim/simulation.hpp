#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fabric.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "workload.hpp"

namespace ftsim {

enum class WorkloadKind : std::uint8_t {
    seq_write,
    seq_read,
    postmark,
    postmark_multi,
    rewrite,
    seek,
};

inline const char* workload_name(WorkloadKind k) {
    switch (k) {
        case WorkloadKind::seq_write: return "seq_write";
        case WorkloadKind::seq_read: return "seq_read";
        case WorkloadKind::postmark: return "postmark";
        case WorkloadKind::postmark_multi: return "postmark_multi";
        case WorkloadKind::rewrite: return "rewrite";
        case WorkloadKind::seek: return "seek";
    }
    return "?";
}

struct CellConfig {
    WorkloadKind workload = WorkloadKind::seq_write;
    CcMode mode = CcMode::standard;
    GrowthMode growth = GrowthMode::per_member;
    std::uint32_t n_conns = 4;
    SimTime delay = 0;
    double loss_prob = 0.027;
    std::uint64_t seed = 1;
    SeqParams seq;
    PostmarkParams postmark;
    std::uint32_t postmark_processes = 10;  // postmark_multi only
    SeekParams seek;
    std::uint64_t bandwidth_bps = 1'000'000'000;
    std::uint32_t queue_capacity_pkts = 100;
    std::uint32_t max_outstanding = 32;
    TcpConfig tcp;
    DiskConfig disk;
    std::uint64_t initial_cwnd = 2 * kMss;
    SimTime sample_interval = 10 * kMillisecond;
    bool capture_send_trace = false;
    SimTime horizon = 600 * kSecond;  // hard stop against runaway cells
};

struct CellResult {
    WorkloadReport report;
    std::vector<TurnaroundRecord> records;
    CwndTrace trace{0};
    EcbTrace ecb;
    std::vector<TcpCounters> initiator_counters;
    std::vector<TcpCounters> target_counters;
    std::vector<std::vector<SendTraceEntry>> initiator_send_traces;
    std::vector<std::vector<SendTraceEntry>> target_send_traces;
    std::uint64_t loss_offered = 0;
    std::uint64_t loss_dropped = 0;
    std::uint64_t queue_dropped = 0;
    std::uint64_t registry_accesses = 0;
    bool event_conservation = false;
    bool stream_conservation = false;
    bool commands_conserved = false;

    SimTime elapsed() const { return report.done_ns - report.start_ns; }
    double throughput() const {
        return throughput_bytes_per_sec(
            report.bytes_written + report.bytes_read, elapsed());
    }
};

// Runs one simulation cell: builds the stack, starts the workload, samples
// the per-connection windows on exact ticks until the workload finishes,
// then drains the queue and snapshots counters and conservation checks.
inline CellResult run_cell(const CellConfig& cc) {
    FabricConfig fc;
    fc.n_conns = cc.n_conns;
    fc.cc_mode = cc.mode;
    fc.growth = cc.growth;
    fc.path.bandwidth_bps = cc.bandwidth_bps;
    fc.path.router_delay = cc.delay;
    fc.path.loss_prob = cc.loss_prob;
    fc.path.queue_capacity_pkts = cc.queue_capacity_pkts;
    fc.tcp = cc.tcp;
    fc.initial_cwnd = cc.initial_cwnd;
    fc.disk = cc.disk;
    fc.max_outstanding = cc.max_outstanding;
    fc.seed = cc.seed;
    Fabric fab(fc);

    CellResult out;
    out.initiator_send_traces.resize(cc.n_conns);
    out.target_send_traces.resize(cc.n_conns);
    if (cc.capture_send_trace) {
        for (std::uint32_t i = 0; i < cc.n_conns; ++i) {
            fab.initiator_conn(i).send_trace = &out.initiator_send_traces[i];
            fab.target_conn(i).send_trace = &out.target_send_traces[i];
        }
    }

    // Generators and their private random streams.
    std::vector<std::unique_ptr<RngStream>> rngs;
    std::vector<std::unique_ptr<Workload>> gens;
    MultiWorkload multi;
    auto add = [&](std::unique_ptr<Workload> w) {
        gens.push_back(std::move(w));
        multi.add(gens.back().get());
    };
    switch (cc.workload) {
        case WorkloadKind::seq_write:
            add(std::make_unique<SeqWriteWorkload>(fab.session(), fab.queue(),
                                                   cc.seq));
            break;
        case WorkloadKind::seq_read:
            add(std::make_unique<SeqReadWorkload>(fab.session(), fab.queue(),
                                                  cc.seq));
            break;
        case WorkloadKind::rewrite:
            add(std::make_unique<RewriteWorkload>(fab.session(), fab.queue(),
                                                  cc.seq));
            break;
        case WorkloadKind::seek:
            rngs.push_back(
                std::make_unique<RngStream>(cc.seed, kStreamWorkloadBase));
            add(std::make_unique<SeekWorkload>(fab.session(), fab.queue(),
                                               *rngs.back(), cc.seek));
            break;
        case WorkloadKind::postmark:
            rngs.push_back(
                std::make_unique<RngStream>(cc.seed, kStreamWorkloadBase));
            add(std::make_unique<PostmarkWorkload>(
                fab.session(), fab.queue(), *rngs.back(), cc.postmark));
            break;
        case WorkloadKind::postmark_multi:
            for (std::uint32_t k = 0; k < cc.postmark_processes; ++k) {
                rngs.push_back(std::make_unique<RngStream>(
                    cc.seed, kStreamWorkloadBase + k));
                add(std::make_unique<PostmarkWorkload>(
                    fab.session(), fab.queue(), *rngs.back(), cc.postmark));
            }
            break;
    }

    out.trace = CwndTrace(cc.n_conns);
    const Ecb* fwd_ecb = cc.mode == CcMode::fair
                             ? fab.registry().find(Fabric::forward_key())
                             : nullptr;

    std::vector<std::uint64_t> windows(cc.n_conns);
    auto sample = [&](SimTime t) {
        for (std::uint32_t i = 0; i < cc.n_conns; ++i)
            windows[i] = fab.window_of(i);
        out.trace.sample(t, windows);
        if (fwd_ecb != nullptr) {
            EcbSample s;
            s.t = t;
            s.cwnd = fwd_ecb->cwnd();
            s.ssthresh = fwd_ecb->ssthresh();
            s.ref_cnt = fwd_ecb->ref_cnt();
            s.srtt = fwd_ecb->srtt();
            out.ecb.sample(s);
        }
    };

    multi.start();
    fab.queue().run_until(0);
    sample(0);
    SimTime t = 0;
    while (!multi.done()) {
        t += cc.sample_interval;
        if (t > cc.horizon)
            throw std::runtime_error("run_cell: horizon exceeded");
        fab.queue().run_until(t);
        sample(t);
    }
    fab.queue().run();  // drain in-flight acks and cancelled timers

    out.report = multi.merged();
    out.records = fab.session().records();
    out.commands_conserved =
        fab.session().in_flight_count() == 0 &&
        fab.session().pending_count() == 0 &&
        out.records.size() == out.report.commands;
    out.event_conservation = fab.queue().conserves_events();

    bool streams_ok = true;
    for (std::uint32_t i = 0; i < cc.n_conns; ++i) {
        out.initiator_counters.push_back(fab.initiator_conn(i).counters());
        out.target_counters.push_back(fab.target_conn(i).counters());
        streams_ok = streams_ok &&
                     fab.channel_to_target(i).bytes_framed() ==
                         fab.channel_to_target(i).bytes_delivered() &&
                     fab.channel_to_initiator(i).bytes_framed() ==
                         fab.channel_to_initiator(i).bytes_delivered();
    }
    out.stream_conservation = streams_ok;
    out.loss_offered = fab.path().loss_offered();
    out.loss_dropped = fab.path().loss_dropped();
    out.queue_dropped = fab.path().queue_dropped();
    out.registry_accesses = fab.registry().total_accesses();
    return out;
}

}  // namespace ftsim
