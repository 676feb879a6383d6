#include <catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "ftsim/fabric.hpp"
#include "ftsim/rng.hpp"
#include "ftsim/workload.hpp"
#include "oracles.hpp"

using namespace ftsim;

namespace {

FabricConfig quiet_config(std::uint32_t n_conns) {
    FabricConfig cfg;
    cfg.n_conns = n_conns;
    cfg.path.loss_prob = 0.0;
    cfg.path.router_delay = 0;
    cfg.path.queue_capacity_pkts = 4096;
    cfg.initial_cwnd = 512 * 1024;
    return cfg;
}

bool same_records(const std::vector<TurnaroundRecord>& a,
                  const std::vector<TurnaroundRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].command_id != b[i].command_id || a[i].dir != b[i].dir ||
            a[i].issue_ns != b[i].issue_ns ||
            a[i].complete_ns != b[i].complete_ns ||
            a[i].conn_id != b[i].conn_id || a[i].lba != b[i].lba ||
            a[i].length_bytes != b[i].length_bytes)
            return false;
    }
    return true;
}

// Two-link pipeline arrival for back-to-back app writes pushed at t = 0.
SimTime burst_arrival_ns(const std::vector<std::uint64_t>& app_writes) {
    SimTime ingress_done = 0;
    SimTime egress_done = 0;
    for (std::uint64_t left : app_writes) {
        while (left > 0) {
            const std::uint64_t payload = left < kMss ? left : kMss;
            const SimTime ser =
                oracle::serialization_ns(payload + kHeaderBytes, 1'000'000'000);
            ingress_done += ser;
            const SimTime start =
                ingress_done > egress_done ? ingress_done : egress_done;
            egress_done = start + ser;
            left -= payload;
        }
    }
    return egress_done;
}

}  // namespace

TEST_CASE("sequential write covers the file in consecutive full clusters") {
    Fabric fab(quiet_config(1));
    SeqParams p;
    p.file_size_bytes = 1024 * 1024;
    SeqWriteWorkload w(fab.session(), fab.queue(), p);
    w.start();
    fab.queue().run();
    REQUIRE(w.done());
    const auto& recs = fab.session().records();
    REQUIRE(recs.size() == 8);
    std::uint64_t covered = 0;
    for (const auto& r : recs) {
        REQUIRE(r.length_bytes == 131072);
        covered += r.length_bytes;
    }
    REQUIRE(covered == p.file_size_bytes);
    // Consecutive placement: sorted by lba the clusters tile the file.
    std::vector<std::uint64_t> lbas;
    for (const auto& r : recs) lbas.push_back(r.lba);
    std::sort(lbas.begin(), lbas.end());
    for (std::size_t k = 0; k < lbas.size(); ++k)
        REQUIRE(lbas[k] == k * (131072 / kDiskBlockBytes));
    REQUIRE(w.report().bytes_written == p.file_size_bytes);
    REQUIRE(w.report().commands == 8);
}

TEST_CASE("a partial final cluster is emitted for non-multiple sizes") {
    Fabric fab(quiet_config(1));
    SeqParams p;
    p.file_size_bytes = 131072 + 5000;
    SeqWriteWorkload w(fab.session(), fab.queue(), p);
    w.start();
    fab.queue().run();
    const auto& recs = fab.session().records();
    REQUIRE(recs.size() == 2);
    REQUIRE(fab.session().bytes_written() == p.file_size_bytes);
}

TEST_CASE("block size does not change the command stream") {
    SeqParams a, b;
    a.file_size_bytes = b.file_size_bytes = 2 * 1024 * 1024;
    a.block_size_bytes = 1024;
    b.block_size_bytes = 16384;
    Fabric fa(quiet_config(2)), fb(quiet_config(2));
    SeqWriteWorkload wa(fa.session(), fa.queue(), a);
    SeqWriteWorkload wb(fb.session(), fb.queue(), b);
    wa.start();
    wb.start();
    fa.queue().run();
    fb.queue().run();
    REQUIRE(same_records(fa.session().records(), fb.session().records()));
}

TEST_CASE("a zero-byte file completes immediately with no commands") {
    Fabric fab(quiet_config(1));
    SeqParams p;
    p.file_size_bytes = 0;
    SeqWriteWorkload w(fab.session(), fab.queue(), p);
    bool signalled = false;
    w.set_on_done([&] { signalled = true; });
    w.start();
    REQUIRE(w.done());
    REQUIRE(signalled);
    REQUIRE(w.report().commands == 0);
    REQUIRE(fab.session().records().empty());

    SeqReadWorkload r(fab.session(), fab.queue(), p);
    r.start();
    REQUIRE(r.done());
}

TEST_CASE("sequential read keeps exactly one command outstanding") {
    Fabric fab(quiet_config(1));
    SeqParams p;
    p.file_size_bytes = 1024 * 1024;
    SeqReadWorkload w(fab.session(), fab.queue(), p);
    w.start();
    REQUIRE(fab.session().in_flight_count() == 1);
    fab.queue().run();
    const auto& recs = fab.session().records();
    REQUIRE(recs.size() == 8);
    // Next read issued at the instant the previous one completes.
    for (std::size_t k = 1; k < recs.size(); ++k)
        REQUIRE(recs[k].issue_ns == recs[k - 1].complete_ns);
    REQUIRE(w.report().bytes_read == p.file_size_bytes);
}

TEST_CASE("reads are slower than writes at the same distance") {
    SeqParams p;
    p.file_size_bytes = 4 * 1024 * 1024;
    FabricConfig cfg = quiet_config(2);
    cfg.path.router_delay = 2 * kMillisecond;

    Fabric fw(cfg);
    SeqWriteWorkload w(fw.session(), fw.queue(), p);
    w.start();
    fw.queue().run();

    Fabric fr(cfg);
    SeqReadWorkload r(fr.session(), fr.queue(), p);
    r.start();
    fr.queue().run();

    const SimTime write_elapsed = w.report().done_ns - w.report().start_ns;
    const SimTime read_elapsed = r.report().done_ns - r.report().start_ns;
    REQUIRE(read_elapsed > write_elapsed);
}

TEST_CASE("rewrite reads and writes every cluster and runs slower than reads") {
    SeqParams p;
    p.file_size_bytes = 2 * 1024 * 1024;
    FabricConfig cfg = quiet_config(1);
    cfg.path.router_delay = kMillisecond;

    Fabric fx(cfg);
    RewriteWorkload rw(fx.session(), fx.queue(), p);
    rw.start();
    fx.queue().run();
    REQUIRE(rw.done());
    REQUIRE(rw.report().bytes_read == p.file_size_bytes);
    REQUIRE(rw.report().bytes_written == p.file_size_bytes);

    Fabric fy(cfg);
    SeqReadWorkload rd(fy.session(), fy.queue(), p);
    rd.start();
    fy.queue().run();

    REQUIRE(rw.report().done_ns - rw.report().start_ns >
            rd.report().done_ns - rd.report().start_ns);
}

TEST_CASE("single-seeker zero-delay seek rate matches the closed form") {
    FabricConfig cfg = quiet_config(1);
    Fabric fab(cfg);
    RngStream rng(11, kStreamWorkloadBase);
    SeekParams sp;
    sp.n_seekers = 1;
    sp.ops = 20;
    sp.rewrite_prob = 0.0;  // keep each cycle on the deterministic path
    SeekWorkload w(fab.session(), fab.queue(), rng, sp);
    w.start();
    fab.queue().run();
    REQUIRE(w.done());
    // Cycle: command header out, full disk service with a seek (random
    // address), 8KB data-in plus status back.  One op has no think time, so
    // elapsed is exactly ops times the cycle.
    const SimTime cmd_out =
        2 * oracle::serialization_ns(48 + kHeaderBytes, 1'000'000'000);
    const SimTime disk = 500'000 + 8192 * 8 * kSecond / 400'000'000 + 4'000'000;
    const SimTime reply = burst_arrival_ns({48 + 8192, 48});
    const SimTime cycle = cmd_out + disk + reply;
    REQUIRE(w.report().done_ns - w.report().start_ns == sp.ops * cycle);
    REQUIRE(w.report().seeks_per_sec ==
            Catch::Approx(1e9 / double(cycle)).epsilon(1e-9));
}

TEST_CASE("three parallel seekers beat a single seeker") {
    FabricConfig cfg = quiet_config(1);
    cfg.path.router_delay = 2 * kMillisecond;

    SeekParams sp;
    sp.ops = 60;

    Fabric f1(cfg);
    RngStream r1(5, kStreamWorkloadBase);
    SeekParams one = sp;
    one.n_seekers = 1;
    SeekWorkload w1(f1.session(), f1.queue(), r1, one);
    w1.start();
    f1.queue().run();

    Fabric f3(cfg);
    RngStream r3(5, kStreamWorkloadBase);
    SeekParams three = sp;
    three.n_seekers = 3;
    SeekWorkload w3(f3.session(), f3.queue(), r3, three);
    w3.start();
    f3.queue().run();

    REQUIRE(w3.report().seeks_per_sec > w1.report().seeks_per_sec);
}

TEST_CASE("postmark phase separation: files only, no transactions") {
    Fabric fab(quiet_config(1));
    RngStream rng(3, kStreamWorkloadBase);
    PostmarkParams p;
    p.n_files = 10;
    p.size_min = 500;
    p.size_max = 4096;
    p.n_transactions = 0;
    PostmarkWorkload w(fab.session(), fab.queue(), rng, p);
    w.start();
    fab.queue().run();
    REQUIRE(w.done());
    REQUIRE(w.report().commands == 10);
    REQUIRE(w.files_created() == 10);
    REQUIRE(w.files_deleted() == 0);
    REQUIRE(w.pool_size() == 10);
    for (const auto& r : fab.session().records())
        REQUIRE(r.dir == ScsiDir::write);
}

TEST_CASE("postmark bookkeeping balances and the pool never empties") {
    Fabric fab(quiet_config(2));
    RngStream rng(9, kStreamWorkloadBase);
    PostmarkParams p;
    p.n_files = 20;
    p.size_min = 500;
    p.size_max = 8192;
    p.n_transactions = 60;
    PostmarkWorkload w(fab.session(), fab.queue(), rng, p);
    w.start();
    fab.queue().run();
    REQUIRE(w.done());
    REQUIRE(w.transactions_done() == 60);
    REQUIRE(w.pool_size() >= 1);
    REQUIRE(w.files_created() - w.files_deleted() == w.pool_size());
    REQUIRE(w.report().bytes_written == fab.session().bytes_written());
    REQUIRE(w.report().bytes_read == fab.session().bytes_read());
    REQUIRE(fab.queue().conserves_events());
}

TEST_CASE("postmark is deterministic in its seed") {
    PostmarkParams p;
    p.n_files = 15;
    p.size_min = 500;
    p.size_max = 8192;
    p.n_transactions = 40;

    auto run_with = [&](std::uint64_t seed) {
        FabricConfig cfg = quiet_config(2);
        cfg.seed = seed;
        Fabric fab(cfg);
        RngStream rng(seed, kStreamWorkloadBase);
        PostmarkWorkload w(fab.session(), fab.queue(), rng, p);
        w.start();
        fab.queue().run();
        return fab.session().records();
    };

    const auto a = run_with(42);
    const auto b = run_with(42);
    const auto c = run_with(43);
    REQUIRE(same_records(a, b));
    REQUIRE_FALSE(same_records(a, c));
}

TEST_CASE("a single generator under the multi driver matches running alone") {
    PostmarkParams p;
    p.n_files = 12;
    p.size_min = 500;
    p.size_max = 4096;
    p.n_transactions = 25;

    Fabric fa(quiet_config(2));
    RngStream ra(21, kStreamWorkloadBase);
    PostmarkWorkload alone(fa.session(), fa.queue(), ra, p);
    alone.start();
    fa.queue().run();

    Fabric fb(quiet_config(2));
    RngStream rb(21, kStreamWorkloadBase);
    PostmarkWorkload member(fb.session(), fb.queue(), rb, p);
    MultiWorkload multi;
    multi.add(&member);
    multi.start();
    fb.queue().run();

    REQUIRE(multi.done());
    REQUIRE(same_records(fa.session().records(), fb.session().records()));
}

TEST_CASE("several postmark generators share one session to completion") {
    Fabric fab(quiet_config(4));
    PostmarkParams p;
    p.n_files = 10;
    p.size_min = 500;
    p.size_max = 4096;
    p.n_transactions = 20;

    std::vector<std::unique_ptr<RngStream>> rngs;
    std::vector<std::unique_ptr<PostmarkWorkload>> gens;
    MultiWorkload multi;
    for (int k = 0; k < 3; ++k) {
        rngs.push_back(std::make_unique<RngStream>(77, kStreamWorkloadBase + k));
        gens.push_back(std::make_unique<PostmarkWorkload>(
            fab.session(), fab.queue(), *rngs.back(), p));
        multi.add(gens.back().get());
    }
    bool all_done = false;
    multi.set_on_done([&] { all_done = true; });
    multi.start();
    fab.queue().run();
    REQUIRE(all_done);
    const WorkloadReport merged = multi.merged();
    REQUIRE(merged.bytes_written == fab.session().bytes_written());
    REQUIRE(merged.bytes_read == fab.session().bytes_read());
    REQUIRE(merged.commands == fab.session().records().size());
    REQUIRE(fab.queue().conserves_events());
}

TEST_CASE("bad workload parameters are rejected") {
    Fabric fab(quiet_config(1));
    RngStream rng(1, kStreamWorkloadBase);
    PostmarkParams p;
    p.size_min = 4096;
    p.size_max = 500;
    REQUIRE_THROWS_AS(
        PostmarkWorkload(fab.session(), fab.queue(), rng, p),
        std::invalid_argument);
    SeekParams sp;
    sp.n_seekers = 0;
    REQUIRE_THROWS_AS(SeekWorkload(fab.session(), fab.queue(), rng, sp),
                      std::invalid_argument);
}
