#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "event_queue.hpp"
#include "iscsi.hpp"
#include "rng.hpp"
#include "sim_time.hpp"

namespace ftsim {

struct SeqParams {
    std::uint64_t file_size_bytes = 64 * 1024 * 1024;
    // Retained as a sweep axis for the driver; the OS-level clustering into
    // 128KB commands makes it a no-op on the stream itself.
    std::uint64_t block_size_bytes = 4096;
};

struct PostmarkParams {
    std::uint32_t n_files = 20000;
    std::uint64_t size_min = 500;
    std::uint64_t size_max = 100 * 1024;
    std::uint32_t n_transactions = 50000;
};

struct SeekParams {
    std::uint32_t n_seekers = 3;
    std::uint64_t ops = 2000;
    std::uint64_t region_blocks = std::uint64_t(1) << 21;  // 1 GiB
    double rewrite_prob = 0.10;
    std::uint64_t read_len = 8192;
};

struct WorkloadReport {
    std::uint64_t bytes_written = 0;
    std::uint64_t bytes_read = 0;
    std::uint64_t commands = 0;
    SimTime start_ns = 0;
    SimTime done_ns = 0;
    std::uint64_t seek_ops = 0;
    double seeks_per_sec = 0.0;
};

// A generator owns a stream of commands against one session.  Writes are
// asynchronous (write-back cache: the generator does not wait, the final
// barrier does), reads are synchronous for whoever issued them.
class Workload {
  public:
    using DoneFn = std::function<void()>;

    Workload(Session& session, EventQueue& queue)
        : session_(session), queue_(queue) {}
    virtual ~Workload() = default;
    Workload(const Workload&) = delete;
    Workload& operator=(const Workload&) = delete;

    virtual void start() = 0;
    bool done() const { return done_; }
    const WorkloadReport& report() const { return report_; }
    void set_on_done(DoneFn fn) { on_done_ = std::move(fn); }

  protected:
    void begin_() { report_.start_ns = queue_.now(); }
    void finish_() {
        assert(!done_);
        done_ = true;
        report_.done_ns = queue_.now();
        if (on_done_) on_done_();
    }

    Session& session_;
    EventQueue& queue_;
    WorkloadReport report_;

  private:
    bool done_ = false;
    DoneFn on_done_;
};

// Sequential file write with OS clustering: every byte of the file covered
// exactly once by consecutive 128KB commands, all issued up front (the
// admission bound paces them), one fsync barrier at the end.
class SeqWriteWorkload final : public Workload {
  public:
    SeqWriteWorkload(Session& session, EventQueue& queue, SeqParams params)
        : Workload(session, queue), params_(params) {}

    void start() override {
        begin_();
        const std::uint64_t total = params_.file_size_bytes;
        const std::uint64_t n = (total + kClusterBytes - 1) / kClusterBytes;
        if (n == 0) {
            finish_();
            return;
        }
        remaining_ = n;
        for (std::uint64_t k = 0; k < n; ++k) {
            const std::uint64_t off = k * kClusterBytes;
            const std::uint64_t len =
                total - off < kClusterBytes ? total - off : kClusterBytes;
            session_.submit(ScsiDir::write, off / kDiskBlockBytes, len,
                            [this, len](std::uint64_t) {
                                report_.bytes_written += len;
                                report_.commands += 1;
                                if (--remaining_ == 0) finish_();
                            });
        }
    }

  private:
    SeqParams params_;
    std::uint64_t remaining_ = 0;
};

// Sequential read with at most one command outstanding: the next 128KB
// request is issued only when the previous one returns.
class SeqReadWorkload final : public Workload {
  public:
    SeqReadWorkload(Session& session, EventQueue& queue, SeqParams params)
        : Workload(session, queue), params_(params) {}

    void start() override {
        begin_();
        n_ = (params_.file_size_bytes + kClusterBytes - 1) / kClusterBytes;
        if (n_ == 0) {
            finish_();
            return;
        }
        issue_(0);
    }

  private:
    void issue_(std::uint64_t k) {
        const std::uint64_t off = k * kClusterBytes;
        const std::uint64_t len = params_.file_size_bytes - off < kClusterBytes
                                      ? params_.file_size_bytes - off
                                      : kClusterBytes;
        session_.submit(ScsiDir::read, off / kDiskBlockBytes, len,
                        [this, k, len](std::uint64_t) {
                            report_.bytes_read += len;
                            report_.commands += 1;
                            if (k + 1 < n_)
                                issue_(k + 1);
                            else
                                finish_();
                        });
    }

    SeqParams params_;
    std::uint64_t n_ = 0;
};

// Rewrite pass: read each 128KB cluster (blocking), dirty it, write it back
// asynchronously while the next read proceeds.
class RewriteWorkload final : public Workload {
  public:
    RewriteWorkload(Session& session, EventQueue& queue, SeqParams params)
        : Workload(session, queue), params_(params) {}

    void start() override {
        begin_();
        n_ = (params_.file_size_bytes + kClusterBytes - 1) / kClusterBytes;
        if (n_ == 0) {
            finish_();
            return;
        }
        read_(0);
    }

  private:
    void read_(std::uint64_t k) {
        const std::uint64_t off = k * kClusterBytes;
        const std::uint64_t len = params_.file_size_bytes - off < kClusterBytes
                                      ? params_.file_size_bytes - off
                                      : kClusterBytes;
        const std::uint64_t lba = off / kDiskBlockBytes;
        session_.submit(ScsiDir::read, lba, len,
                        [this, k, lba, len](std::uint64_t) {
                            report_.bytes_read += len;
                            report_.commands += 1;
                            reads_done_ += 1;
                            session_.submit(ScsiDir::write, lba, len,
                                            [this, len](std::uint64_t) {
                                                report_.bytes_written += len;
                                                report_.commands += 1;
                                                writes_done_ += 1;
                                                maybe_finish_();
                                            });
                            if (k + 1 < n_)
                                read_(k + 1);
                            else
                                maybe_finish_();
                        });
    }

    void maybe_finish_() {
        if (reads_done_ == n_ && writes_done_ == n_) finish_();
    }

    SeqParams params_;
    std::uint64_t n_ = 0;
    std::uint64_t reads_done_ = 0;
    std::uint64_t writes_done_ = 0;
};

// Random seeks: n_seekers independent loops each reading a random 8KB block
// (blocking per seeker), a fraction of reads dirtied and written back
// asynchronously.  Reports achieved seeks per second.
class SeekWorkload final : public Workload {
  public:
    SeekWorkload(Session& session, EventQueue& queue, RngStream& rng,
                 SeekParams params)
        : Workload(session, queue), rng_(rng), params_(params) {
        if (params_.n_seekers == 0)
            throw std::invalid_argument("seek: n_seekers must be positive");
        if (params_.region_blocks * kDiskBlockBytes < params_.read_len)
            throw std::invalid_argument("seek: region smaller than one read");
    }

    void start() override {
        begin_();
        if (params_.ops == 0) {
            finish_();
            return;
        }
        quota_.resize(params_.n_seekers, params_.ops / params_.n_seekers);
        for (std::uint64_t i = 0; i < params_.ops % params_.n_seekers; ++i)
            quota_[i] += 1;
        for (std::uint32_t i = 0; i < params_.n_seekers; ++i)
            if (quota_[i] > 0) {
                active_ += 1;
                next_read_(i);
            }
    }

  private:
    void next_read_(std::uint32_t seeker) {
        const std::uint64_t blocks =
            (params_.read_len + kDiskBlockBytes - 1) / kDiskBlockBytes;
        const std::uint64_t lba = rng_.below(params_.region_blocks - blocks + 1);
        session_.submit(
            ScsiDir::read, lba, params_.read_len,
            [this, seeker, lba](std::uint64_t) {
                report_.bytes_read += params_.read_len;
                report_.commands += 1;
                report_.seek_ops += 1;
                if (rng_.next_uniform() < params_.rewrite_prob) {
                    pending_writes_ += 1;
                    session_.submit(ScsiDir::write, lba, params_.read_len,
                                    [this](std::uint64_t) {
                                        report_.bytes_written +=
                                            params_.read_len;
                                        report_.commands += 1;
                                        pending_writes_ -= 1;
                                        maybe_finish_();
                                    });
                }
                if (--quota_[seeker] > 0) {
                    next_read_(seeker);
                } else {
                    active_ -= 1;
                    maybe_finish_();
                }
            });
    }

    void maybe_finish_() {
        if (active_ > 0 || pending_writes_ > 0) return;
        const double elapsed = to_seconds(queue_.now() - report_.start_ns);
        report_.seeks_per_sec =
            elapsed > 0 ? double(report_.seek_ops) / elapsed : 0.0;
        finish_();
    }

    RngStream& rng_;
    SeekParams params_;
    std::vector<std::uint64_t> quota_;
    std::uint32_t active_ = 0;
    std::uint64_t pending_writes_ = 0;
};

// Postmark-like transaction mix.  Phase 1 creates the file pool (async
// writes, one barrier); phase 2 runs transactions of (create|delete) plus
// (read|append).  Reads block the transaction loop, writes do not.  Deletes
// emit a 4KB metadata write and never empty the pool; appends grow the file
// up to size_max, at the cap they overwrite the last block.  File placement
// is uniform over a virtual disk of twice the initial data volume.
class PostmarkWorkload final : public Workload {
  public:
    PostmarkWorkload(Session& session, EventQueue& queue, RngStream& rng,
                     PostmarkParams params)
        : Workload(session, queue), rng_(rng), params_(params) {
        if (params_.size_min > params_.size_max || params_.size_min == 0)
            throw std::invalid_argument("postmark: bad size range");
        if (params_.n_files == 0)
            throw std::invalid_argument("postmark: n_files must be positive");
        const std::uint64_t mean = (params_.size_min + params_.size_max) / 2;
        vdisk_blocks_ = 2 * params_.n_files * mean / kDiskBlockBytes;
        if (vdisk_blocks_ < 4096) vdisk_blocks_ = 4096;
    }

    void start() override {
        begin_();
        phase_ = 1;
        for (std::uint32_t k = 0; k < params_.n_files; ++k) create_file_();
    }

    std::size_t pool_size() const { return files_.size(); }
    std::uint64_t files_created() const { return created_; }
    std::uint64_t files_deleted() const { return deleted_; }
    std::uint32_t transactions_done() const { return txns_done_; }

  private:
    struct File {
        std::uint64_t lba;
        std::uint64_t size;
    };

    std::uint64_t draw_lba_(std::uint64_t len) {
        const std::uint64_t blocks = (len + kDiskBlockBytes - 1) / kDiskBlockBytes;
        return rng_.below(vdisk_blocks_ - blocks + 1);
    }

    void async_write_(std::uint64_t lba, std::uint64_t len) {
        outstanding_ += 1;
        session_.submit(ScsiDir::write, lba, len, [this, len](std::uint64_t) {
            report_.bytes_written += len;
            report_.commands += 1;
            outstanding_ -= 1;
            if (phase_ == 1 && outstanding_ == 0) {
                phase_ = 2;
                next_txn_();
            } else if (phase_ == 3) {
                maybe_finish_();
            }
        });
    }

    void create_file_() {
        const std::uint64_t size = rng_.range(params_.size_min, params_.size_max);
        const std::uint64_t lba = draw_lba_(size);
        files_.push_back({lba, size});
        created_ += 1;
        async_write_(lba, size);
    }

    void next_txn_() {
        if (txns_done_ == params_.n_transactions) {
            phase_ = 3;
            maybe_finish_();
            return;
        }
        txns_done_ += 1;
        const bool is_delete = rng_.below(2) == 1;
        const bool is_read = rng_.below(2) == 0;
        if (is_delete && files_.size() > 1) {
            const std::uint64_t idx = rng_.below(files_.size());
            files_.erase(files_.begin() + std::ptrdiff_t(idx));
            deleted_ += 1;
            async_write_(draw_lba_(4096), 4096);  // metadata update
        } else {
            create_file_();  // includes delete re-drawn on a near-empty pool
        }
        if (is_read) {
            const std::uint64_t idx = rng_.below(files_.size());
            const File f = files_[idx];
            session_.submit(ScsiDir::read, f.lba, f.size,
                            [this, f](std::uint64_t) {
                                report_.bytes_read += f.size;
                                report_.commands += 1;
                                next_txn_();
                            });
        } else {
            append_(rng_.below(files_.size()));
            // Writes do not block the loop; trampoline instead of recursing.
            queue_.schedule(queue_.now(), [this] { next_txn_(); });
        }
    }

    void append_(std::uint64_t idx) {
        File& f = files_[idx];
        const std::uint64_t remaining = params_.size_max - f.size;
        if (remaining == 0) {
            async_write_(f.lba + (f.size - 1) / kDiskBlockBytes,
                         kDiskBlockBytes);
            return;
        }
        const std::uint64_t len =
            remaining <= 512 ? remaining : rng_.range(512, remaining);
        const std::uint64_t at =
            f.lba + (f.size + kDiskBlockBytes - 1) / kDiskBlockBytes;
        f.size += len;
        async_write_(at, len);
    }

    void maybe_finish_() {
        if (phase_ == 3 && outstanding_ == 0) finish_();
    }

    RngStream& rng_;
    PostmarkParams params_;
    std::uint64_t vdisk_blocks_;
    std::vector<File> files_;
    int phase_ = 0;
    std::uint64_t outstanding_ = 0;
    std::uint64_t created_ = 0;
    std::uint64_t deleted_ = 0;
    std::uint32_t txns_done_ = 0;
};

// Runs several generators over the same simulated session, reporting when
// every member has finished.  One member behaves exactly as if it ran alone.
class MultiWorkload {
  public:
    using DoneFn = std::function<void()>;

    void add(Workload* w) { members_.push_back(w); }
    void set_on_done(DoneFn fn) { on_done_ = std::move(fn); }

    void start() {
        remaining_ = members_.size();
        if (remaining_ == 0) {
            if (on_done_) on_done_();
            return;
        }
        for (Workload* w : members_) {
            w->set_on_done([this] {
                if (--remaining_ == 0 && on_done_) on_done_();
            });
            w->start();
        }
    }

    bool done() const { return remaining_ == 0 && !members_.empty(); }

    WorkloadReport merged() const {
        WorkloadReport out;
        bool first = true;
        for (const Workload* w : members_) {
            const WorkloadReport& r = w->report();
            out.bytes_written += r.bytes_written;
            out.bytes_read += r.bytes_read;
            out.commands += r.commands;
            out.seek_ops += r.seek_ops;
            if (first || r.start_ns < out.start_ns) out.start_ns = r.start_ns;
            if (first || r.done_ns > out.done_ns) out.done_ns = r.done_ns;
            first = false;
        }
        return out;
    }

  private:
    std::vector<Workload*> members_;
    std::size_t remaining_ = 0;
    DoneFn on_done_;
};

}  // namespace ftsim
